#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vaxnet/bench.hpp"
#include "vaxnet/cyclic.hpp"
#include "vaxnet/formulation.hpp"
#include "vaxnet/generator.hpp"
#include "vaxnet/instance_io.hpp"
#include "vaxnet/mps.hpp"
#include "vaxnet/oracle.hpp"

namespace vaxnet::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Reported with exit code kUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  int threads = 1;
  std::optional<double> time_limit_s;
  std::optional<long> node_limit;
  double epsilon = 1e-6;
  int multistart = 1;
  bool allow_reopen = false;
  std::uint64_t seed = 1;

  mip::SolveConfig solve_config() const {
    mip::SolveConfig cfg;
    cfg.time_limit_s = time_limit_s;
    cfg.node_limit = node_limit;
    cfg.threads = threads;
    return cfg;
  }
  ClosedHubRule closed_hubs() const {
    return allow_reopen ? ClosedHubRule::free : ClosedHubRule::force_closed;
  }
};

struct GenerateArgs {
  std::string config;
  int hubs = 3;
  int clinics = 20;
  std::string density = "moderate";
  int modes = 2;
  int devices = 2;
  std::string arc_policy = "complete";
  double cutoff_radius = 0.0;
  std::string output;
};

struct SolveArgs {
  std::string instance;
  std::string method = "exact";
  std::optional<int> seed_freq;
  std::string output;
  std::string trace;
};

struct ValidateArgs {
  std::string instance;
  std::string solution;
  bool json = false;
};

struct BenchArgs {
  std::string instances;
  std::vector<int> hubs;
  std::vector<int> clinics;
  std::vector<std::string> densities;
  int count = 1;
  std::string output;
  bool pretty = false;
  bool no_oracle = false;
  std::optional<int> seed_freq;
};

struct ExportArgs {
  std::string instance;
  std::string format = "mps";
  std::string output;
};

Density density_or_throw(const std::string& text) {
  const auto d = parse_density(text);
  if (!d) throw UsageError("unknown density '" + text + "' (sparse, moderate, dense)");
  return *d;
}

int cmd_generate(const GenerateArgs& a, const CLI::App& sub, const Globals& g, bool seed_given,
                 std::ostream& out) {
  GeneratorConfig cfg;
  if (!a.config.empty()) cfg = read_generator_config(a.config);
  // Flags given on the command line override the config file.
  if (seed_given || a.config.empty()) cfg.seed = g.seed;
  if (sub.count("--hubs") || a.config.empty()) cfg.n_hubs = a.hubs;
  if (sub.count("--clinics") || a.config.empty()) cfg.n_clinics = a.clinics;
  if (sub.count("--density") || a.config.empty()) cfg.density = density_or_throw(a.density);
  if (sub.count("--modes") || a.config.empty()) cfg.n_modes = a.modes;
  if (sub.count("--devices") || a.config.empty()) cfg.n_devices = a.devices;
  if (sub.count("--arc-policy") || a.config.empty()) {
    const auto p = parse_arc_policy(a.arc_policy);
    if (!p) throw UsageError("unknown arc policy '" + a.arc_policy + "'");
    cfg.arc_policy = *p;
  }
  if (sub.count("--cutoff-radius") || a.config.empty()) cfg.cutoff_radius = a.cutoff_radius;
  if (cfg.n_clinics < 1) throw UsageError("--clinics must be at least 1");
  try {
    check_config(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Instance inst = generate_instance(cfg);
  write_instance(inst, a.output);
  out << a.output << ": hubs=" << inst.num_hubs() << " clinics=" << inst.num_clinics()
      << " arcs=" << inst.num_arcs() << " modes=" << inst.num_modes()
      << " devices=" << inst.num_devices() << '\n';
  return kOk;
}

void write_outputs(const Instance& inst, const NetworkSolution& sol, const SolveArgs& a) {
  if (!a.output.empty()) write_solution(inst, sol, a.output);
}

int cmd_solve(const SolveArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  const Instance inst = read_instance(a.instance);
  if (a.seed_freq && a.method != "cyclic")
    throw UsageError("--seed-freq only applies to --method cyclic");
  const mip::SolveConfig cfg = g.solve_config();
  const auto t0 = Clock::now();

  if (a.method == "exact") {
    const ExactResult r = solve_exact(inst, cfg);
    const double ms = ms_since(t0);
    if (r.solution) write_outputs(inst, *r.solution, a);
    out << "method=exact status=" << to_string(r.bnb.status);
    if (r.bnb.has_incumbent()) out << " objective=" << fixed(r.bnb.objective, 6);
    out << " bound=" << fixed(r.bnb.best_bound, 6) << " wall_ms=" << fixed(ms, 3)
        << " nodes=" << r.bnb.nodes << '\n';
    switch (r.bnb.status) {
      case mip::BnbStatus::optimal: return kOk;
      case mip::BnbStatus::node_limit:
      case mip::BnbStatus::time_limit: return kLimit;
      default: return kInfeasible;
    }
  }

  if (a.method == "cyclic") {
    CyclicOptions opts;
    opts.seed = g.seed;
    opts.epsilon = g.epsilon;
    opts.multistart = g.multistart;
    opts.closed_hubs = g.closed_hubs();
    opts.solve = cfg;
    if (a.seed_freq) opts.initial_frequencies = std::vector<int>(inst.num_hubs(), *a.seed_freq);
    CyclicResult r;
    try {
      r = cyclic_solve(inst, opts);
    } catch (const CyclicFailure& e) {
      err << "cyclic: " << e.what() << '\n';
      out << "method=cyclic status=failed wall_ms=" << fixed(ms_since(t0), 3) << '\n';
      return kInfeasible;
    }
    const double ms = ms_since(t0);
    const CyclicRun& best = r.best_run();
    write_outputs(inst, *best.solution, a);
    if (!a.trace.empty()) {
      std::ofstream trace(a.trace);
      if (!trace) throw IoError("cannot write " + a.trace);
      write_trace_csv(best, trace);
    }
    out << "method=cyclic status=" << to_string(best.status)
        << " objective=" << fixed(best.objective, 6) << " wall_ms=" << fixed(ms, 3)
        << " iterations=" << best.iterations << " seed=" << best.seed << '\n';
    return best.status == CyclicStatus::converged ? kOk : kLimit;
  }

  // oracle
  OracleResult r;
  try {
    r = oracle_enumerate(inst);
  } catch (const OracleGuardError& e) {
    err << "oracle: " << e.what() << '\n';
    return kLimit;
  }
  const double ms = ms_since(t0);
  if (!r.feasible) {
    out << "method=oracle status=infeasible wall_ms=" << fixed(ms, 3)
        << " enumerated=" << r.enumerated << '\n';
    return kInfeasible;
  }
  write_outputs(inst, r.best, a);
  out << "method=oracle status=optimal objective=" << fixed(r.cost, 6)
      << " wall_ms=" << fixed(ms, 3) << " enumerated=" << r.enumerated << '\n';
  return kOk;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  const Instance inst = read_instance(a.instance);
  NetworkSolution sol;
  try {
    sol = read_solution(inst, a.solution);
  } catch (const SolutionMismatch& e) {
    throw UsageError(e.what());
  }
  const ValidationReport rep = validate_solution(inst, sol);
  if (a.json) {
    nlohmann::ordered_json doc;
    doc["valid"] = rep.ok();
    doc["violations"] = nlohmann::ordered_json::array();
    auto add = [&](const SolutionViolation& v, const char* severity) {
      doc["violations"].push_back({{"severity", severity},
                                   {"code", to_string(v.code)},
                                   {"subject", v.subject},
                                   {"value", v.value},
                                   {"limit", v.limit},
                                   {"detail", v.detail}});
    };
    for (const auto& v : rep.errors) add(v, "error");
    for (const auto& v : rep.warnings) add(v, "warning");
    out << doc.dump(2) << '\n';
  } else {
    out << "severity,code,subject,value,limit,detail\n";
    auto row = [&](const SolutionViolation& v, const char* severity) {
      out << severity << ',' << to_string(v.code) << ',' << csv_field(v.subject) << ','
          << fixed(v.value, 6) << ',' << fixed(v.limit, 6) << ',' << csv_field(v.detail) << '\n';
    };
    for (const auto& v : rep.errors) row(v, "error");
    for (const auto& v : rep.warnings) row(v, "warning");
  }
  return rep.ok() ? kOk : kValidationFailed;
}

std::vector<BenchCase> bench_cases(const BenchArgs& a, const Globals& g) {
  std::vector<BenchCase> cases;
  if (!a.instances.empty()) {
    if (!a.hubs.empty() || !a.clinics.empty() || !a.densities.empty())
      throw UsageError("--instances cannot be combined with sweep flags");
    if (!fs::is_directory(a.instances)) throw IoError("not a directory: " + a.instances);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(a.instances))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) cases.push_back({f.stem().string(), read_instance(f), "-"});
    return cases;
  }
  if (a.hubs.empty() || a.clinics.empty())
    throw UsageError("bench needs --instances DIR or sweep flags --hubs and --clinics");
  if (a.count < 1) throw UsageError("--count must be at least 1");
  const std::vector<std::string> densities =
      a.densities.empty() ? std::vector<std::string>{"moderate"} : a.densities;
  std::uint64_t seed = g.seed;
  for (int h : a.hubs)
    for (int c : a.clinics)
      for (const std::string& d : densities)
        for (int k = 0; k < a.count; ++k, ++seed) {
          GeneratorConfig cfg;
          cfg.seed = seed;
          cfg.n_hubs = h;
          cfg.n_clinics = c;
          cfg.density = density_or_throw(d);
          if (c < 1) throw UsageError("--clinics must be at least 1");
          try {
            check_config(cfg);
          } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
          }
          const std::string id = "s" + std::to_string(seed) + "-h" + std::to_string(h) + "-c" +
                                 std::to_string(c) + "-" + d;
          cases.push_back({id, generate_instance(cfg), d});
        }
  return cases;
}

int cmd_bench(const BenchArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  const std::vector<BenchCase> cases = bench_cases(a, g);
  if (cases.empty()) throw UsageError("no instances to benchmark");
  BenchOptions opts;
  opts.solve = g.solve_config();
  opts.epsilon = g.epsilon;
  opts.multistart = g.multistart;
  opts.closed_hubs = g.closed_hubs();
  opts.seed_freq = a.seed_freq;
  opts.threads = g.threads;
  opts.oracle_check = !a.no_oracle;
  std::size_t done = 0;
  opts.on_row = [&](std::size_t, const BenchRow& r) {
    err << '[' << ++done << '/' << cases.size() << "] " << r.id << ' ' << r.status()
        << " exact_ms=" << fixed(r.exact_ms, 1) << " cyclic_ms=" << fixed(r.cyclic_ms, 1) << '\n';
  };
  const std::vector<BenchRow> rows = run_bench(cases, opts);

  std::ofstream csv(a.output);
  if (!csv) throw IoError("cannot write " + a.output);
  write_bench_csv(rows, csv);
  csv.close();
  if (!csv) throw IoError("failed writing " + a.output);

  if (a.pretty) write_bench_table(rows, out);
  write_bench_summary(summarize(rows), out);
  const bool broken = std::any_of(rows.begin(), rows.end(), [](const BenchRow& r) {
    return std::any_of(r.flags.begin(), r.flags.end(), [](const std::string& f) {
      return f == "oracle-mismatch" || f == "negative-gap" || f == "non-monotone";
    });
  });
  return broken ? kValidationFailed : kOk;
}

int cmd_export(const ExportArgs& a, std::ostream& out) {
  const Instance inst = read_instance(a.instance);
  const Program1 p = build_program1(inst);
  export_mps(p.model, a.output);
  out << a.output << ": rows=" << p.model.num_constraints()
      << " columns=" << p.model.num_variables() << '\n';
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vaccine distribution network design: exact and cyclic solvers", "vaxnet"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");

  Globals g;
  app.add_option("--threads", g.threads, "Concurrent solves (multistart, bench)")
      ->check(CLI::PositiveNumber);
  app.add_option("--time-limit-s", g.time_limit_s, "Wall-clock limit per MIP solve")
      ->check(CLI::PositiveNumber);
  app.add_option("--node-limit", g.node_limit, "Node limit per MIP solve")
      ->check(CLI::PositiveNumber);
  app.add_option("--epsilon", g.epsilon, "Cyclic stopping threshold (absolute)")
      ->check(CLI::PositiveNumber);
  app.add_option("--multistart", g.multistart, "Cyclic replicas")->check(CLI::PositiveNumber);
  app.add_flag("--allow-reopen", g.allow_reopen,
               "Let hubs closed by a frequency vector reopen in the next solve");
  app.add_option("--seed", g.seed, "Generator seed, or cyclic seed for solve");

  GenerateArgs ga;
  CLI::App* gen = app.add_subcommand("generate", "Write a synthetic instance");
  gen->fallthrough();
  gen->add_option("--config", ga.config, "Generator config JSON (flags override it)");
  gen->add_option("--hubs", ga.hubs, "Candidate hubs");
  gen->add_option("--clinics", ga.clinics, "Clinics");
  gen->add_option("--density", ga.density, "sparse, moderate or dense");
  gen->add_option("--modes", ga.modes, "Transport modes");
  gen->add_option("--devices", ga.devices, "Storage devices");
  gen->add_option("--arc-policy", ga.arc_policy, "complete or distance_cutoff");
  gen->add_option("--cutoff-radius", ga.cutoff_radius, "Arc radius for distance_cutoff");
  gen->add_option("-o,--output", ga.output, "Instance file")->required();

  SolveArgs sa;
  int seed_freq = 0;
  CLI::App* solve = app.add_subcommand("solve", "Solve an instance");
  solve->fallthrough();
  solve->add_option("instance", sa.instance, "Instance JSON")->required();
  solve->add_option("--method", sa.method, "exact, cyclic or oracle")
      ->check(CLI::IsMember({"exact", "cyclic", "oracle"}));
  solve->add_option("--seed-freq", seed_freq, "Uniform initial frequency for cyclic (1 or 2)")
      ->check(CLI::Range(1, 2));
  solve->add_option("-o,--output", sa.output, "Solution JSON");
  solve->add_option("--trace", sa.trace, "Cyclic objective trace CSV");

  ValidateArgs va;
  CLI::App* val = app.add_subcommand("validate", "Check a solution against its instance");
  val->fallthrough();
  val->add_option("instance", va.instance, "Instance JSON")->required();
  val->add_option("solution", va.solution, "Solution JSON")->required();
  val->add_flag("--json", va.json, "JSON report instead of CSV");

  BenchArgs ba;
  int bench_seed_freq = 0;
  CLI::App* bench = app.add_subcommand("bench", "Compare exact and cyclic solves");
  bench->fallthrough();
  bench->add_option("--instances", ba.instances, "Directory of instance JSON files");
  bench->add_option("--hubs", ba.hubs, "Sweep: hub counts")->delimiter(',');
  bench->add_option("--clinics", ba.clinics, "Sweep: clinic counts")->delimiter(',');
  bench->add_option("--density", ba.densities, "Sweep: density classes")->delimiter(',');
  bench->add_option("--count", ba.count, "Sweep: instances per combination");
  bench->add_option("-o,--output", ba.output, "Report CSV")->required();
  bench->add_flag("--pretty", ba.pretty, "Print an aligned table");
  bench->add_flag("--no-oracle", ba.no_oracle, "Skip the oracle cross-check");
  bench->add_option("--seed-freq", bench_seed_freq,
                    "Uniform initial frequency instead of the per-instance draw")
      ->check(CLI::Range(1, 2));

  ExportArgs ea;
  CLI::App* exp = app.add_subcommand("export", "Write the MIP of an instance");
  exp->fallthrough();
  exp->add_option("instance", ea.instance, "Instance JSON")->required();
  exp->add_option("--format", ea.format, "Output format")->check(CLI::IsMember({"mps"}));
  exp->add_option("-o,--output", ea.output, "Output file")->required();

  std::vector<std::string> argv_text = {"vaxnet"};
  argv_text.insert(argv_text.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_text) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_generate(ga, *gen, g, app.count("--seed") > 0, out);
    if (*solve) {
      if (solve->count("--seed-freq")) sa.seed_freq = seed_freq;
      return cmd_solve(sa, g, out, err);
    }
    if (*val) return cmd_validate(va, out);
    if (*bench) {
      if (bench->count("--seed-freq")) ba.seed_freq = bench_seed_freq;
      return cmd_bench(ba, g, out, err);
    }
    if (*exp) return cmd_export(ea, out);
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "io: " << e.what() << '\n';
    return kIo;
  } catch (const vaxnet::ParseError& e) {
    err << "parse: " << e.what() << '\n';
    return kIo;
  } catch (const InstanceError& e) {
    err << "instance: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    err << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    // Numerical trouble in the LP engine; the run could not finish.
    err << "solver: " << e.what() << '\n';
    return kLimit;
  }
  return kUsage;
}

}  // namespace vaxnet::cli
