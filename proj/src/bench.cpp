#include "vaxnet/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "vaxnet/formulation.hpp"

namespace vaxnet {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// A cyclic result can only undercut a proven optimum by tolerance noise.
constexpr double kGapFloor = -1e-4;

}  // namespace

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string BenchRow::status() const {
  if (flags.empty()) return "ok";
  if (flags.size() == 1 && flags[0] == "oracle-ok") return "ok;oracle-ok";
  std::string s;
  for (const std::string& f : flags) s += (s.empty() ? "" : ";") + f;
  return s;
}

bool BenchRow::in_statistics() const {
  return exact_optimal && std::none_of(flags.begin(), flags.end(), [](const std::string& f) {
           return f == "cyclic-failed";
         });
}

BenchRow bench_instance(const BenchCase& c, const BenchOptions& opts) {
  const Instance& inst = c.instance;
  require_valid(inst);
  BenchRow row;
  row.id = c.id;
  row.hubs = inst.num_hubs();
  row.nodes = inst.num_nodes();
  row.density = c.density;
  const Program1 p = build_program1(inst);
  for (int j = 0; j < p.model.num_variables(); ++j)
    row.binvars += p.model.variable(j).kind == mip::VarKind::binary;

  mip::SolveConfig solve = opts.solve;
  solve.threads = 1;
  solve.deterministic = true;

  auto t0 = Clock::now();
  const ExactResult exact = solve_exact(inst, solve);
  row.exact_ms = ms_since(t0);
  row.exact_obj = exact.bnb.has_incumbent() ? exact.bnb.objective : mip::kInfinity;
  row.exact_optimal = exact.proven_optimal();
  switch (exact.bnb.status) {
    case mip::BnbStatus::time_limit: row.flags.push_back("exact-timeout"); break;
    case mip::BnbStatus::node_limit: row.flags.push_back("exact-node-limit"); break;
    case mip::BnbStatus::infeasible: row.flags.push_back("infeasible"); break;
    case mip::BnbStatus::unbounded: row.flags.push_back("unbounded"); break;
    case mip::BnbStatus::optimal: break;
  }

  CyclicOptions copts;
  copts.seed = fnv1a(c.id);
  copts.epsilon = opts.epsilon;
  copts.multistart = opts.multistart;
  copts.closed_hubs = opts.closed_hubs;
  copts.solve = solve;
  if (opts.seed_freq) copts.initial_frequencies = std::vector<int>(inst.num_hubs(), *opts.seed_freq);
  t0 = Clock::now();
  try {
    const CyclicResult cyc = cyclic_solve(inst, copts);
    row.cyclic_ms = ms_since(t0);
    const CyclicRun& best = cyc.best_run();
    row.cyclic_obj = best.objective;
    row.cyclic_iterations = best.iterations;
    for (const CyclicRun& run : cyc.runs) row.monotone = row.monotone && trace_is_monotone(run);
    if (cyc.incomplete()) row.flags.push_back("cyclic-incomplete");
    if (!row.monotone) row.flags.push_back("non-monotone");
  } catch (const CyclicFailure&) {
    row.cyclic_ms = ms_since(t0);
    row.cyclic_obj = mip::kInfinity;
    row.flags.push_back("cyclic-failed");
  }

  if (row.in_statistics()) {
    if (row.exact_obj != 0.0)
      row.gap_pct = 100.0 * (row.cyclic_obj - row.exact_obj) / row.exact_obj;
    else
      row.gap_pct = row.cyclic_obj == 0.0 ? 0.0 : mip::kInfinity;
    if (row.gap_pct < kGapFloor) row.flags.push_back("negative-gap");
  } else {
    row.gap_pct = std::nan("");
  }

  if (opts.oracle_check && oracle_search_size(inst, opts.oracle_guard)) {
    const OracleResult o = oracle_enumerate(inst, opts.oracle_guard);
    row.oracle_obj = o.feasible ? o.cost : mip::kInfinity;
    const bool decided = row.exact_optimal || exact.bnb.status == mip::BnbStatus::infeasible;
    const bool agree = o.feasible ? exact.bnb.has_incumbent() &&
                                        std::abs(o.cost - row.exact_obj) <= 1e-6
                                  : !exact.bnb.has_incumbent();
    if (decided) row.flags.push_back(agree ? "oracle-ok" : "oracle-mismatch");
  }
  return row;
}

std::vector<BenchRow> run_bench(const std::vector<BenchCase>& cases, const BenchOptions& opts) {
  if (cases.empty()) throw std::invalid_argument("no instances to benchmark");
  if (opts.threads < 1) throw std::invalid_argument("threads must be >= 1");
  std::vector<BenchRow> rows(cases.size());
  const int workers = std::min<int>(opts.threads, static_cast<int>(cases.size()));
  std::mutex report_mutex;
  auto finished = [&](std::size_t i) {
    if (!opts.on_row) return;
    std::lock_guard lock(report_mutex);
    opts.on_row(i, rows[i]);
  };
  if (workers == 1) {
    for (std::size_t i = 0; i < cases.size(); ++i) {
      rows[i] = bench_instance(cases[i], opts);
      finished(i);
    }
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < cases.size();) {
        try {
          rows[i] = bench_instance(cases[i], opts);
          finished(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

BenchSummary summarize(const std::vector<BenchRow>& rows) {
  BenchSummary s;
  s.rows = static_cast<int>(rows.size());
  double total = 0.0;
  for (const BenchRow& r : rows) {
    if (r.cyclic_ms < r.exact_ms) ++s.cyclic_faster;
    if (!r.in_statistics()) continue;
    s.max_gap = s.counted == 0 ? r.gap_pct : std::max(s.max_gap, r.gap_pct);
    total += r.gap_pct;
    ++s.counted;
  }
  if (s.counted > 0) s.mean_gap = total / s.counted;
  return s;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "instance,hubs,nodes,binvars,density,exact_obj,exact_ms,cyclic_obj,cyclic_ms,gap_pct,"
         "status\n";
  for (const BenchRow& r : rows) {
    out << r.id << ',' << r.hubs << ',' << r.nodes << ',' << r.binvars << ',' << r.density << ','
        << fixed(r.exact_obj, 6) << ',' << fixed(r.exact_ms, 3) << ',' << fixed(r.cyclic_obj, 6)
        << ',' << fixed(r.cyclic_ms, 3) << ',' << (std::isnan(r.gap_pct) ? "" : fixed(r.gap_pct, 4))
        << ',' << r.status() << '\n';
  }
}

void write_bench_table(const std::vector<BenchRow>& rows, std::ostream& out) {
  std::vector<std::vector<std::string>> cells = {{"Instance", "Hubs", "Nodes", "0/1 Variables",
                                                  "Pop. Density", "Exact", "Exact ms", "Cyclic",
                                                  "Cyclic ms", "Gap %", "Status"}};
  for (const BenchRow& r : rows)
    cells.push_back({r.id, std::to_string(r.hubs), std::to_string(r.nodes),
                     std::to_string(r.binvars), r.density, fixed(r.exact_obj, 2),
                     fixed(r.exact_ms, 0), fixed(r.cyclic_obj, 2), fixed(r.cyclic_ms, 0),
                     std::isnan(r.gap_pct) ? "-" : fixed(r.gap_pct, 2), r.status()});
  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& line : cells)
    for (std::size_t k = 0; k < line.size(); ++k) width[k] = std::max(width[k], line[k].size());
  for (const auto& line : cells) {
    std::string text;
    for (std::size_t k = 0; k < line.size(); ++k) {
      // Text columns left-aligned, numbers right-aligned.
      const bool left = k == 0 || k == 4 || k + 1 == line.size();
      const std::string pad(width[k] - line[k].size(), ' ');
      text += (k ? "  " : "") + (left ? line[k] + pad : pad + line[k]);
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out << text << '\n';
  }
}

void write_bench_summary(const BenchSummary& s, std::ostream& out) {
  out << "rows=" << s.rows << " counted=" << s.counted << " max_gap_pct=" << fixed(s.max_gap, 4)
      << " mean_gap_pct=" << fixed(s.mean_gap, 4) << " cyclic_faster=" << s.cyclic_faster << '\n';
}

}  // namespace vaxnet
