#include "vaxnet/cyclic.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <cstdio>
#include <ostream>
#include <random>
#include <thread>

namespace vaxnet {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Priorities, valid cuts and the capacity separator, unless the caller set
// their own.
mip::SolveConfig program_config(const Instance& inst, const Program1& p,
                                mip::SolveConfig cfg) {
  if (cfg.branch_priority.empty()) cfg.branch_priority = branching_priorities(inst, p.index);
  if (cfg.cuts.empty()) cfg.cuts = linking_cuts(inst, p.index);
  if (!cfg.separator) cfg.separator = capacity_separator(inst, p.index);
  return cfg;
}

struct StepOutcome {
  bool has_solution = false;
  bool proven = false;
  double objective = 0.0;
  std::vector<double> x;
  NetworkSolution solution;
};

StepOutcome solve_step(const Instance& inst, const Program1& p, const mip::MipModel& model,
                       const mip::SolveConfig& cfg, const std::vector<double>& start) {
  const mip::BnbResult r = mip::solve_mip(model, cfg, start);
  StepOutcome out;
  out.proven = r.status == mip::BnbStatus::optimal;
  if (!r.has_incumbent()) return out;
  out.has_solution = true;
  out.objective = r.objective;
  out.x = r.x;
  out.solution = decode_solution(inst, p.index, r.x);
  return out;
}

CyclicRun run_once(const Instance& inst, const Program1& p, const mip::SolveConfig& cfg,
                   const CyclicOptions& opts, std::uint64_t seed, std::vector<int> f) {
  CyclicRun run;
  run.seed = seed;
  run.initial_frequencies = f;
  const int H = inst.num_hubs();

  std::vector<double> start;
  if (auto direct = direct_supply_solution(inst)) start = encode_solution(inst, p.index, *direct);

  auto record = [&](int k, CyclicPhase phase, const StepOutcome& s, double ms) {
    run.trace.push_back({k, phase, s.objective, s.solution.open_hub_count(), ms, s.proven});
    if (!s.proven) run.status = CyclicStatus::incomplete;
    run.iterations = k;
    run.objective = s.objective;
    run.solution = s.solution;
  };

  double last_location_value = mip::kInfinity;
  for (int k = 1;; ++k) {
    // Step 2: fixed frequencies.
    auto t0 = Clock::now();
    const StepOutcome fs = solve_step(
        inst, p, restrict_frequencies(p.model, p.index, f, opts.closed_hubs), cfg, start);
    if (!fs.has_solution) {
      run.status = CyclicStatus::failed;
      return run;
    }
    record(k, CyclicPhase::frequency, fs, ms_since(t0));
    if (k > 1 && last_location_value - fs.objective <= opts.epsilon) break;
    if (!fs.proven) break;

    // Step 3: fixed open hubs.
    std::vector<int> open(H);
    for (int h = 0; h < H; ++h) open[h] = fs.solution.hubs[h].open ? 1 : 0;
    t0 = Clock::now();
    const StepOutcome ls =
        solve_step(inst, p, restrict_locations(p.model, p.index, open), cfg, fs.x);
    if (!ls.has_solution) {
      run.status = CyclicStatus::failed;
      return run;
    }
    record(k, CyclicPhase::location, ls, ms_since(t0));
    if (fs.objective - ls.objective <= opts.epsilon) break;
    if (!ls.proven) break;

    // Step 4: carry the frequencies of the location-restricted optimum.
    for (int h = 0; h < H; ++h) {
      const HubPlan& hp = ls.solution.hubs[h];
      f[h] = hp.open ? static_cast<int>(hp.frequency) : 0;
    }
    last_location_value = ls.objective;
    start = ls.x;
  }
  return run;
}

}  // namespace

ExactResult solve_exact(const Instance& inst, const mip::SolveConfig& cfg) {
  const Program1 p = build_program1(inst);
  std::vector<double> start;
  if (auto direct = direct_supply_solution(inst)) start = encode_solution(inst, p.index, *direct);
  ExactResult out;
  mip::SolveConfig full = program_config(inst, p, cfg);
  if (cfg.cuts.empty())
    for (auto& row : supply_tree_cuts(inst, p.index)) full.cuts.push_back(std::move(row));
  out.bnb = mip::solve_mip(p.model, full, start);
  if (out.bnb.has_incumbent()) out.solution = decode_solution(inst, p.index, out.bnb.x);
  return out;
}

std::string_view to_string(CyclicPhase p) {
  return p == CyclicPhase::frequency ? "freq" : "loc";
}

std::string_view to_string(CyclicStatus s) {
  switch (s) {
    case CyclicStatus::converged: return "converged";
    case CyclicStatus::incomplete: return "incomplete";
    case CyclicStatus::failed: return "failed";
  }
  return "?";
}

bool CyclicResult::incomplete() const {
  return best >= 0 && runs[best].status == CyclicStatus::incomplete;
}

std::vector<int> draw_frequencies(int hubs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> f(hubs);
  for (int& v : f) v = 1 + static_cast<int>(rng() >> 63);
  return f;
}

CyclicResult cyclic_solve(const Instance& inst, const CyclicOptions& opts) {
  if (!(opts.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (opts.multistart < 1) throw std::invalid_argument("multistart must be >= 1");
  mip::check_config(opts.solve);
  const Program1 p = build_program1(inst);
  const mip::SolveConfig cfg = program_config(inst, p, opts.solve);
  if (opts.initial_frequencies) {
    if (static_cast<int>(opts.initial_frequencies->size()) != inst.num_hubs())
      throw std::invalid_argument("initial frequency vector has the wrong length");
    for (int v : *opts.initial_frequencies)
      if (v != 1 && v != 2) throw std::invalid_argument("initial frequencies must be 1 or 2");
  }

  CyclicResult result;
  result.runs.resize(opts.multistart);
  auto replica = [&](int r) {
    const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(r);
    std::vector<int> f = r == 0 && opts.initial_frequencies
                             ? *opts.initial_frequencies
                             : draw_frequencies(inst.num_hubs(), seed);
    result.runs[r] = run_once(inst, p, cfg, opts, seed, std::move(f));
  };
  const int workers = std::min(opts.solve.threads, opts.multistart);
  if (workers <= 1) {
    for (int r = 0; r < opts.multistart; ++r) replica(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int r; (r = next++) < opts.multistart;) {
          try {
            replica(r);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  for (int r = 0; r < opts.multistart; ++r) {
    const CyclicRun& run = result.runs[r];
    if (!run.solution || run.status == CyclicStatus::failed) continue;
    if (result.best < 0 || run.objective < result.runs[result.best].objective) result.best = r;
  }
  if (result.best < 0) throw CyclicFailure("no replica found a feasible design");
  return result;
}

bool trace_is_monotone(const CyclicRun& run, double tol) {
  for (std::size_t i = 1; i < run.trace.size(); ++i)
    if (run.trace[i].objective > run.trace[i - 1].objective + tol) return false;
  return true;
}

void write_trace_csv(const CyclicRun& run, std::ostream& out) {
  out << "k,phase,objective,open_hubs,wall_ms\n";
  char buf[128];
  for (const CyclicStep& s : run.trace) {
    std::snprintf(buf, sizeof buf, "%d,%s,%.6f,%d,%.3f\n", s.k,
                  std::string(to_string(s.phase)).c_str(), s.objective, s.open_hubs, s.wall_ms);
    out << buf;
  }
}

}  // namespace vaxnet
