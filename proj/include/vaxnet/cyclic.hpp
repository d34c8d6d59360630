#ifndef VAXNET_CYCLIC_HPP
#define VAXNET_CYCLIC_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "vaxnet/formulation.hpp"
#include "vaxnet/instance.hpp"
#include "vaxnet/network_solution.hpp"
#include "vaxnet/solver.hpp"

namespace vaxnet {

struct ExactResult {
  mip::BnbResult bnb;
  std::optional<NetworkSolution> solution;  // decoded incumbent
  bool proven_optimal() const { return bnb.status == mip::BnbStatus::optimal; }
};

/// Solves Program 1 to proven optimality (or until a limit) with storage
/// choices branched first and the all-direct design as the starting
/// incumbent.
ExactResult solve_exact(const Instance& inst, const mip::SolveConfig& cfg = {});

enum class CyclicPhase { frequency, location };
std::string_view to_string(CyclicPhase p);

struct CyclicStep {
  int k = 0;
  CyclicPhase phase = CyclicPhase::frequency;
  double objective = 0.0;
  int open_hubs = 0;
  double wall_ms = 0.0;  // time of this restricted solve
  bool proven = true;    // the restricted solve reached optimality
};

enum class CyclicStatus {
  converged,   // stopped by an epsilon test
  incomplete,  // a restricted solve hit a limit; result is still feasible
  failed,      // a restricted model had no feasible solution
};
std::string_view to_string(CyclicStatus s);

struct CyclicRun {
  std::uint64_t seed = 0;
  std::vector<int> initial_frequencies;
  std::vector<CyclicStep> trace;  // W_f^1, W_l^1, W_f^2, ...
  CyclicStatus status = CyclicStatus::converged;
  int iterations = 0;  // k at the stop
  double objective = mip::kInfinity;
  std::optional<NetworkSolution> solution;
};

struct CyclicOptions {
  std::uint64_t seed = 1;
  double epsilon = 1e-6;  // absolute improvement threshold
  int multistart = 1;     // replicas use seeds seed, seed+1, ...
  ClosedHubRule closed_hubs = ClosedHubRule::force_closed;
  /// Replaces the random draw of the first replica.
  std::optional<std::vector<int>> initial_frequencies;
  /// Per restricted solve; `threads` bounds the concurrent replicas.
  mip::SolveConfig solve;
};

struct CyclicResult {
  std::vector<CyclicRun> runs;  // in seed order
  int best = -1;                // index into runs, lowest objective, then seed
  const CyclicRun& best_run() const { return runs.at(best); }
  bool incomplete() const;
};

/// Thrown when no replica produced a feasible design.
class CyclicFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The alternating heuristic: fix replenishment frequencies and solve, fix
/// the resulting open hubs and solve, carry the new frequencies over, and
/// stop as soon as a step improves by no more than epsilon.
CyclicResult cyclic_solve(const Instance& inst, const CyclicOptions& opts = {});

/// Random initial frequency vector with entries in {1, 2}.
std::vector<int> draw_frequencies(int hubs, std::uint64_t seed);

/// True when every step of the trace is no worse than the one before,
/// within `tol`.
bool trace_is_monotone(const CyclicRun& run, double tol = 1e-6);

/// Trace rows "k,phase,objective,open_hubs,wall_ms" with a header line.
void write_trace_csv(const CyclicRun& run, std::ostream& out);

}  // namespace vaxnet

#endif  // VAXNET_CYCLIC_HPP
