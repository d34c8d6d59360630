#ifndef VAXNET_SOLVER_HPP
#define VAXNET_SOLVER_HPP

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vaxnet/mip_model.hpp"

namespace vaxnet::mip {

struct SolveConfig {
  double feasibility_tol = 1e-6;
  double integrality_tol = 1e-6;
  double relative_gap = 1e-9;
  /// Optional branching priority per variable (higher branches first);
  /// within a priority level the most fractional binary is chosen.
  std::vector<int> branch_priority;
  std::optional<long> node_limit;
  std::optional<double> time_limit_s;
  // Branch-and-bound runs one search on the calling thread; `threads` is
  // honoured by callers that run independent solves (multistart, bench).
  int threads = 1;
  bool deterministic = true;
  bool record_trace = false;
  /// Strengthen capacity coefficients from implied bounds before branching.
  /// The integer feasible set is unchanged; only the LP relaxation tightens.
  bool tighten = true;
  /// Extra rows for the LP relaxation only. They must hold at every
  /// integer-feasible point of the model; incumbents are still checked
  /// against the model rows alone.
  std::vector<Constraint> cuts;
  /// Called with root LP solutions; returns rows violated there that are
  /// valid in the same sense as `cuts` (names are assigned by the solver).
  /// The root is re-solved until no cut comes back or the rounds run out.
  std::function<std::vector<Constraint>(std::span<const double>)> separator;
  int separation_rounds = 30;
};

/// Throws std::invalid_argument on non-positive tolerances or limits.
void check_config(const SolveConfig& cfg);

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };
std::string_view to_string(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  std::vector<double> x;
  long iterations = 0;
};

/// LP relaxation of `model` (binaries relaxed to [0, 1]) by two-phase
/// primal simplex.
LpResult solve_lp(const MipModel& model, const SolveConfig& cfg = {});

enum class BnbStatus { optimal, infeasible, unbounded, node_limit, time_limit };
std::string_view to_string(BnbStatus s);

struct BnbTracePoint {
  long node = 0;
  double best_bound = 0.0;
  double incumbent = 0.0;  // +inf before the first incumbent
};

struct BnbResult {
  BnbStatus status = BnbStatus::infeasible;
  double objective = kInfinity;  // incumbent objective
  std::vector<double> x;         // incumbent, empty when none was found
  double best_bound = -kInfinity;
  long nodes = 0;
  long lp_iterations = 0;
  double wall_seconds = 0.0;
  /// LP value of each processed node, in processing order (trace only).
  std::vector<double> node_lp_values;
  std::vector<BnbTracePoint> trace;

  bool has_incumbent() const { return !x.empty(); }
};

/// Variable bounds implied by the rows, by repeated activity propagation.
struct ImpliedBounds {
  std::vector<double> lower;
  std::vector<double> upper;
  bool infeasible = false;
};
ImpliedBounds propagate_bounds(const MipModel& model, int max_rounds = 20);

/// Copy of `model` in which every binary coefficient of a one-sided row is
/// reduced to the largest value that can matter given the implied bounds of
/// the other variables. For a row sum(a_k y_k) - x >= 0 with x <= U this
/// turns a_k into min(a_k, U). Integer solutions are unaffected.
MipModel tighten_coefficients(const MipModel& model, int* changed = nullptr);

/// Exact branch-and-bound over the binary variables of `model`.
/// `start`, when non-empty, is a candidate solution; it becomes the first
/// incumbent if it is integral and feasible, and is ignored otherwise.
BnbResult solve_mip(const MipModel& model, const SolveConfig& cfg = {},
                    std::span<const double> start = {});

}  // namespace vaxnet::mip

#endif  // VAXNET_SOLVER_HPP
