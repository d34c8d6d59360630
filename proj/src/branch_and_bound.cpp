#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "vaxnet/dense_simplex.hpp"
#include "vaxnet/solver.hpp"

namespace vaxnet::mip {

void check_config(const SolveConfig& cfg) {
  if (!(cfg.feasibility_tol > 0.0))
    throw std::invalid_argument("feasibility tolerance must be positive");
  if (!(cfg.integrality_tol > 0.0 && cfg.integrality_tol < 0.5))
    throw std::invalid_argument("integrality tolerance must be in (0, 0.5)");
  if (!(cfg.relative_gap > 0.0))
    throw std::invalid_argument("relative gap must be positive");
  if (cfg.node_limit && *cfg.node_limit <= 0)
    throw std::invalid_argument("node limit must be positive");
  if (cfg.time_limit_s && !(*cfg.time_limit_s > 0.0))
    throw std::invalid_argument("time limit must be positive");
  if (cfg.threads < 1) throw std::invalid_argument("thread count must be >= 1");
}

std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration-limit";
  }
  return "?";
}

std::string_view to_string(BnbStatus s) {
  switch (s) {
    case BnbStatus::optimal: return "optimal";
    case BnbStatus::infeasible: return "infeasible";
    case BnbStatus::unbounded: return "unbounded";
    case BnbStatus::node_limit: return "node-limit";
    case BnbStatus::time_limit: return "time-limit";
  }
  return "?";
}

namespace {

long iteration_budget(const DenseSimplex& lp) {
  return 50L * (lp.num_rows() + lp.num_structural()) + 10000;
}

// Solves the current LP, retrying once from a fresh factorization when the
// iteration budget runs out.
constexpr double kStrictPrimalTol = 1e-9;  // the ratio-test tolerance

LpStatus robust_solve(DenseSimplex& lp) {
  LpStatus status = lp.solve(iteration_budget(lp));
  if (status == LpStatus::iteration_limit) {
    lp.refactor();
    status = lp.solve(4 * iteration_budget(lp));
  }
  if (status == LpStatus::iteration_limit)
    throw std::runtime_error("simplex failed to converge");
  return status;
}

}  // namespace

LpResult solve_lp(const MipModel& model, const SolveConfig& cfg) {
  check_config(cfg);
  DenseSimplex lp(model);
  LpResult result;
  result.status = lp.solve(iteration_budget(lp));
  if (result.status == LpStatus::iteration_limit) {
    lp.refactor();
    result.status = lp.solve(4 * iteration_budget(lp));
  }
  result.iterations = lp.iterations();
  if (result.status == LpStatus::optimal) {
    result.x = lp.primal();
    result.objective = model.objective_value(result.x);
  }
  return result;
}

namespace {

struct Node {
  std::vector<std::pair<int, signed char>> fixings;  // binary var, value
  double bound = -kInfinity;
  long id = 0;
};

class BranchAndBound {
 public:
  BranchAndBound(const MipModel& model, const MipModel& relaxed, const SolveConfig& cfg)
      : model_(model), cfg_(cfg), lp_(relaxed), start_(Clock::now()) {
    for (int j = 0; j < model.num_variables(); ++j)
      if (model.variable(j).kind == VarKind::binary) {
        slot_of_[j] = static_cast<int>(binaries_.size());
        binaries_.push_back(j);
      }
    applied_.assign(binaries_.size(), -1);
    desired_.assign(binaries_.size(), -1);
  }

  BnbResult run();
  void offer(std::span<const double> x);

 private:
  using Clock = std::chrono::steady_clock;

  enum class Outcome { pruned, integral, branched };

  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }
  double prune_threshold() const {
    if (!has_incumbent()) return kInfinity;
    return result_.objective - cfg_.relative_gap * std::max(1.0, std::abs(result_.objective));
  }
  bool has_incumbent() const { return !result_.x.empty(); }

  void apply(const std::vector<std::pair<int, signed char>>& fixings);
  Outcome process(Node& node, Node& preferred, Node& other);
  bool consider_incumbent(std::vector<double> x);
  double open_bound() const;
  void record_trace();

  const MipModel& model_;
  const SolveConfig& cfg_;
  DenseSimplex lp_;
  Clock::time_point start_;
  std::vector<int> binaries_;
  std::unordered_map<int, int> slot_of_;
  std::vector<signed char> applied_, desired_;
  std::vector<Node> open_;
  BnbResult result_;
  long next_id_ = 0;
  bool unbounded_ = false;
  // Lowest bound among integral nodes whose point failed the row check.
  double lost_bound_ = kInfinity;
};

void BranchAndBound::apply(const std::vector<std::pair<int, signed char>>& fixings) {
  std::fill(desired_.begin(), desired_.end(), -1);
  for (auto [var, val] : fixings) desired_[slot_of_.at(var)] = val;
  for (std::size_t s = 0; s < binaries_.size(); ++s) {
    if (desired_[s] == applied_[s]) continue;
    const int j = binaries_[s];
    const Variable& v = model_.variable(j);
    if (desired_[s] < 0)
      lp_.set_bounds(j, v.lower, v.upper);
    else
      lp_.set_bounds(j, desired_[s], desired_[s]);
    applied_[s] = desired_[s];
  }
}

bool BranchAndBound::consider_incumbent(std::vector<double> x) {
  for (int j : binaries_) x[j] = std::round(x[j]);
  if (model_.max_violation(x) > cfg_.feasibility_tol) {
    // Rounding (or residue the LP tolerated in scaled units) disturbed the
    // rows; re-solve the continuous part with phase 1 repairing everything.
    std::vector<std::pair<int, signed char>> all;
    for (int j : binaries_) all.emplace_back(j, static_cast<signed char>(x[j]));
    apply(all);
    const double loose = lp_.primal_tolerance();
    lp_.set_primal_tolerance(kStrictPrimalTol);
    LpStatus status;
    try {
      status = robust_solve(lp_);
    } catch (...) {
      lp_.set_primal_tolerance(loose);
      throw;
    }
    lp_.set_primal_tolerance(loose);
    if (status != LpStatus::optimal) return false;
    x = lp_.primal();
    for (int j : binaries_) x[j] = std::round(x[j]);
    if (model_.max_violation(x) > cfg_.feasibility_tol) return false;
  }
  const double z = model_.objective_value(x);
  if (!has_incumbent() || z < result_.objective) {
    result_.objective = z;
    result_.x = std::move(x);
  }
  return true;
}

void BranchAndBound::offer(std::span<const double> x) {
  if (static_cast<int>(x.size()) != model_.num_variables()) return;
  if (model_.max_integrality_violation(x) > cfg_.integrality_tol) return;
  std::vector<double> v(x.begin(), x.end());
  for (int j : binaries_) v[j] = std::round(v[j]);
  if (model_.max_violation(v) > cfg_.feasibility_tol) return;
  const double z = model_.objective_value(v);
  if (!has_incumbent() || z < result_.objective) {
    result_.objective = z;
    result_.x = std::move(v);
  }
}

BranchAndBound::Outcome BranchAndBound::process(Node& node, Node& preferred,
                                                Node& other) {
  apply(node.fixings);
  const LpStatus status = robust_solve(lp_);
  ++result_.nodes;
  if (status == LpStatus::infeasible) {
    if (cfg_.record_trace) result_.node_lp_values.push_back(kInfinity);
    return Outcome::pruned;
  }
  if (status == LpStatus::unbounded) {
    unbounded_ = true;
    return Outcome::pruned;
  }
  std::vector<double> x = lp_.primal();
  const double lp_value = model_.objective_value(x);
  if (cfg_.record_trace) result_.node_lp_values.push_back(lp_value);
  node.bound = std::max(node.bound, lp_value);
  if (node.bound >= prune_threshold()) return Outcome::pruned;

  // Most fractional binary; ties go to the lowest index.
  int branch_var = -1;
  double best_score = kInfinity;
  int best_priority = 0;
  const bool prioritized = !cfg_.branch_priority.empty();
  for (int j : binaries_) {
    const double frac = x[j] - std::floor(x[j]);
    if (std::min(frac, 1.0 - frac) <= cfg_.integrality_tol) continue;
    const double score = std::abs(frac - 0.5);
    const int priority = prioritized ? cfg_.branch_priority[j] : 0;
    if (branch_var < 0 || priority > best_priority ||
        (priority == best_priority && score < best_score)) {
      best_score = score;
      best_priority = priority;
      branch_var = j;
    }
  }
  if (branch_var < 0) {
    if (!consider_incumbent(std::move(x))) lost_bound_ = std::min(lost_bound_, node.bound);
    return Outcome::integral;
  }

  const bool up_first = x[branch_var] >= 0.5;
  preferred.fixings = node.fixings;
  preferred.fixings.emplace_back(branch_var, up_first ? 1 : 0);
  preferred.bound = node.bound;
  preferred.id = next_id_++;
  other.fixings = std::move(node.fixings);
  other.fixings.emplace_back(branch_var, up_first ? 0 : 1);
  other.bound = node.bound;
  other.id = next_id_++;
  return Outcome::branched;
}

double BranchAndBound::open_bound() const {
  double b = kInfinity;
  for (const Node& n : open_) b = std::min(b, n.bound);
  return b;
}

void BranchAndBound::record_trace() {
  if (!cfg_.record_trace) return;
  double bound = std::min(open_bound(), result_.objective);
  if (!result_.trace.empty()) bound = std::max(bound, result_.trace.back().best_bound);
  result_.trace.push_back({result_.nodes, bound, result_.objective});
}

BnbResult BranchAndBound::run() {
  Node current;
  current.id = next_id_++;
  bool diving = true;
  BnbStatus stop = BnbStatus::optimal;

  while (true) {
    if (!diving) {
      // Select the next node: LIFO until an incumbent exists, then best bound.
      const double threshold = prune_threshold();
      std::erase_if(open_, [&](const Node& n) { return n.bound >= threshold; });
      if (open_.empty()) break;
      std::size_t pick = open_.size() - 1;
      if (has_incumbent()) {
        for (std::size_t k = 0; k < open_.size(); ++k)
          if (open_[k].bound < open_[pick].bound ||
              (open_[k].bound == open_[pick].bound && open_[k].id < open_[pick].id))
            pick = k;
      }
      current = std::move(open_[pick]);
      open_[pick] = std::move(open_.back());
      open_.pop_back();
      diving = true;
    }
    if (cfg_.node_limit && result_.nodes >= *cfg_.node_limit) {
      open_.push_back(std::move(current));
      stop = BnbStatus::node_limit;
      break;
    }
    if (cfg_.time_limit_s && elapsed() > *cfg_.time_limit_s) {
      open_.push_back(std::move(current));
      stop = BnbStatus::time_limit;
      break;
    }

    Node preferred, other;
    const Outcome outcome = process(current, preferred, other);
    if (unbounded_) break;
    if (outcome == Outcome::branched) {
      open_.push_back(std::move(other));
      current = std::move(preferred);
    } else {
      diving = false;
    }
    record_trace();
  }

  result_.lp_iterations = lp_.iterations();
  result_.wall_seconds = elapsed();
  if (unbounded_) {
    result_.status = BnbStatus::unbounded;
    result_.best_bound = -kInfinity;
    return result_;
  }
  if (stop != BnbStatus::optimal) {
    result_.status = stop;
    result_.best_bound = std::min(open_bound(), result_.objective);
    return result_;
  }
  if (lost_bound_ < prune_threshold())
    throw std::runtime_error("integral node rejected by the row check; optimality unproven");
  result_.status = has_incumbent() ? BnbStatus::optimal : BnbStatus::infeasible;
  result_.best_bound = has_incumbent() ? result_.objective : kInfinity;
  return result_;
}

}  // namespace

BnbResult solve_mip(const MipModel& model, const SolveConfig& cfg,
                    std::span<const double> start) {
  check_config(cfg);
  MipModel relaxed = model;
  for (const Constraint& cut : cfg.cuts) {
    for (const Term& t : cut.terms)
      if (t.var < 0 || t.var >= model.num_variables())
        throw std::invalid_argument("cut " + cut.name + " references an unknown variable");
    relaxed.add_constraint(cut.name, cut.terms, cut.sense, cut.rhs);
  }
  if (cfg.tighten) relaxed = tighten_coefficients(relaxed);
  if (cfg.separator) {
    int added = 0;
    for (int round = 0; round < cfg.separation_rounds; ++round) {
      const LpResult root = solve_lp(relaxed, cfg);
      if (root.status != LpStatus::optimal) break;
      std::vector<Constraint> found = cfg.separator(root.x);
      if (found.empty()) break;
      for (Constraint& cut : found)
        relaxed.add_constraint("_cut" + std::to_string(added++), std::move(cut.terms), cut.sense,
                               cut.rhs);
      if (cfg.tighten) relaxed = tighten_coefficients(relaxed);
    }
  }
  BranchAndBound bnb(model, relaxed, cfg);
  if (!start.empty()) bnb.offer(start);
  return bnb.run();
}

}  // namespace vaxnet::mip
