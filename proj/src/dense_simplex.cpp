#include "vaxnet/dense_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vaxnet::mip {

namespace {

double power_of_two(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return 1.0;
  return std::exp2(std::round(std::log2(v)));
}

}  // namespace

DenseSimplex::DenseSimplex(const MipModel& model)
    : m_(model.num_constraints()),
      n_(model.num_variables()),
      cols_(model.num_constraints() + model.num_variables()) {
  // Geometric-mean scaling, rows first, then columns.
  row_scale_.assign(m_, 1.0);
  col_scale_.assign(n_, 1.0);
  for (int i = 0; i < m_; ++i) {
    double lo = kInfinity, hi = 0.0;
    for (const Term& t : model.constraint(i).terms) {
      lo = std::min(lo, std::abs(t.coef));
      hi = std::max(hi, std::abs(t.coef));
    }
    if (hi > 0.0) row_scale_[i] = 1.0 / power_of_two(std::sqrt(lo * hi));
  }
  {
    std::vector<double> lo(n_, kInfinity), hi(n_, 0.0);
    for (int i = 0; i < m_; ++i)
      for (const Term& t : model.constraint(i).terms) {
        const double a = std::abs(t.coef) * row_scale_[i];
        lo[t.var] = std::min(lo[t.var], a);
        hi[t.var] = std::max(hi[t.var], a);
      }
    for (int j = 0; j < n_; ++j)
      if (hi[j] > 0.0) col_scale_[j] = 1.0 / power_of_two(std::sqrt(lo[j] * hi[j]));
  }

  columns_.assign(n_, {});
  b_.assign(m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    const Constraint& c = model.constraint(i);
    b_[i] = c.rhs * row_scale_[i];
    for (const Term& t : c.terms)
      columns_[t.var].push_back({i, t.coef * row_scale_[i] * col_scale_[t.var]});
  }

  lo_.assign(cols_, 0.0);
  up_.assign(cols_, 0.0);
  cost_.assign(cols_, 0.0);
  value_.assign(cols_, 0.0);
  for (int j = 0; j < n_; ++j) {
    const Variable& v = model.variable(j);
    lo_[j] = v.lower / col_scale_[j];
    up_[j] = v.upper / col_scale_[j];
    cost_[j] = v.objective * col_scale_[j];
    value_[j] = std::isfinite(lo_[j]) ? lo_[j] : (std::isfinite(up_[j]) ? up_[j] : 0.0);
  }
  for (int i = 0; i < m_; ++i) {
    const int s = n_ + i;
    switch (model.constraint(i).sense) {
      case Sense::less_equal: lo_[s] = 0.0; up_[s] = kInfinity; break;
      case Sense::greater_equal: lo_[s] = -kInfinity; up_[s] = 0.0; break;
      case Sense::equal: lo_[s] = 0.0; up_[s] = 0.0; break;
    }
  }

  tableau_.assign(static_cast<std::size_t>(m_) * cols_, 0.0);
  basis_.resize(m_);
  for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
  position_.assign(cols_, -1);
  refactor();
  refactorizations_ = 0;
}

void DenseSimplex::set_bounds(int j, double lower, double upper) {
  const double lo = lower / col_scale_[j];
  const double up = upper / col_scale_[j];
  if (!is_basic(j)) {
    const bool at_upper = value_[j] == up_[j] && value_[j] != lo_[j];
    double v;
    if (at_upper && std::isfinite(up))
      v = up;
    else if (std::isfinite(lo))
      v = lo;
    else if (std::isfinite(up))
      v = up;
    else
      v = 0.0;
    if (v != value_[j]) values_stale_ = true;
    value_[j] = v;
  }
  lo_[j] = lo;
  up_[j] = up;
}

double DenseSimplex::objective() const {
  double z = 0.0;
  for (int j = 0; j < n_; ++j) z += cost_[j] * value_[j];
  return z;
}

std::vector<double> DenseSimplex::primal() const {
  std::vector<double> x(n_);
  for (int j = 0; j < n_; ++j) x[j] = value_[j] * col_scale_[j];
  return x;
}

void DenseSimplex::recompute_basic_values() {
  std::vector<int> active;
  for (int j = 0; j < cols_; ++j)
    if (!is_basic(j) && value_[j] != 0.0) active.push_back(j);
  for (int i = 0; i < m_; ++i) {
    const double* ri = row(i);
    double v = rhs_[i];
    for (int j : active) v -= ri[j] * value_[j];
    value_[basis_[i]] = v;
  }
  values_stale_ = false;
}

void DenseSimplex::recompute_reduced_costs() {
  reduced_.assign(cost_.begin(), cost_.end());
  for (int i = 0; i < m_; ++i) {
    const double cb = cost_[basis_[i]];
    if (cb == 0.0) continue;
    const double* ri = row(i);
    for (int j = 0; j < cols_; ++j) reduced_[j] -= cb * ri[j];
  }
  for (int i = 0; i < m_; ++i) reduced_[basis_[i]] = 0.0;
}

double DenseSimplex::max_basic_infeasibility() const {
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) {
    const int b = basis_[i];
    worst = std::max({worst, lo_[b] - value_[b], value_[b] - up_[b]});
  }
  return worst;
}

double DenseSimplex::max_row_residual() const {
  std::vector<double> activity(m_, 0.0);
  for (int j = 0; j < n_; ++j) {
    if (value_[j] == 0.0) continue;
    for (const Term& t : columns_[j]) activity[t.var] += t.coef * value_[j];
  }
  double worst = 0.0;
  for (int i = 0; i < m_; ++i)
    worst = std::max(worst, std::abs(activity[i] + value_[n_ + i] - b_[i]));
  return worst;
}

void DenseSimplex::refactor() {
  ++refactorizations_;
  const std::vector<int> wanted = basis_;
  std::vector<char> in_wanted(cols_, 0);
  bool have_basis = false;
  for (int q : wanted) {
    in_wanted[q] = 1;
    have_basis = have_basis || q < n_;
  }

  std::fill(tableau_.begin(), tableau_.end(), 0.0);
  for (int j = 0; j < n_; ++j)
    for (const Term& t : columns_[j]) at(t.var, j) = t.coef;
  for (int i = 0; i < m_; ++i) at(i, n_ + i) = 1.0;
  rhs_ = b_;
  std::fill(position_.begin(), position_.end(), -1);
  for (int i = 0; i < m_; ++i) {
    basis_[i] = n_ + i;
    position_[n_ + i] = i;
  }
  reduced_.assign(cost_.begin(), cost_.end());

  if (have_basis) {
    for (int q : wanted) {
      if (q < 0 || q >= n_) continue;  // logicals stay in their own rows
      int best = -1;
      double best_abs = 1e-9;
      for (int i = 0; i < m_; ++i) {
        const int b = basis_[i];
        if (b < n_ || in_wanted[b]) continue;  // keep wanted logicals
        const double a = std::abs(at(i, q));
        if (a > best_abs) {
          best_abs = a;
          best = i;
        }
      }
      if (best < 0) {
        // Singular: leave q nonbasic at a bound.
        value_[q] = std::isfinite(lo_[q]) ? lo_[q] : (std::isfinite(up_[q]) ? up_[q] : 0.0);
        continue;
      }
      pivot(best, q);
    }
  }
  // Nonbasic columns must sit at a bound.
  for (int j = 0; j < cols_; ++j) {
    if (is_basic(j)) continue;
    if (value_[j] != lo_[j] && value_[j] != up_[j]) {
      if (std::isfinite(lo_[j]) && std::isfinite(up_[j]))
        value_[j] = std::abs(value_[j] - lo_[j]) <= std::abs(value_[j] - up_[j]) ? lo_[j] : up_[j];
      else if (std::isfinite(lo_[j]))
        value_[j] = lo_[j];
      else if (std::isfinite(up_[j]))
        value_[j] = up_[j];
      else
        value_[j] = 0.0;
    }
  }
  recompute_basic_values();
  recompute_reduced_costs();
}

void DenseSimplex::pivot(int r, int q) {
  double* pr = row(r);
  const double inv = 1.0 / pr[q];
  nonzeros_.clear();
  for (int j = 0; j < cols_; ++j) {
    if (pr[j] != 0.0) {
      pr[j] *= inv;
      nonzeros_.push_back(j);
    }
  }
  pr[q] = 1.0;
  rhs_[r] *= inv;
  const bool sparse = nonzeros_.size() * 3 < static_cast<std::size_t>(cols_);

  for (int i = 0; i < m_; ++i) {
    if (i == r) continue;
    double* ri = row(i);
    const double f = ri[q];
    if (f == 0.0) continue;
    if (sparse) {
      for (int j : nonzeros_) ri[j] -= f * pr[j];
    } else {
      for (int j = 0; j < cols_; ++j) ri[j] -= f * pr[j];
    }
    ri[q] = 0.0;
    rhs_[i] -= f * rhs_[r];
  }
  const double fd = reduced_.empty() ? 0.0 : reduced_[q];
  if (fd != 0.0) {
    for (int j : nonzeros_) reduced_[j] -= fd * pr[j];
    reduced_[q] = 0.0;
  }
  const int leaving = basis_[r];
  position_[leaving] = -1;
  basis_[r] = q;
  position_[q] = r;
}

DenseSimplex::Entering DenseSimplex::price_phase_one(
    const std::vector<double>& grad) const {
  Entering best;
  double best_score = 0.0;
  for (int j = 0; j < cols_; ++j) {
    if (is_basic(j) || lo_[j] == up_[j]) continue;
    const double g = grad[j];
    int dir = 0;
    if (g < -opt_tol_ && value_[j] < up_[j]) dir = 1;
    else if (g > opt_tol_ && value_[j] > lo_[j]) dir = -1;
    if (dir == 0) continue;
    if (bland_) return {j, dir, std::abs(g)};
    if (std::abs(g) > best_score) {
      best_score = std::abs(g);
      best = {j, dir, best_score};
    }
  }
  return best;
}

DenseSimplex::Entering DenseSimplex::price_phase_two() const {
  Entering best;
  double best_score = 0.0;
  for (int j = 0; j < cols_; ++j) {
    if (is_basic(j) || lo_[j] == up_[j]) continue;
    const double d = reduced_[j];
    int dir = 0;
    if (d < -opt_tol_ && value_[j] < up_[j]) dir = 1;
    else if (d > opt_tol_ && value_[j] > lo_[j]) dir = -1;
    if (dir == 0) continue;
    if (bland_ || stalled_) return {j, dir, std::abs(d)};
    if (std::abs(d) > best_score) {
      best_score = std::abs(d);
      best = {j, dir, best_score};
    }
  }
  return best;
}

DenseSimplex::Leaving DenseSimplex::ratio_test(const Entering& e,
                                               Phase phase) const {
  const int q = e.col;
  struct Candidate {
    int row;
    double dist;
    double alpha;
    double target;
  };
  std::vector<Candidate> cands;
  for (int i = 0; i < m_; ++i) {
    const double alpha = row(i)[q] * e.dir;
    if (std::abs(alpha) <= pivot_tol_) continue;
    const int b = basis_[i];
    const double x = value_[b];
    const bool below = phase == Phase::one && infeasible_low(b);
    const bool above = phase == Phase::one && infeasible_high(b);
    if (alpha > 0.0) {  // basic variable decreases
      if (above) {
        cands.push_back({i, x - up_[b], alpha, up_[b]});
      } else if (!below && std::isfinite(lo_[b])) {
        cands.push_back({i, std::max(0.0, x - lo_[b]), alpha, lo_[b]});
      }
    } else {  // basic variable increases
      if (below) {
        cands.push_back({i, lo_[b] - x, -alpha, lo_[b]});
      } else if (!above && std::isfinite(up_[b])) {
        cands.push_back({i, std::max(0.0, up_[b] - x), -alpha, up_[b]});
      }
    }
  }

  const double range = up_[q] - lo_[q];
  Leaving out;
  if (cands.empty()) {
    if (std::isfinite(range)) {
      out.row = -1;
      out.step = range;
    } else {
      out.unbounded = true;
    }
    return out;
  }

  int chosen = -1;
  if (bland_) {
    double best_ratio = kInfinity;
    for (int k = 0; k < static_cast<int>(cands.size()); ++k) {
      const double ratio = cands[k].dist / cands[k].alpha;
      if (ratio < best_ratio ||
          (ratio == best_ratio && basis_[cands[k].row] < basis_[cands[chosen].row])) {
        best_ratio = ratio;
        chosen = k;
      }
    }
  } else {
    // Harris: widest step allowed with relaxed bounds, then the largest pivot
    // among rows that block within it.
    double relaxed = kInfinity;
    for (const auto& c : cands)
      relaxed = std::min(relaxed, (c.dist + feas_tol_) / c.alpha);
    double best_alpha = 0.0;
    for (int k = 0; k < static_cast<int>(cands.size()); ++k) {
      const auto& c = cands[k];
      if (c.dist / c.alpha <= relaxed && c.alpha > best_alpha) {
        best_alpha = c.alpha;
        chosen = k;
      }
    }
  }
  const double step = cands[chosen].dist / cands[chosen].alpha;
  if (std::isfinite(range) && range <= step) {
    out.row = -1;
    out.step = range;
    return out;
  }
  out.row = cands[chosen].row;
  out.step = step;
  out.target = cands[chosen].target;
  return out;
}

void DenseSimplex::move(const Entering& e, const Leaving& l) {
  const int q = e.col;
  const double theta = l.step;
  if (theta > 0.0) {
    value_[q] += e.dir * theta;
    for (int i = 0; i < m_; ++i) {
      const double a = row(i)[q];
      if (a != 0.0) value_[basis_[i]] -= a * e.dir * theta;
    }
  }
  // Progress is judged by the objective, not the step: tiny positive steps
  // that leave the objective flat can cycle as well as zero steps.
  if (e.rate * theta > 1e-9) {
    degenerate_run_ = 0;
    bland_ = false;
  } else if (++degenerate_run_ > 5L * (m_ + n_)) {
    bland_ = true;
  }
  if (l.row < 0) {
    value_[q] = e.dir > 0 ? up_[q] : lo_[q];
  } else {
    value_[basis_[l.row]] = l.target;
    pivot(l.row, q);
  }
  ++iterations_;
}

LpStatus DenseSimplex::solve(long max_iterations) {
  if (values_stale_) recompute_basic_values();
  const long start = iterations_;
  bland_ = false;
  stalled_ = false;
  degenerate_run_ = 0;
  bool verified = false;
  bool refreshed = false;
  std::vector<double> grad;
  // Phase-2 stall watch on the objective itself; stale reduced costs can
  // report progress on every pivot while the objective only wanders.
  double stall_best = kInfinity;
  long stall_run = 0;

  while (true) {
    if (iterations_ - start > max_iterations) return LpStatus::iteration_limit;
    const long since = iterations_ - start;
    if (since > 0 && since % 64 == 0) {
      if (since % 512 == 0 && max_row_residual() > 1e-7) {
        refactor();
      } else {
        recompute_basic_values();
        if (since % 256 == 0) recompute_reduced_costs();
      }
    }

    // Phase 1 while any basic variable is out of bounds.
    bool infeasible = false;
    for (int i = 0; i < m_ && !infeasible; ++i) {
      const int b = basis_[i];
      infeasible = infeasible_low(b) || infeasible_high(b);
    }
    if (infeasible) {
      verified = false;
      grad.assign(cols_, 0.0);
      for (int i = 0; i < m_; ++i) {
        const int b = basis_[i];
        double sign = 0.0;
        if (infeasible_low(b)) sign = 1.0;
        else if (infeasible_high(b)) sign = -1.0;
        if (sign == 0.0) continue;
        const double* ri = row(i);
        for (int j = 0; j < cols_; ++j) grad[j] += sign * ri[j];
      }
      const Entering e = price_phase_one(grad);
      if (e.col < 0) {
        if (!refreshed) {
          refactor();
          refreshed = true;
          continue;
        }
        return LpStatus::infeasible;
      }
      const Leaving l = ratio_test(e, Phase::one);
      if (l.unbounded) {
        // Cannot happen in exact arithmetic: an improving phase-1 direction
        // is always blocked by the row it repairs.
        refactor();
        continue;
      }
      move(e, l);
      continue;
    }

    const double z = objective();
    if (z < stall_best - 1e-9 * std::max(1.0, std::abs(stall_best))) {
      stall_best = z;
      stall_run = 0;
      stalled_ = false;
    } else if (++stall_run > 5L * (m_ + n_)) {
      refactor();
      stalled_ = true;
      stall_run = 0;
    }

    const Entering e = price_phase_two();
    if (e.col < 0) {
      if (!verified) {
        if (max_row_residual() > 1e-7) refactor();
        else {
          recompute_basic_values();
          recompute_reduced_costs();
        }
        verified = true;
        continue;
      }
      return LpStatus::optimal;
    }
    verified = false;
    const Leaving l = ratio_test(e, Phase::two);
    if (l.unbounded) return LpStatus::unbounded;
    move(e, l);
  }
}

}  // namespace vaxnet::mip
