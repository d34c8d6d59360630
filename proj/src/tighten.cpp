#include <algorithm>
#include <cmath>

#include "vaxnet/solver.hpp"

namespace vaxnet::mip {

namespace {

// Activity range of a row with infinite contributions counted separately.
struct Activity {
  double min = 0.0, max = 0.0;
  int min_inf = 0, max_inf = 0;
};

Activity activity(const Constraint& row, const std::vector<double>& lo,
                  const std::vector<double>& up) {
  Activity a;
  for (const Term& t : row.terms) {
    const double l = t.coef > 0 ? lo[t.var] : up[t.var];
    const double u = t.coef > 0 ? up[t.var] : lo[t.var];
    if (std::isinf(l)) ++a.min_inf; else a.min += t.coef * l;
    if (std::isinf(u)) ++a.max_inf; else a.max += t.coef * u;
  }
  return a;
}

bool improves(double candidate, double current, bool upper) {
  const double slack = 1e-9 * std::max(1.0, std::abs(candidate));
  return upper ? candidate < current - slack : candidate > current + slack;
}

}  // namespace

ImpliedBounds propagate_bounds(const MipModel& model, int max_rounds) {
  ImpliedBounds b;
  for (const Variable& v : model.variables()) {
    b.lower.push_back(v.lower);
    b.upper.push_back(v.upper);
  }
  for (int round = 0; round < max_rounds; ++round) {
    bool changed = false;
    for (const Constraint& row : model.constraints()) {
      const Activity act = activity(row, b.lower, b.upper);
      const bool has_upper = row.sense != Sense::greater_equal;
      const bool has_lower = row.sense != Sense::less_equal;
      for (const Term& t : row.terms) {
        const int j = t.var;
        // Activity of the other terms: drop this term's own contribution.
        const double own_min = t.coef > 0 ? b.lower[j] : b.upper[j];
        const double own_max = t.coef > 0 ? b.upper[j] : b.lower[j];
        if (has_upper) {
          const int inf = act.min_inf - (std::isinf(own_min) ? 1 : 0);
          if (inf == 0) {
            const double rest = act.min - (std::isinf(own_min) ? 0.0 : t.coef * own_min);
            const double bound = (row.rhs - rest) / t.coef;
            if (t.coef > 0 && improves(bound, b.upper[j], true)) {
              b.upper[j] = bound;
              changed = true;
            } else if (t.coef < 0 && improves(bound, b.lower[j], false)) {
              b.lower[j] = bound;
              changed = true;
            }
          }
        }
        if (has_lower) {
          const int inf = act.max_inf - (std::isinf(own_max) ? 1 : 0);
          if (inf == 0) {
            const double rest = act.max - (std::isinf(own_max) ? 0.0 : t.coef * own_max);
            const double bound = (row.rhs - rest) / t.coef;
            if (t.coef > 0 && improves(bound, b.lower[j], false)) {
              b.lower[j] = bound;
              changed = true;
            } else if (t.coef < 0 && improves(bound, b.upper[j], true)) {
              b.upper[j] = bound;
              changed = true;
            }
          }
        }
      }
    }
    for (int j = 0; j < model.num_variables(); ++j) {
      if (model.variable(j).kind == VarKind::binary) {
        b.lower[j] = std::max(0.0, std::ceil(b.lower[j] - 1e-9));
        b.upper[j] = std::min(1.0, std::floor(b.upper[j] + 1e-9));
      }
      if (b.lower[j] > b.upper[j] + 1e-9) {
        b.infeasible = true;
        return b;
      }
    }
    if (!changed) break;
  }
  return b;
}

MipModel tighten_coefficients(const MipModel& model, int* changed) {
  const ImpliedBounds b = propagate_bounds(model);
  int count = 0;
  MipModel out(model.name());
  for (const Variable& v : model.variables()) out.add_variable(v);
  for (const Constraint& row : model.constraints()) {
    std::vector<Term> terms = row.terms;
    if (!b.infeasible && row.sense != Sense::equal) {
      // Work on the >= form: sum(s * a_k x_k) >= s * rhs.
      const double s = row.sense == Sense::greater_equal ? 1.0 : -1.0;
      double minact = 0.0;
      bool finite = true;
      for (const Term& t : terms) {
        const double c = s * t.coef;
        const double v = c > 0 ? b.lower[t.var] : b.upper[t.var];
        if (std::isinf(v)) finite = false; else minact += c * v;
      }
      const double need = s * row.rhs - minact;
      if (finite && need > 0.0) {
        // Loosen by a hair so rounding in the bounds never cuts off a point.
        const double cap = need * (1.0 + 1e-9) + 1e-9;
        for (Term& t : terms) {
          const double c = s * t.coef;
          if (model.variable(t.var).kind != VarKind::binary || c <= cap) continue;
          if (b.lower[t.var] != 0.0) continue;
          t.coef = s * cap;
          ++count;
        }
      }
    }
    out.add_constraint(row.name, std::move(terms), row.sense, row.rhs);
  }
  if (changed) *changed = count;
  return out;
}

}  // namespace vaxnet::mip
