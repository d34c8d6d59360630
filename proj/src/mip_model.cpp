#include "vaxnet/mip_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vaxnet::mip {

int MipModel::add_binary(std::string name, double objective) {
  return add_variable({std::move(name), VarKind::binary, 0.0, 1.0, objective});
}

int MipModel::add_continuous(std::string name, double objective, double lower,
                             double upper) {
  return add_variable(
      {std::move(name), VarKind::continuous, lower, upper, objective});
}

int MipModel::add_variable(Variable v) {
  if (v.name.empty()) throw std::invalid_argument("variables must be named");
  if (v.kind == VarKind::binary) {
    v.lower = std::max(v.lower, 0.0);
    v.upper = std::min(v.upper, 1.0);
  }
  if (v.lower > v.upper)
    throw std::invalid_argument("variable " + v.name + " has lower > upper");
  const int id = num_variables();
  if (!var_by_name_.emplace(v.name, id).second)
    throw std::invalid_argument("duplicate variable name " + v.name);
  variables_.push_back(std::move(v));
  return id;
}

int MipModel::add_constraint(std::string name, std::vector<Term> terms,
                             Sense sense, double rhs) {
  if (name.empty()) throw std::invalid_argument("constraints must be named");
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const Term& t : terms) {
    if (t.var < 0 || t.var >= num_variables())
      throw std::invalid_argument("constraint " + name +
                                  " references an undeclared variable");
    if (!merged.empty() && merged.back().var == t.var)
      merged.back().coef += t.coef;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  const int id = num_constraints();
  if (!row_by_name_.emplace(name, id).second)
    throw std::invalid_argument("duplicate constraint name " + name);
  constraints_.push_back({std::move(name), std::move(merged), sense, rhs});
  return id;
}

int MipModel::num_binaries() const {
  return static_cast<int>(std::count_if(
      variables_.begin(), variables_.end(),
      [](const Variable& v) { return v.kind == VarKind::binary; }));
}

std::optional<int> MipModel::find_variable(std::string_view name) const {
  auto it = var_by_name_.find(std::string(name));
  if (it == var_by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> MipModel::find_constraint(std::string_view name) const {
  auto it = row_by_name_.find(std::string(name));
  if (it == row_by_name_.end()) return std::nullopt;
  return it->second;
}

void MipModel::reindex_constraints() {
  row_by_name_.clear();
  for (int i = 0; i < num_constraints(); ++i)
    row_by_name_.emplace(constraints_[i].name, i);
}

double MipModel::objective_value(std::span<const double> x) const {
  double z = 0.0;
  for (int j = 0; j < num_variables(); ++j) z += variables_[j].objective * x[j];
  return z;
}

double MipModel::row_activity(int i, std::span<const double> x) const {
  double r = 0.0;
  for (const Term& t : constraints_[i].terms) r += t.coef * x[t.var];
  return r;
}

double MipModel::row_violation(int i, std::span<const double> x) const {
  const double r = row_activity(i, x);
  const Constraint& c = constraints_[i];
  switch (c.sense) {
    case Sense::less_equal: return std::max(0.0, r - c.rhs);
    case Sense::greater_equal: return std::max(0.0, c.rhs - r);
    case Sense::equal: return std::abs(r - c.rhs);
  }
  return 0.0;
}

double MipModel::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (int j = 0; j < num_variables(); ++j) {
    worst = std::max(worst, variables_[j].lower - x[j]);
    worst = std::max(worst, x[j] - variables_[j].upper);
  }
  for (int i = 0; i < num_constraints(); ++i)
    worst = std::max(worst, row_violation(i, x));
  return worst;
}

double MipModel::max_integrality_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (int j = 0; j < num_variables(); ++j)
    if (variables_[j].kind == VarKind::binary)
      worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
  return worst;
}

std::string_view to_string(Sense s) {
  switch (s) {
    case Sense::less_equal: return "<=";
    case Sense::equal: return "=";
    case Sense::greater_equal: return ">=";
  }
  return "?";
}

}  // namespace vaxnet::mip
