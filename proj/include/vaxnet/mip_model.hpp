#ifndef VAXNET_MIP_MODEL_HPP
#define VAXNET_MIP_MODEL_HPP

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vaxnet::mip {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind { binary, continuous };
enum class Sense { less_equal, equal, greater_equal };

struct Variable {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = kInfinity;
  double objective = 0.0;
  friend bool operator==(const Variable&, const Variable&) = default;
};

struct Term {
  int var = 0;
  double coef = 0.0;
  friend bool operator==(const Term&, const Term&) = default;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;  // sorted by variable, no duplicates, no zeros
  Sense sense = Sense::equal;
  double rhs = 0.0;
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

/// A minimization MIP over binary and continuous variables. Names are
/// mandatory and unique within variables and within constraints.
class MipModel {
 public:
  MipModel() = default;
  explicit MipModel(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  /// Binary variables always carry bounds [0, 1].
  int add_binary(std::string name, double objective = 0.0);
  int add_continuous(std::string name, double objective = 0.0,
                     double lower = 0.0, double upper = kInfinity);
  int add_variable(Variable v);

  /// Terms are sorted and merged; zero coefficients are dropped.
  int add_constraint(std::string name, std::vector<Term> terms, Sense sense,
                     double rhs);

  /// Removes every constraint for which `pred` holds, keeping order.
  template <typename Pred>
  void remove_constraints_if(Pred pred) {
    std::vector<Constraint> kept;
    kept.reserve(constraints_.size());
    for (auto& c : constraints_)
      if (!pred(c)) kept.push_back(std::move(c));
    constraints_ = std::move(kept);
    reindex_constraints();
  }

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  int num_binaries() const;

  const Variable& variable(int j) const { return variables_[j]; }
  const Constraint& constraint(int i) const { return constraints_[i]; }
  std::span<const Variable> variables() const { return variables_; }
  std::span<const Constraint> constraints() const { return constraints_; }

  std::optional<int> find_variable(std::string_view name) const;
  std::optional<int> find_constraint(std::string_view name) const;

  double objective_value(std::span<const double> x) const;
  double row_activity(int i, std::span<const double> x) const;
  /// Amount by which row i is violated at x (0 when satisfied).
  double row_violation(int i, std::span<const double> x) const;
  /// Largest bound or row violation at x.
  double max_violation(std::span<const double> x) const;
  /// Largest distance of a binary from {0, 1}.
  double max_integrality_violation(std::span<const double> x) const;

  friend bool operator==(const MipModel& a, const MipModel& b) {
    return a.name_ == b.name_ && a.variables_ == b.variables_ &&
           a.constraints_ == b.constraints_;
  }

 private:
  void reindex_constraints();

  std::string name_;
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::unordered_map<std::string, int> var_by_name_;
  std::unordered_map<std::string, int> row_by_name_;
};

std::string_view to_string(Sense s);

}  // namespace vaxnet::mip

#endif  // VAXNET_MIP_MODEL_HPP
