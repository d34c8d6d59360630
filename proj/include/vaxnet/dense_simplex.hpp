#ifndef VAXNET_DENSE_SIMPLEX_HPP
#define VAXNET_DENSE_SIMPLEX_HPP

#include <vector>

#include "vaxnet/mip_model.hpp"
#include "vaxnet/solver.hpp"

namespace vaxnet::mip {

/// Bounded-variable primal simplex on a dense tableau.
///
/// Every row i gets a logical variable s_i with a_i x + s_i = b_i, so the
/// all-logical basis is always available and rows of any sense become bounds
/// on s_i. Phase 1 minimizes the sum of bound violations of the basic
/// variables (the logicals of equality rows act as artificials, with bounds
/// [0, 0]); phase 2 minimizes the objective with Dantzig pricing and a Harris
/// ratio test, falling back to Bland's rule after a long run of degenerate
/// pivots.
///
/// The tableau survives bound changes, so a sequence of related LPs (the
/// nodes of a branch-and-bound tree) is solved from the previous basis.
/// Rows and columns are scaled internally by powers of two; the public
/// interface speaks in model units.
class DenseSimplex {
 public:
  explicit DenseSimplex(const MipModel& model);

  int num_rows() const { return m_; }
  int num_structural() const { return n_; }

  double lower(int j) const { return lo_[j] * col_scale_[j]; }
  double upper(int j) const { return up_[j] * col_scale_[j]; }
  void set_bounds(int j, double lower, double upper);

  LpStatus solve(long max_iterations);

  /// Threshold (scaled units) above which phase 1 repairs a bound violation.
  double primal_tolerance() const { return primal_tol_; }
  void set_primal_tolerance(double tol) { primal_tol_ = tol; }

  /// Objective and primal values of the last solve, in model units.
  double objective() const;
  std::vector<double> primal() const;

  long iterations() const { return iterations_; }
  long refactorizations() const { return refactorizations_; }

  /// Rebuilds the tableau from the original rows for the current basis.
  void refactor();

 private:
  enum class Phase { one, two };
  struct Entering {
    int col = -1;
    int dir = 0;        // +1 increase, -1 decrease
    double rate = 0.0;  // objective decrease per unit step
  };
  struct Leaving {
    int row = -1;       // -1: bound flip of the entering variable
    double step = 0.0;
    double target = 0.0;  // bound the leaving variable settles at
    bool unbounded = false;
  };

  double* row(int i) { return tableau_.data() + static_cast<std::size_t>(i) * cols_; }
  const double* row(int i) const {
    return tableau_.data() + static_cast<std::size_t>(i) * cols_;
  }
  double& at(int i, int j) { return tableau_[static_cast<std::size_t>(i) * cols_ + j]; }

  bool is_basic(int j) const { return position_[j] >= 0; }
  // Phase 1 only repairs violations beyond primal_tol_; the Harris ratio
  // test may leave smaller ones (up to feas_tol_ plus rounding) behind.
  bool infeasible_low(int j) const { return value_[j] < lo_[j] - primal_tol_; }
  bool infeasible_high(int j) const { return value_[j] > up_[j] + primal_tol_; }

  void recompute_basic_values();
  void recompute_reduced_costs();
  double max_basic_infeasibility() const;
  double max_row_residual() const;

  Entering price_phase_one(const std::vector<double>& grad) const;
  Entering price_phase_two() const;
  Leaving ratio_test(const Entering& e, Phase phase) const;
  void pivot(int r, int q);
  void move(const Entering& e, const Leaving& l);

  int m_ = 0;      // rows
  int n_ = 0;      // structural columns
  int cols_ = 0;   // structural + logical
  std::vector<double> tableau_;  // m_ x cols_, row major
  std::vector<double> rhs_;      // B^-1 b
  std::vector<int> basis_;       // column basic in each row
  std::vector<int> position_;    // row of a basic column, -1 otherwise
  std::vector<double> lo_, up_, value_, cost_, reduced_;

  // Scaled copy of the constraint matrix by column, for refactorization and
  // residual checks.
  std::vector<std::vector<Term>> columns_;
  std::vector<double> b_;
  std::vector<double> row_scale_, col_scale_;

  double feas_tol_ = 1e-9;
  double primal_tol_ = 1e-7;
  double opt_tol_ = 1e-9;
  double pivot_tol_ = 1e-9;
  long iterations_ = 0;
  long refactorizations_ = 0;
  long degenerate_run_ = 0;
  bool bland_ = false;
  bool stalled_ = false;  // objective flat for a long run; Bland until it moves
  bool values_stale_ = true;
  std::vector<int> nonzeros_;  // scratch for sparse row updates
};

}  // namespace vaxnet::mip

#endif  // VAXNET_DENSE_SIMPLEX_HPP
