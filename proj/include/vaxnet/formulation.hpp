#ifndef VAXNET_FORMULATION_HPP
#define VAXNET_FORMULATION_HPP

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vaxnet/instance.hpp"
#include "vaxnet/mip_model.hpp"
#include "vaxnet/network_solution.hpp"

namespace vaxnet {

/// What a model variable stands for.
struct VarRef {
  enum class Kind { flow, route, storage };
  Kind kind = Kind::flow;
  int arc = -1;     // flow, route
  int mode = -1;    // route
  Frequency frequency = Frequency::monthly;  // route, storage
  int hub = -1;     // storage
  int device = -1;  // storage
};

/// Two-way map between the design decisions and model variable ids.
///
/// Routes into clinics exist only for the monthly frequency; routes into hubs
/// exist for both. Storage choices exist for every hub, device and frequency.
class VarIndex {
 public:
  int flow(int arc) const { return flow_[arc]; }
  /// Route variable for [arc, mode, frequency], if the model has one.
  std::optional<int> route(int arc, int mode, Frequency f) const;
  int storage(int hub, int device, Frequency f) const {
    return storage_[(hub * num_devices_ + device) * 2 + frequency_slot(f)];
  }
  const VarRef& ref(int var) const { return refs_[var]; }

  int num_binaries() const { return num_binaries_; }
  int num_continuous() const { return static_cast<int>(flow_.size()); }
  const std::string& hub_id(int hub) const { return hub_ids_[hub]; }
  int num_hubs() const { return static_cast<int>(hub_ids_.size()); }
  int num_devices() const { return num_devices_; }

  /// Closed-form counts: binaries = |H||D|2 + (hub-inbound arcs)|M|2 +
  /// (clinic-inbound arcs)|M|, continuous = |A|.
  static int expected_binaries(const Instance& inst);
  static int expected_continuous(const Instance& inst) { return inst.num_arcs(); }

 private:
  friend struct Program1Builder;
  std::vector<int> flow_;
  std::vector<int> route_;  // [arc][mode][slot], -1 where absent
  std::vector<int> storage_;
  std::vector<VarRef> refs_;
  std::vector<std::string> hub_ids_;
  int num_modes_ = 0;
  int num_devices_ = 0;
  int num_binaries_ = 0;
};

struct Program1 {
  mip::MipModel model;
  VarIndex index;
};

/// Builds the network design MIP. Constraint families, with row names:
///   C2_j   each clinic has exactly one (source, mode) supplier
///   C3_j   each hub has at most one (source, mode, frequency) supplier
///   C4_i   each hub uses at most one (device, frequency)
///   C5_j_f storage at frequency f matches inbound routes at frequency f
///   C6_j   clinic inflow equals its annual demand
///   C7_j   hub flow balance
///   C8_i_j arc flow within the chosen vehicle capacity times trips
///   C9_j   buffered hub inflow within device capacity times trips
/// Throws InstanceError for invalid instances.
Program1 build_program1(const Instance& inst);

/// Number of rows per family C2..C9 implied by the instance.
std::vector<int> expected_family_counts(const Instance& inst);
/// Number of rows per family C2..C9 present in `model`.
std::vector<int> family_counts(const mip::MipModel& model);

/// Frequency-vector entries: 0 closed, 1 monthly only, 2 quarterly only.
enum class ClosedHubRule {
  force_closed,  // entry 0 adds sum_d sum_f Z = 0
  free,          // entry 0 adds nothing
};

/// Copy of `model` with one RF_<hub> row per constrained hub.
/// Throws std::invalid_argument for entries outside {0, 1, 2} or a vector of
/// the wrong length.
mip::MipModel restrict_frequencies(const mip::MipModel& model, const VarIndex& idx,
                                   std::span<const int> frequencies,
                                   ClosedHubRule rule = ClosedHubRule::force_closed);

/// Copy of `model` with one RL_<hub> row per hub: sum_d sum_f Z = l_i.
mip::MipModel restrict_locations(const mip::MipModel& model, const VarIndex& idx,
                                 std::span<const int> locations);

/// Copy of `model` without the RF_/RL_ rows.
mip::MipModel remove_restrictions(const mip::MipModel& model);
bool is_restriction(const mip::Constraint& row);

/// A row of Program 1 violated by a solution vector.
struct ConstraintViolation {
  std::string family;   // "C2".."C9", or "integrality"/"bounds"
  std::string row;      // row or variable name
  double residual = 0.0;
};

class InfeasibleSolution : public std::runtime_error {
 public:
  explicit InfeasibleSolution(std::vector<ConstraintViolation> violations);
  const std::vector<ConstraintViolation>& violations() const { return violations_; }

 private:
  std::vector<ConstraintViolation> violations_;
};

/// Rounds binaries, checks every row of Program 1 to `tolerance` (absolute)
/// and extracts the network design with its recomputed cost. Throws
/// InfeasibleSolution listing every violated row, std::invalid_argument on a
/// length mismatch.
NetworkSolution decode_solution(const Instance& inst, const VarIndex& idx,
                                std::span<const double> x, double tolerance = 1e-6);

/// Inverse of decode_solution: the model vector for a network design.
std::vector<double> encode_solution(const Instance& inst, const VarIndex& idx,
                                    const NetworkSolution& sol);

/// Branching priorities for Program 1: storage choices first, then hub
/// supply routes, then clinic routes.
std::vector<int> branching_priorities(const Instance& inst, const VarIndex& idx);

/// Valid inequalities for the LP relaxation, holding at every feasible
/// point (restricted or not):
///   K_h_c   a clinic with positive demand served from hub h forces h open,
///           sum_m Y_{h,c,m,1} <= sum_{d,f} Z_{h,d,f};
///   KF_h_f  the inflow of h fits the storage at frequency f plus the
///           inbound vehicles at the other frequency.
std::vector<mip::Constraint> linking_cuts(const Instance& inst, const VarIndex& idx);

/// Rows that only remove dominated designs of the unrestricted model:
///   KT_h_g  hub g may be supplied by h only if h is open;
///   KC_h_g  h and g do not supply each other.
/// A hub behind a closed supplier or on a supply cycle carries no flow, so
/// closing it and everything it supplies costs nothing extra. Not valid
/// once restrictions force hubs open.
std::vector<mip::Constraint> supply_tree_cuts(const Instance& inst, const VarIndex& idx);

/// Root separator for the capacity rows of each hub. For a set S of
/// clinics hanging off hub h with total demand a(S), storage and vehicles
/// must cover the demand of the clinics in S that h actually serves:
///   sum_{d,f} min(S_d n_f, b a(S)) Z_{h,d,f} >= b sum_{c in S} a_c Y_{h,c}
///   sum_{i,m,f} min(V_m n_f, a(S)) Y_{i,h,m,f} >= sum_{c in S} a_c Y_{h,c}
/// with b the buffer factor. S is grown greedily from the LP values.
std::function<std::vector<mip::Constraint>(std::span<const double>)> capacity_separator(
    const Instance& inst, const VarIndex& idx);

/// Every hub closed and every clinic served straight from the store by the
/// cheapest mode that can carry its demand. Nullopt when some clinic has no
/// such store arc and mode.
std::optional<NetworkSolution> direct_supply_solution(const Instance& inst);

}  // namespace vaxnet

#endif  // VAXNET_FORMULATION_HPP
