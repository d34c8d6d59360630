#ifndef VAXNET_ORACLE_HPP
#define VAXNET_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vaxnet/instance.hpp"
#include "vaxnet/network_solution.hpp"

namespace vaxnet {

inline constexpr double kDefaultOracleGuard = 1e7;

/// Number of configurations the oracle would enumerate: the sum over hub
/// statuses (closed, or one device and frequency) of the product of
/// (source, mode) choices of every open hub and every clinic. Returns
/// nullopt once the running total exceeds `cap`.
std::optional<double> oracle_search_size(const Instance& inst, double cap = kDefaultOracleGuard);

/// The instance is too large for exhaustive enumeration.
class OracleGuardError : public std::runtime_error {
 public:
  OracleGuardError(std::optional<double> size, double guard);
  std::optional<double> size() const { return size_; }

 private:
  std::optional<double> size_;
};

struct OracleResult {
  bool feasible = false;
  double cost = 0.0;
  NetworkSolution best;          // with flows and cost split filled in
  std::uint64_t enumerated = 0;  // configurations considered
  std::uint64_t accepted = 0;    // feasible configurations
};

/// Exhaustive search over every supply forest rooted at the store. Throws
/// OracleGuardError when oracle_search_size exceeds `guard`, InstanceError for
/// invalid instances. Ties keep the first configuration in enumeration order.
OracleResult oracle_enumerate(const Instance& inst, double guard = kDefaultOracleGuard);

/// Calls `visit(solution, feasible)` for every configuration of the search
/// space, including the ones the oracle discards (supply cycles, capacity
/// breaches). Flows are filled in where the supply graph reaches the store.
void enumerate_configurations(
    const Instance& inst,
    const std::function<void(const NetworkSolution&, bool feasible)>& visit,
    double guard = kDefaultOracleGuard);

enum class SolutionIssue {
  shape_mismatch,
  clinic_unassigned,
  arc_missing,
  source_not_open,
  hub_supply_missing,
  supply_cycle,
  vehicle_capacity,
  storage_capacity,
  flow_mismatch,
  cost_mismatch,
  zero_flow_cycle,  // warning only
};

std::string_view to_string(SolutionIssue issue);

struct SolutionViolation {
  SolutionIssue code;
  std::string subject;  // node id, or "from,to" for arcs
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

std::string describe(const SolutionViolation& v);

struct ValidationReport {
  std::vector<SolutionViolation> errors;
  std::vector<SolutionViolation> warnings;
  bool ok() const { return errors.empty(); }
};

/// Checks a network design against the instance without going through the
/// MIP: flows are re-derived from the assignments and demands, every
/// capacity is checked, and the claimed flows and cost are compared with
/// the derived ones (flows to 1e-6 absolute, cost to 1e-6 relative).
ValidationReport validate_solution(const Instance& inst, const NetworkSolution& sol);

}  // namespace vaxnet

#endif  // VAXNET_ORACLE_HPP
