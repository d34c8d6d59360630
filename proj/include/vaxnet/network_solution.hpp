#ifndef VAXNET_NETWORK_SOLUTION_HPP
#define VAXNET_NETWORK_SOLUTION_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vaxnet/instance.hpp"

namespace vaxnet {

struct ClinicSupply {
  NodeIndex source = -1;
  int mode = -1;
  friend bool operator==(const ClinicSupply&, const ClinicSupply&) = default;
};

struct HubPlan {
  bool open = false;
  NodeIndex source = -1;
  int mode = -1;
  Frequency frequency = Frequency::monthly;
  int device = -1;
  friend bool operator==(const HubPlan&, const HubPlan&) = default;
};

/// A network design: who supplies each clinic and open hub, by which mode,
/// how often hubs are replenished and which storage device they use, plus
/// the annual arc flows and the claimed cost split.
struct NetworkSolution {
  std::vector<ClinicSupply> clinics;  // per clinic
  std::vector<HubPlan> hubs;          // per hub
  std::vector<double> flows;          // per arc, litres/year
  double facility_cost = 0.0;
  double transport_cost = 0.0;

  double total_cost() const { return facility_cost + transport_cost; }
  int open_hub_count() const;
  std::vector<int> closed_hubs() const;
  friend bool operator==(const NetworkSolution&, const NetworkSolution&) = default;
};

struct CostBreakdown {
  double facility = 0.0;
  double transport = 0.0;
  double total() const { return facility + transport; }
};

/// Annual cost of the assignments in `sol` from the instance parameters.
/// Assignments over arcs missing from the instance are skipped.
CostBreakdown assignment_cost(const Instance& inst, const NetworkSolution& sol);

/// Solution files: {"instance", "objective", "breakdown", "assignments",
/// "flows"}. `instance` carries instance_fingerprint so a solution cannot be
/// checked against the wrong instance.
std::string solution_to_json(const Instance& inst, const NetworkSolution& sol);

/// Thrown when a solution file belongs to a different instance.
class SolutionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ParseError on schema problems and SolutionMismatch when the
/// fingerprint differs from `inst`.
NetworkSolution solution_from_json(const Instance& inst, std::string_view text);

void write_solution(const Instance& inst, const NetworkSolution& sol,
                    const std::filesystem::path& path);
NetworkSolution read_solution(const Instance& inst,
                              const std::filesystem::path& path);

}  // namespace vaxnet

#endif  // VAXNET_NETWORK_SOLUTION_HPP
