#ifndef VAXNET_INSTANCE_HPP
#define VAXNET_INSTANCE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vaxnet {

// Node indexing used throughout the library: 0 is the national store,
// 1..|H| are hubs, |H|+1..|H|+|C| are clinics.
using NodeIndex = int;
inline constexpr NodeIndex kStore = 0;
inline constexpr std::string_view kStoreId = "0";

enum class Frequency : int { monthly = 1, quarterly = 2 };
inline constexpr Frequency kFrequencies[] = {Frequency::monthly,
                                             Frequency::quarterly};

/// Replenishments per year for a frequency index.
constexpr int trips_per_year(Frequency f) {
  return f == Frequency::monthly ? 12 : 4;
}
constexpr int frequency_slot(Frequency f) { return static_cast<int>(f) - 1; }

struct Arc {
  NodeIndex from = 0;
  NodeIndex to = 0;
  friend bool operator==(const Arc&, const Arc&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// A vaccine network design instance. Plain data: construct it directly,
/// load it with read_instance, or build it with generate_instance, then
/// check it with validate_instance. Indexed containers follow the order of
/// the identifier lists.
struct Instance {
  std::vector<std::string> hubs;
  std::vector<std::string> clinics;
  std::vector<std::string> modes;
  std::vector<std::string> devices;
  std::vector<Arc> arcs;

  std::vector<double> demand;             // per clinic, litres/year
  std::vector<double> vehicle_capacity;   // per mode, litres/trip
  std::vector<double> device_capacity;    // per device, litres
  std::vector<std::vector<double>> transport_cost;  // [arc][mode], per trip
  std::vector<std::vector<double>> facility_cost;   // [hub][device], per year
  double buffer_factor = 1.25;
  std::vector<Point> coordinates;  // per node, or empty

  int num_hubs() const { return static_cast<int>(hubs.size()); }
  int num_clinics() const { return static_cast<int>(clinics.size()); }
  int num_modes() const { return static_cast<int>(modes.size()); }
  int num_devices() const { return static_cast<int>(devices.size()); }
  int num_arcs() const { return static_cast<int>(arcs.size()); }
  int num_nodes() const { return 1 + num_hubs() + num_clinics(); }

  bool is_hub(NodeIndex v) const { return v >= 1 && v <= num_hubs(); }
  bool is_clinic(NodeIndex v) const {
    return v > num_hubs() && v < num_nodes();
  }
  NodeIndex hub_node(int h) const { return 1 + h; }
  NodeIndex clinic_node(int c) const { return 1 + num_hubs() + c; }
  int hub_of(NodeIndex v) const { return v - 1; }
  int clinic_of(NodeIndex v) const { return v - 1 - num_hubs(); }

  const std::string& node_id(NodeIndex v) const;
  std::optional<NodeIndex> find_node(std::string_view id) const;

  /// Arc indices entering each node, in arc order.
  std::vector<std::vector<int>> incoming_arcs() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Constant-time arc lookup for a fixed instance.
class ArcTable {
 public:
  explicit ArcTable(const Instance& inst);
  std::optional<int> find(NodeIndex from, NodeIndex to) const;

 private:
  std::int64_t key(NodeIndex from, NodeIndex to) const {
    return static_cast<std::int64_t>(from) * num_nodes_ + to;
  }
  std::int64_t num_nodes_;
  std::unordered_map<std::int64_t, int> index_;
};

enum class InstanceIssue {
  invalid_id,
  duplicate_id,
  reserved_id,
  size_mismatch,
  unknown_endpoint,
  arc_into_store,
  self_arc,
  invalid_arc_source,
  duplicate_arc,
  nonpositive_capacity,
  negative_demand,
  negative_cost,
  buffer_below_one,
  unreachable_clinic,
};

std::string_view to_string(InstanceIssue issue);

struct InstanceViolation {
  InstanceIssue code;
  std::string subject;  // offending identifier
  std::string detail;
  friend bool operator==(const InstanceViolation&,
                         const InstanceViolation&) = default;
};

std::string describe(const InstanceViolation& v);

/// Every invariant breach of `inst`; empty iff the instance is well formed.
std::vector<InstanceViolation> validate_instance(const Instance& inst);

/// Thrown when an instance fails validation where a valid one is required.
class InstanceError : public std::runtime_error {
 public:
  explicit InstanceError(std::vector<InstanceViolation> violations);
  const std::vector<InstanceViolation>& violations() const {
    return violations_;
  }

 private:
  std::vector<InstanceViolation> violations_;
};

/// Malformed instance, config or solution files.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File-system failures (missing files, unwritable paths).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require_valid(const Instance& inst);

/// Stable content hash of an instance (hex), used to pair solutions with
/// the instance they were computed for.
std::string instance_fingerprint(const Instance& inst);

}  // namespace vaxnet

#endif  // VAXNET_INSTANCE_HPP
