#include "vaxnet/instance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

namespace vaxnet {

namespace {

const std::string kStoreIdString{kStoreId};

bool valid_identifier(const std::string& id) {
  if (id.empty()) return false;
  return std::none_of(id.begin(), id.end(), [](unsigned char ch) {
    return std::isspace(ch) || ch == ',' || ch < 0x20;
  });
}

std::string arc_label(const Instance& inst, const Arc& a) {
  auto label = [&](NodeIndex v) {
    return (v >= 0 && v < inst.num_nodes()) ? inst.node_id(v)
                                            : "#" + std::to_string(v);
  };
  return label(a.from) + "," + label(a.to);
}

}  // namespace

const std::string& Instance::node_id(NodeIndex v) const {
  if (v == kStore) return kStoreIdString;
  if (is_hub(v)) return hubs[hub_of(v)];
  if (is_clinic(v)) return clinics[clinic_of(v)];
  throw std::out_of_range("node index " + std::to_string(v));
}

std::optional<NodeIndex> Instance::find_node(std::string_view id) const {
  if (id == kStoreId) return kStore;
  for (int h = 0; h < num_hubs(); ++h)
    if (hubs[h] == id) return hub_node(h);
  for (int c = 0; c < num_clinics(); ++c)
    if (clinics[c] == id) return clinic_node(c);
  return std::nullopt;
}

std::vector<std::vector<int>> Instance::incoming_arcs() const {
  std::vector<std::vector<int>> in(num_nodes());
  for (int a = 0; a < num_arcs(); ++a) {
    const NodeIndex to = arcs[a].to;
    if (to >= 0 && to < num_nodes()) in[to].push_back(a);
  }
  return in;
}

ArcTable::ArcTable(const Instance& inst) : num_nodes_(inst.num_nodes()) {
  index_.reserve(inst.arcs.size());
  for (int a = 0; a < inst.num_arcs(); ++a)
    index_.emplace(key(inst.arcs[a].from, inst.arcs[a].to), a);
}

std::optional<int> ArcTable::find(NodeIndex from, NodeIndex to) const {
  auto it = index_.find(key(from, to));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string_view to_string(InstanceIssue issue) {
  switch (issue) {
    case InstanceIssue::invalid_id: return "InvalidId";
    case InstanceIssue::duplicate_id: return "DuplicateId";
    case InstanceIssue::reserved_id: return "ReservedId";
    case InstanceIssue::size_mismatch: return "SizeMismatch";
    case InstanceIssue::unknown_endpoint: return "UnknownEndpoint";
    case InstanceIssue::arc_into_store: return "ArcIntoStore";
    case InstanceIssue::self_arc: return "SelfArc";
    case InstanceIssue::invalid_arc_source: return "InvalidArcSource";
    case InstanceIssue::duplicate_arc: return "DuplicateArc";
    case InstanceIssue::nonpositive_capacity: return "NonpositiveCapacity";
    case InstanceIssue::negative_demand: return "NegativeDemand";
    case InstanceIssue::negative_cost: return "NegativeCost";
    case InstanceIssue::buffer_below_one: return "BufferBelowOne";
    case InstanceIssue::unreachable_clinic: return "UnreachableClinic";
  }
  return "Unknown";
}

std::string describe(const InstanceViolation& v) {
  std::string out{to_string(v.code)};
  out += "(" + v.subject + ")";
  if (!v.detail.empty()) out += ": " + v.detail;
  return out;
}

std::vector<InstanceViolation> validate_instance(const Instance& inst) {
  std::vector<InstanceViolation> out;
  auto report = [&](InstanceIssue code, std::string subject,
                    std::string detail = {}) {
    out.push_back({code, std::move(subject), std::move(detail)});
  };

  // Identifiers: nodes share one namespace, modes and devices have their own.
  std::set<std::string> node_ids;
  auto check_ids = [&](const std::vector<std::string>& ids,
                       std::set<std::string>& seen, bool node_namespace) {
    for (const auto& id : ids) {
      if (!valid_identifier(id)) {
        report(InstanceIssue::invalid_id, id,
               "identifiers must be non-empty without whitespace or commas");
        continue;
      }
      if (node_namespace && id == kStoreId) {
        report(InstanceIssue::reserved_id, id, "0 denotes the national store");
        continue;
      }
      if (!seen.insert(id).second) report(InstanceIssue::duplicate_id, id);
    }
  };
  check_ids(inst.hubs, node_ids, true);
  check_ids(inst.clinics, node_ids, true);
  std::set<std::string> mode_ids, device_ids;
  check_ids(inst.modes, mode_ids, false);
  check_ids(inst.devices, device_ids, false);

  auto check_size = [&](std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
      report(InstanceIssue::size_mismatch, what,
             "expected " + std::to_string(want) + " entries, found " +
                 std::to_string(got));
      return false;
    }
    return true;
  };
  const bool demand_ok =
      check_size(inst.demand.size(), inst.clinics.size(), "demand");
  const bool vcap_ok = check_size(inst.vehicle_capacity.size(),
                                  inst.modes.size(), "vehicle_capacity");
  const bool scap_ok = check_size(inst.device_capacity.size(),
                                  inst.devices.size(), "device_capacity");
  bool tcost_ok = check_size(inst.transport_cost.size(), inst.arcs.size(),
                             "transport_cost");
  if (tcost_ok) {
    for (const auto& row : inst.transport_cost)
      if (row.size() != inst.modes.size()) tcost_ok = false;
    if (!tcost_ok)
      report(InstanceIssue::size_mismatch, "transport_cost",
             "every arc needs one cost per mode");
  }
  bool fcost_ok = check_size(inst.facility_cost.size(), inst.hubs.size(),
                             "facility_cost");
  if (fcost_ok) {
    for (const auto& row : inst.facility_cost)
      if (row.size() != inst.devices.size()) fcost_ok = false;
    if (!fcost_ok)
      report(InstanceIssue::size_mismatch, "facility_cost",
             "every hub needs one cost per device");
  }
  if (!inst.coordinates.empty())
    check_size(inst.coordinates.size(),
               static_cast<std::size_t>(inst.num_nodes()), "coordinates");

  // Arcs.
  std::set<std::pair<NodeIndex, NodeIndex>> seen_arcs;
  std::vector<bool> has_inbound(inst.num_nodes(), false);
  for (const Arc& a : inst.arcs) {
    const std::string label = arc_label(inst, a);
    const bool from_ok = a.from >= 0 && a.from < inst.num_nodes();
    const bool to_ok = a.to >= 0 && a.to < inst.num_nodes();
    if (!from_ok || !to_ok) {
      report(InstanceIssue::unknown_endpoint, label);
      continue;
    }
    if (a.to == kStore) {
      report(InstanceIssue::arc_into_store, label);
      continue;
    }
    if (a.from == a.to) {
      report(InstanceIssue::self_arc, label);
      continue;
    }
    if (inst.is_clinic(a.from)) {
      report(InstanceIssue::invalid_arc_source, label,
             "clinics cannot supply other nodes");
      continue;
    }
    if (!seen_arcs.insert({a.from, a.to}).second) {
      report(InstanceIssue::duplicate_arc, label);
      continue;
    }
    has_inbound[a.to] = true;
  }

  // Numeric parameters.
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (demand_ok)
    for (int c = 0; c < inst.num_clinics(); ++c)
      if (!finite_nonneg(inst.demand[c]))
        report(InstanceIssue::negative_demand, inst.clinics[c]);
  if (vcap_ok)
    for (int m = 0; m < inst.num_modes(); ++m)
      if (!(std::isfinite(inst.vehicle_capacity[m]) &&
            inst.vehicle_capacity[m] > 0.0))
        report(InstanceIssue::nonpositive_capacity, inst.modes[m],
               "vehicle capacity");
  if (scap_ok)
    for (int d = 0; d < inst.num_devices(); ++d)
      if (!(std::isfinite(inst.device_capacity[d]) &&
            inst.device_capacity[d] > 0.0))
        report(InstanceIssue::nonpositive_capacity, inst.devices[d],
               "device capacity");
  if (tcost_ok)
    for (int a = 0; a < inst.num_arcs(); ++a)
      for (int m = 0; m < inst.num_modes(); ++m)
        if (!finite_nonneg(inst.transport_cost[a][m]))
          report(InstanceIssue::negative_cost,
                 arc_label(inst, inst.arcs[a]) + "," +
                     (m < static_cast<int>(inst.modes.size()) ? inst.modes[m]
                                                              : "?"),
                 "transport cost");
  if (fcost_ok)
    for (int h = 0; h < inst.num_hubs(); ++h)
      for (int d = 0; d < inst.num_devices(); ++d)
        if (!finite_nonneg(inst.facility_cost[h][d]))
          report(InstanceIssue::negative_cost,
                 inst.hubs[h] + "," + inst.devices[d], "facility cost");
  if (!(std::isfinite(inst.buffer_factor) && inst.buffer_factor >= 1.0))
    report(InstanceIssue::buffer_below_one, "buffer_factor");

  for (int c = 0; c < inst.num_clinics(); ++c)
    if (!has_inbound[inst.clinic_node(c)])
      report(InstanceIssue::unreachable_clinic, inst.clinics[c],
             "no incoming arc");
  return out;
}

namespace {
std::string summarize(const std::vector<InstanceViolation>& violations) {
  std::ostringstream os;
  os << "invalid instance (" << violations.size() << " violation"
     << (violations.size() == 1 ? "" : "s") << ")";
  for (std::size_t i = 0; i < violations.size() && i < 5; ++i)
    os << (i == 0 ? ": " : "; ") << describe(violations[i]);
  if (violations.size() > 5) os << "; ...";
  return os.str();
}
}  // namespace

InstanceError::InstanceError(std::vector<InstanceViolation> violations)
    : std::runtime_error(summarize(violations)),
      violations_(std::move(violations)) {}

void require_valid(const Instance& inst) {
  auto violations = validate_instance(inst);
  if (!violations.empty()) throw InstanceError(std::move(violations));
}

}  // namespace vaxnet
