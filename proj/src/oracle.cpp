#include "vaxnet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace vaxnet {

namespace {

// Capacity rows are accepted with the same absolute slack the MIP uses.
constexpr double kCapacityTol = 1e-6;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Option {
  int arc;
  int mode;
  NodeIndex source;
};

// Walks hub statuses, then hub suppliers, then clinic suppliers, keeping
// loads and costs up to date incrementally so a leaf costs O(|H|).
class Enumerator {
 public:
  Enumerator(const Instance& inst, bool every_option)
      : inst_(inst), every_option_(every_option), incoming_(inst.incoming_arcs()) {
    status_.assign(inst.num_hubs(), 0);
    hub_choice_.assign(inst.num_hubs(), -1);
    hub_options_.resize(inst.num_hubs());
    clinic_choice_.assign(inst.num_clinics(), 0);
    clinic_options_.resize(inst.num_clinics());
    load_.assign(inst.num_hubs(), 0.0);
    throughput_.assign(inst.num_hubs(), 0.0);
    reaches_store_.assign(inst.num_hubs(), false);
  }

  // leaf(feasible, cost) is called for every configuration.
  template <typename Leaf>
  void run(Leaf&& leaf) {
    const int base = 1 + 2 * inst_.num_devices();
    while (true) {
      enter_status();
      if (statuses_ok_) walk_hub_choices(leaf);
      int h = 0;
      while (h < inst_.num_hubs() && ++status_[h] == base) status_[h++] = 0;
      if (h == inst_.num_hubs()) break;
    }
  }

  NetworkSolution snapshot(bool with_cost) const {
    NetworkSolution sol;
    sol.clinics.resize(inst_.num_clinics());
    sol.hubs.resize(inst_.num_hubs());
    sol.flows.assign(inst_.num_arcs(), 0.0);
    for (int h = 0; h < inst_.num_hubs(); ++h) {
      if (status_[h] == 0) continue;
      const Option& o = hub_options_[h][hub_choice_[h]];
      sol.hubs[h] = {true, o.source, o.mode, frequency(h), device(h)};
      if (reaches_store_[h]) sol.flows[o.arc] = throughput_[h];
    }
    for (int c = 0; c < inst_.num_clinics(); ++c) {
      const Option& o = clinic_options_[c][clinic_choice_[c]];
      sol.clinics[c] = {o.source, o.mode};
      if (o.source == kStore || reaches_store_[inst_.hub_of(o.source)])
        sol.flows[o.arc] = inst_.demand[c];
    }
    if (with_cost) {
      // Recomputed rather than taken from the running sums, which drift.
      const CostBreakdown cost = assignment_cost(inst_, sol);
      sol.facility_cost = cost.facility;
      sol.transport_cost = cost.transport;
    }
    return sol;
  }

  std::uint64_t leaves() const { return leaves_; }

 private:
  int device(int h) const { return (status_[h] - 1) / 2; }
  Frequency frequency(int h) const {
    return (status_[h] - 1) % 2 == 0 ? Frequency::monthly : Frequency::quarterly;
  }
  bool open(NodeIndex v) const { return v == kStore || status_[inst_.hub_of(v)] > 0; }

  void enter_status() {
    statuses_ok_ = true;
    facility_ = 0.0;
    open_hubs_.clear();
    for (int h = 0; h < inst_.num_hubs(); ++h) {
      hub_options_[h].clear();
      if (status_[h] == 0) continue;
      open_hubs_.push_back(h);
      facility_ += inst_.facility_cost[h][device(h)];
      for (int a : incoming_[inst_.hub_node(h)]) {
        const NodeIndex from = inst_.arcs[a].from;
        if (!open(from)) continue;
        for (int m = 0; m < inst_.num_modes(); ++m) hub_options_[h].push_back({a, m, from});
      }
      if (hub_options_[h].empty()) statuses_ok_ = false;
    }
    for (int c = 0; c < inst_.num_clinics(); ++c) {
      clinic_options_[c].clear();
      for (int a : incoming_[inst_.clinic_node(c)]) {
        const NodeIndex from = inst_.arcs[a].from;
        if (!open(from)) continue;
        for (int m = 0; m < inst_.num_modes(); ++m) {
          if (!every_option_ &&
              inst_.demand[c] - 12.0 * inst_.vehicle_capacity[m] > kCapacityTol)
            continue;
          clinic_options_[c].push_back({a, m, from});
        }
      }
      if (clinic_options_[c].empty()) statuses_ok_ = false;
    }
  }

  template <typename Leaf>
  void walk_hub_choices(Leaf& leaf) {
    for (int h : open_hubs_) hub_choice_[h] = 0;
    while (true) {
      prepare_tree();
      if (acyclic_ || every_option_) walk_clinic_choices(leaf);
      std::size_t k = 0;
      while (k < open_hubs_.size()) {
        const int h = open_hubs_[k];
        if (++hub_choice_[h] < static_cast<int>(hub_options_[h].size())) break;
        hub_choice_[h] = 0;
        ++k;
      }
      if (k == open_hubs_.size()) break;
    }
  }

  // Hub supply tree for the current hub choices: which hubs reach the store
  // and a children-before-parents order for flow accumulation.
  void prepare_tree() {
    hub_transport_ = 0.0;
    acyclic_ = true;
    order_.clear();
    std::vector<int> depth(inst_.num_hubs(), -1);
    for (int h : open_hubs_) {
      const Option& o = hub_options_[h][hub_choice_[h]];
      hub_transport_ += trips_per_year(frequency(h)) * inst_.transport_cost[o.arc][o.mode];
      int steps = 0;
      NodeIndex v = inst_.hub_node(h);
      while (v != kStore && steps <= inst_.num_hubs()) {
        v = hub_options_[inst_.hub_of(v)][hub_choice_[inst_.hub_of(v)]].source;
        ++steps;
      }
      reaches_store_[h] = v == kStore;
      depth[h] = reaches_store_[h] ? steps : -1;
      if (!reaches_store_[h]) acyclic_ = false;
    }
    for (int h : open_hubs_)
      if (depth[h] >= 0) order_.push_back(h);
    std::sort(order_.begin(), order_.end(),
              [&](int a, int b) { return depth[a] > depth[b] || (depth[a] == depth[b] && a < b); });
  }

  template <typename Leaf>
  void walk_clinic_choices(Leaf& leaf) {
    std::fill(load_.begin(), load_.end(), 0.0);
    clinic_transport_ = 0.0;
    for (int c = 0; c < inst_.num_clinics(); ++c) {
      clinic_choice_[c] = 0;
      add_clinic(c, 1.0);
    }
    while (true) {
      ++leaves_;
      const bool feasible = evaluate();
      leaf(feasible, facility_ + hub_transport_ + clinic_transport_);
      int c = 0;
      while (c < inst_.num_clinics()) {
        add_clinic(c, -1.0);
        if (++clinic_choice_[c] < static_cast<int>(clinic_options_[c].size())) {
          add_clinic(c, 1.0);
          break;
        }
        clinic_choice_[c] = 0;
        add_clinic(c, 1.0);
        ++c;
      }
      if (c == inst_.num_clinics()) break;
    }
  }

  void add_clinic(int c, double sign) {
    const Option& o = clinic_options_[c][clinic_choice_[c]];
    clinic_transport_ += sign * 12.0 * inst_.transport_cost[o.arc][o.mode];
    if (o.source != kStore) load_[inst_.hub_of(o.source)] += sign * inst_.demand[c];
  }

  bool evaluate() {
    for (int h : open_hubs_) throughput_[h] = load_[h];
    for (int h : order_) {
      const NodeIndex parent = hub_options_[h][hub_choice_[h]].source;
      if (parent != kStore) throughput_[inst_.hub_of(parent)] += throughput_[h];
    }
    if (!acyclic_) return false;
    for (int c = 0; c < inst_.num_clinics(); ++c) {
      const Option& o = clinic_options_[c][clinic_choice_[c]];
      if (inst_.demand[c] - 12.0 * inst_.vehicle_capacity[o.mode] > kCapacityTol) return false;
    }
    for (int h : open_hubs_) {
      const Option& o = hub_options_[h][hub_choice_[h]];
      const double n = trips_per_year(frequency(h));
      if (throughput_[h] - n * inst_.vehicle_capacity[o.mode] > kCapacityTol) return false;
      if (inst_.buffer_factor * throughput_[h] - n * inst_.device_capacity[device(h)] >
          kCapacityTol)
        return false;
    }
    return true;
  }

  const Instance& inst_;
  bool every_option_;
  std::vector<std::vector<int>> incoming_;
  std::vector<int> status_;
  std::vector<int> open_hubs_;
  std::vector<std::vector<Option>> hub_options_, clinic_options_;
  std::vector<int> hub_choice_, clinic_choice_;
  std::vector<double> load_, throughput_;
  std::vector<bool> reaches_store_;
  std::vector<int> order_;
  bool statuses_ok_ = true;
  bool acyclic_ = true;
  double facility_ = 0.0, hub_transport_ = 0.0, clinic_transport_ = 0.0;
  std::uint64_t leaves_ = 0;
};

void enforce_guard(const Instance& inst, double guard) {
  require_valid(inst);
  const auto size = oracle_search_size(inst, guard);
  if (!size || *size > guard) throw OracleGuardError(size, guard);
}

}  // namespace

std::optional<double> oracle_search_size(const Instance& inst, double cap) {
  require_valid(inst);
  const int base = 1 + 2 * inst.num_devices();
  if (inst.num_hubs() * std::log(static_cast<double>(base)) > std::log(cap)) return std::nullopt;
  const auto incoming = inst.incoming_arcs();
  std::vector<int> status(inst.num_hubs(), 0);
  double total = 0.0;
  while (true) {
    auto is_open = [&](NodeIndex v) { return v == kStore || status[inst.hub_of(v)] > 0; };
    auto options = [&](NodeIndex node) {
      double n = 0;
      for (int a : incoming[node])
        if (is_open(inst.arcs[a].from)) n += inst.num_modes();
      return n;
    };
    double product = 1.0;
    for (int h = 0; h < inst.num_hubs(); ++h)
      if (status[h] > 0) product *= options(inst.hub_node(h));
    for (int c = 0; c < inst.num_clinics(); ++c) product *= options(inst.clinic_node(c));
    total += product;
    if (total > cap) return std::nullopt;
    int h = 0;
    while (h < inst.num_hubs() && ++status[h] == base) status[h++] = 0;
    if (h == inst.num_hubs()) break;
  }
  return total;
}

OracleGuardError::OracleGuardError(std::optional<double> size, double guard)
    : std::runtime_error(
          "instance too large for enumeration: " +
          (size ? format_number(*size) + " configurations" : std::string("search space")) +
          " exceeds the guard of " + format_number(guard)),
      size_(size) {}

OracleResult oracle_enumerate(const Instance& inst, double guard) {
  enforce_guard(inst, guard);
  OracleResult result;
  Enumerator e(inst, false);
  e.run([&](bool feasible, double cost) {
    if (!feasible) return;
    ++result.accepted;
    if (!result.feasible || cost < result.cost) {
      result.feasible = true;
      result.best = e.snapshot(true);
      result.cost = result.best.total_cost();
    }
  });
  result.enumerated = e.leaves();
  return result;
}

void enumerate_configurations(
    const Instance& inst,
    const std::function<void(const NetworkSolution&, bool feasible)>& visit,
    double guard) {
  enforce_guard(inst, guard);
  Enumerator e(inst, true);
  e.run([&](bool feasible, double) { visit(e.snapshot(true), feasible); });
}

std::string_view to_string(SolutionIssue issue) {
  switch (issue) {
    case SolutionIssue::shape_mismatch: return "ShapeMismatch";
    case SolutionIssue::clinic_unassigned: return "ClinicUnassigned";
    case SolutionIssue::arc_missing: return "ArcMissing";
    case SolutionIssue::source_not_open: return "SourceNotOpen";
    case SolutionIssue::hub_supply_missing: return "HubSupplyMissing";
    case SolutionIssue::supply_cycle: return "SupplyCycle";
    case SolutionIssue::vehicle_capacity: return "VehicleCapacity";
    case SolutionIssue::storage_capacity: return "StorageCapacity";
    case SolutionIssue::flow_mismatch: return "FlowMismatch";
    case SolutionIssue::cost_mismatch: return "CostMismatch";
    case SolutionIssue::zero_flow_cycle: return "ZeroFlowCycle";
  }
  return "?";
}

std::string describe(const SolutionViolation& v) {
  std::string out = std::string(to_string(v.code)) + "(" + v.subject + ")";
  if (!v.detail.empty()) out += ": " + v.detail;
  return out;
}

ValidationReport validate_solution(const Instance& inst, const NetworkSolution& sol) {
  require_valid(inst);
  ValidationReport report;
  auto error = [&](SolutionIssue code, std::string subject, std::string detail,
                   double value = 0.0, double limit = 0.0) {
    report.errors.push_back({code, std::move(subject), value, limit, std::move(detail)});
  };
  if (static_cast<int>(sol.clinics.size()) != inst.num_clinics() ||
      static_cast<int>(sol.hubs.size()) != inst.num_hubs()) {
    error(SolutionIssue::shape_mismatch, "solution",
          "expected " + std::to_string(inst.num_clinics()) + " clinics and " +
              std::to_string(inst.num_hubs()) + " hubs");
    return report;
  }

  const ArcTable table(inst);
  auto arc_name = [&](NodeIndex from, NodeIndex to) {
    const std::string f = from >= 0 && from < inst.num_nodes() ? inst.node_id(from) : "?";
    return f + "," + inst.node_id(to);
  };
  // Resolves a (source, mode) supply into an arc, reporting what is wrong.
  auto supply_arc = [&](NodeIndex source, int mode, NodeIndex to) -> std::optional<int> {
    if (source < 0 || source >= inst.num_nodes() || source == to) {
      error(SolutionIssue::arc_missing, inst.node_id(to), "invalid source");
      return std::nullopt;
    }
    auto a = table.find(source, to);
    if (!a) {
      error(SolutionIssue::arc_missing, arc_name(source, to), "no such arc");
      return std::nullopt;
    }
    if (mode < 0 || mode >= inst.num_modes()) {
      error(SolutionIssue::arc_missing, arc_name(source, to), "invalid mode");
      return std::nullopt;
    }
    if (inst.is_clinic(source)) {
      error(SolutionIssue::arc_missing, arc_name(source, to), "clinics supply nobody");
      return std::nullopt;
    }
    if (inst.is_hub(source) && !sol.hubs[inst.hub_of(source)].open) {
      error(SolutionIssue::source_not_open, inst.node_id(to),
            inst.node_id(source) + " is closed");
      return std::nullopt;
    }
    return a;
  };

  std::vector<std::optional<int>> clinic_arc(inst.num_clinics()), hub_arc(inst.num_hubs());
  for (int c = 0; c < inst.num_clinics(); ++c) {
    const ClinicSupply& s = sol.clinics[c];
    if (s.source < 0 && s.mode < 0) {
      error(SolutionIssue::clinic_unassigned, inst.clinics[c], "no supplier");
      continue;
    }
    clinic_arc[c] = supply_arc(s.source, s.mode, inst.clinic_node(c));
  }
  for (int h = 0; h < inst.num_hubs(); ++h) {
    const HubPlan& hp = sol.hubs[h];
    if (!hp.open) continue;
    if (hp.device < 0 || hp.device >= inst.num_devices())
      error(SolutionIssue::hub_supply_missing, inst.hubs[h], "no storage device");
    if (hp.source < 0 && hp.mode < 0) {
      error(SolutionIssue::hub_supply_missing, inst.hubs[h], "no supplier");
      continue;
    }
    hub_arc[h] = supply_arc(hp.source, hp.mode, inst.hub_node(h));
  }

  // Derive flows: each clinic's demand travels along its supply chain.
  std::vector<double> flow(inst.num_arcs(), 0.0);
  std::vector<double> throughput(inst.num_hubs(), 0.0);
  std::vector<bool> cyclic(inst.num_hubs(), false);
  for (int h = 0; h < inst.num_hubs(); ++h) {
    if (!sol.hubs[h].open || !hub_arc[h]) continue;
    std::vector<bool> seen(inst.num_hubs(), false);
    int v = h;
    while (true) {
      if (seen[v]) {
        cyclic[h] = true;
        break;
      }
      seen[v] = true;
      if (!hub_arc[v]) break;
      const NodeIndex up = inst.arcs[*hub_arc[v]].from;
      if (up == kStore) break;
      v = inst.hub_of(up);
    }
  }
  for (int c = 0; c < inst.num_clinics(); ++c) {
    if (!clinic_arc[c]) continue;
    const double a = inst.demand[c];
    flow[*clinic_arc[c]] += a;
    NodeIndex up = inst.arcs[*clinic_arc[c]].from;
    int steps = 0;
    while (up != kStore && steps++ <= inst.num_hubs()) {
      const int h = inst.hub_of(up);
      throughput[h] += a;
      if (!hub_arc[h]) break;
      flow[*hub_arc[h]] += a;
      up = inst.arcs[*hub_arc[h]].from;
    }
    if (up != kStore && steps > inst.num_hubs() && a > 0.0)
      error(SolutionIssue::supply_cycle, inst.clinics[c],
            "supply chain never reaches the store");
  }
  for (int h = 0; h < inst.num_hubs(); ++h)
    if (cyclic[h] && throughput[h] == 0.0)
      report.warnings.push_back({SolutionIssue::zero_flow_cycle, inst.hubs[h], 0.0, 0.0,
                                 "hub sits on a supply cycle without flow"});

  // Capacities, per trip.
  for (int c = 0; c < inst.num_clinics(); ++c) {
    if (!clinic_arc[c]) continue;
    const int m = sol.clinics[c].mode;
    const double cap = inst.vehicle_capacity[m];
    if (inst.demand[c] - 12.0 * cap > kCapacityTol)
      error(SolutionIssue::vehicle_capacity,
            arc_name(sol.clinics[c].source, inst.clinic_node(c)),
            format_number(inst.demand[c] / 12.0) + " > " + format_number(cap),
            inst.demand[c] / 12.0, cap);
  }
  for (int h = 0; h < inst.num_hubs(); ++h) {
    const HubPlan& hp = sol.hubs[h];
    if (!hp.open) continue;
    const double n = trips_per_year(hp.frequency);
    if (hub_arc[h]) {
      const double cap = inst.vehicle_capacity[hp.mode];
      if (throughput[h] - n * cap > kCapacityTol)
        error(SolutionIssue::vehicle_capacity, arc_name(hp.source, inst.hub_node(h)),
              format_number(throughput[h] / n) + " > " + format_number(cap),
              throughput[h] / n, cap);
    }
    if (hp.device >= 0 && hp.device < inst.num_devices()) {
      const double cap = inst.device_capacity[hp.device];
      const double need = inst.buffer_factor * throughput[h];
      if (need - n * cap > kCapacityTol)
        error(SolutionIssue::storage_capacity, inst.hubs[h],
              format_number(need / n) + " > " + format_number(cap), need / n, cap);
    }
  }

  if (static_cast<int>(sol.flows.size()) != inst.num_arcs()) {
    error(SolutionIssue::flow_mismatch, "flows",
          "expected " + std::to_string(inst.num_arcs()) + " arc flows");
  } else {
    for (int a = 0; a < inst.num_arcs(); ++a)
      if (std::abs(sol.flows[a] - flow[a]) > 1e-6 * std::max(1.0, std::abs(flow[a])))
        error(SolutionIssue::flow_mismatch, arc_name(inst.arcs[a].from, inst.arcs[a].to),
              "claimed " + format_number(sol.flows[a]) + ", derived " + format_number(flow[a]),
              sol.flows[a], flow[a]);
  }

  const double real = assignment_cost(inst, sol).total();
  const double claimed = sol.total_cost();
  if (std::abs(claimed - real) > 1e-6 * std::max(1.0, std::abs(real)))
    error(SolutionIssue::cost_mismatch, "objective",
          "claimed " + format_number(claimed) + ", recomputed " + format_number(real), claimed,
          real);
  return report;
}

}  // namespace vaxnet
