#include "vaxnet/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vaxnet {

using mip::MipModel;
using mip::Sense;
using mip::Term;

std::optional<int> VarIndex::route(int arc, int mode, Frequency f) const {
  const int id = route_[(static_cast<std::size_t>(arc) * num_modes_ + mode) * 2 +
                        frequency_slot(f)];
  if (id < 0) return std::nullopt;
  return id;
}

int VarIndex::expected_binaries(const Instance& inst) {
  int hub_in = 0, clinic_in = 0;
  for (const Arc& a : inst.arcs) (inst.is_hub(a.to) ? hub_in : clinic_in) += 1;
  return inst.num_hubs() * inst.num_devices() * 2 + hub_in * inst.num_modes() * 2 +
         clinic_in * inst.num_modes();
}

namespace {

std::string freq_label(Frequency f) { return std::to_string(static_cast<int>(f)); }

constexpr const char* kFamilies[] = {"C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9"};

std::string family_of(const std::string& row) {
  return row.substr(0, row.find('_'));
}

}  // namespace

struct Program1Builder {
  const Instance& inst;
  Program1 out;

  Program1 build() {
    require_valid(inst);
    MipModel& m = out.model;
    VarIndex& idx = out.index;
    m.set_name("PROGRAM1");
    idx.num_modes_ = inst.num_modes();
    idx.num_devices_ = inst.num_devices();
    idx.hub_ids_ = inst.hubs;

    const int A = inst.num_arcs();
    idx.flow_.resize(A);
    for (int a = 0; a < A; ++a) {
      const Arc& arc = inst.arcs[a];
      idx.flow_[a] = m.add_continuous(
          "X_" + inst.node_id(arc.from) + "_" + inst.node_id(arc.to));
      idx.refs_.push_back({VarRef::Kind::flow, a});
    }

    idx.route_.assign(static_cast<std::size_t>(A) * inst.num_modes() * 2, -1);
    for (int a = 0; a < A; ++a) {
      const Arc& arc = inst.arcs[a];
      const bool into_hub = inst.is_hub(arc.to);
      for (int k = 0; k < inst.num_modes(); ++k) {
        for (Frequency f : kFrequencies) {
          if (!into_hub && f != Frequency::monthly) continue;
          const std::string name = "Y_" + inst.node_id(arc.from) + "_" +
                                   inst.node_id(arc.to) + "_" + inst.modes[k] + "_" +
                                   freq_label(f);
          const int id = m.add_binary(name, trips_per_year(f) * inst.transport_cost[a][k]);
          idx.route_[(static_cast<std::size_t>(a) * inst.num_modes() + k) * 2 +
                     frequency_slot(f)] = id;
          idx.refs_.push_back({VarRef::Kind::route, a, k, f});
        }
      }
    }

    idx.storage_.assign(static_cast<std::size_t>(inst.num_hubs()) * inst.num_devices() * 2, -1);
    for (int h = 0; h < inst.num_hubs(); ++h)
      for (int d = 0; d < inst.num_devices(); ++d)
        for (Frequency f : kFrequencies) {
          const int id = m.add_binary("Z_" + inst.hubs[h] + "_" + inst.devices[d] + "_" +
                                          freq_label(f),
                                      inst.facility_cost[h][d]);
          idx.storage_[(h * inst.num_devices() + d) * 2 + frequency_slot(f)] = id;
          VarRef r;
          r.kind = VarRef::Kind::storage;
          r.frequency = f;
          r.hub = h;
          r.device = d;
          idx.refs_.push_back(r);
        }
    idx.num_binaries_ = m.num_binaries();

    add_rows();
    return std::move(out);
  }

  // Route terms entering node v, optionally limited to one frequency.
  std::vector<Term> inbound_routes(const std::vector<int>& in_arcs, double coef,
                                   std::optional<Frequency> only = std::nullopt) const {
    std::vector<Term> terms;
    for (int a : in_arcs)
      for (int k = 0; k < inst.num_modes(); ++k)
        for (Frequency f : kFrequencies) {
          if (only && f != *only) continue;
          if (auto y = out.index.route(a, k, f)) terms.push_back({*y, coef});
        }
    return terms;
  }

  void add_rows() {
    MipModel& m = out.model;
    const VarIndex& idx = out.index;
    const auto incoming = inst.incoming_arcs();
    std::vector<std::vector<int>> outgoing(inst.num_nodes());
    for (int a = 0; a < inst.num_arcs(); ++a) outgoing[inst.arcs[a].from].push_back(a);

    for (int c = 0; c < inst.num_clinics(); ++c)
      m.add_constraint("C2_" + inst.clinics[c],
                       inbound_routes(incoming[inst.clinic_node(c)], 1.0), Sense::equal, 1.0);
    for (int h = 0; h < inst.num_hubs(); ++h)
      m.add_constraint("C3_" + inst.hubs[h], inbound_routes(incoming[inst.hub_node(h)], 1.0),
                       Sense::less_equal, 1.0);
    for (int h = 0; h < inst.num_hubs(); ++h) {
      std::vector<Term> terms;
      for (int d = 0; d < inst.num_devices(); ++d)
        for (Frequency f : kFrequencies) terms.push_back({idx.storage(h, d, f), 1.0});
      m.add_constraint("C4_" + inst.hubs[h], std::move(terms), Sense::less_equal, 1.0);
    }
    for (int h = 0; h < inst.num_hubs(); ++h)
      for (Frequency f : kFrequencies) {
        std::vector<Term> terms = inbound_routes(incoming[inst.hub_node(h)], -1.0, f);
        for (int d = 0; d < inst.num_devices(); ++d) terms.push_back({idx.storage(h, d, f), 1.0});
        m.add_constraint("C5_" + inst.hubs[h] + "_" + freq_label(f), std::move(terms),
                         Sense::equal, 0.0);
      }
    for (int c = 0; c < inst.num_clinics(); ++c) {
      std::vector<Term> terms;
      for (int a : incoming[inst.clinic_node(c)]) terms.push_back({idx.flow(a), 1.0});
      m.add_constraint("C6_" + inst.clinics[c], std::move(terms), Sense::equal,
                       inst.demand[c]);
    }
    for (int h = 0; h < inst.num_hubs(); ++h) {
      std::vector<Term> terms;
      for (int a : incoming[inst.hub_node(h)]) terms.push_back({idx.flow(a), 1.0});
      for (int a : outgoing[inst.hub_node(h)]) terms.push_back({idx.flow(a), -1.0});
      m.add_constraint("C7_" + inst.hubs[h], std::move(terms), Sense::equal, 0.0);
    }
    for (int a = 0; a < inst.num_arcs(); ++a) {
      const Arc& arc = inst.arcs[a];
      std::vector<Term> terms;
      for (int k = 0; k < inst.num_modes(); ++k)
        for (Frequency f : kFrequencies)
          if (auto y = idx.route(a, k, f))
            terms.push_back({*y, inst.vehicle_capacity[k] * trips_per_year(f)});
      terms.push_back({idx.flow(a), -1.0});
      m.add_constraint("C8_" + inst.node_id(arc.from) + "_" + inst.node_id(arc.to),
                       std::move(terms), Sense::greater_equal, 0.0);
    }
    for (int h = 0; h < inst.num_hubs(); ++h) {
      std::vector<Term> terms;
      for (int d = 0; d < inst.num_devices(); ++d)
        for (Frequency f : kFrequencies)
          terms.push_back({idx.storage(h, d, f), inst.device_capacity[d] * trips_per_year(f)});
      for (int a : incoming[inst.hub_node(h)]) terms.push_back({idx.flow(a), -inst.buffer_factor});
      m.add_constraint("C9_" + inst.hubs[h], std::move(terms), Sense::greater_equal, 0.0);
    }
  }
};

Program1 build_program1(const Instance& inst) {
  return Program1Builder{inst, {}}.build();
}

std::vector<int> expected_family_counts(const Instance& inst) {
  const int H = inst.num_hubs(), C = inst.num_clinics();
  return {C, H, H, 2 * H, C, H, inst.num_arcs(), H};
}

std::vector<int> family_counts(const MipModel& model) {
  std::vector<int> counts(std::size(kFamilies), 0);
  for (const auto& row : model.constraints()) {
    const std::string fam = family_of(row.name);
    for (std::size_t k = 0; k < std::size(kFamilies); ++k)
      if (fam == kFamilies[k]) ++counts[k];
  }
  return counts;
}

bool is_restriction(const mip::Constraint& row) {
  return row.name.starts_with("RF_") || row.name.starts_with("RL_");
}

MipModel remove_restrictions(const MipModel& model) {
  MipModel copy = model;
  copy.remove_constraints_if(is_restriction);
  return copy;
}

namespace {

void check_length(const VarIndex& idx, std::size_t n) {
  if (n != static_cast<std::size_t>(idx.num_hubs()))
    throw std::invalid_argument("restriction vector has " + std::to_string(n) +
                                " entries, expected " + std::to_string(idx.num_hubs()));
}

std::vector<Term> storage_terms(const VarIndex& idx, int hub, std::optional<Frequency> only) {
  std::vector<Term> terms;
  for (int d = 0; d < idx.num_devices(); ++d)
    for (Frequency f : kFrequencies)
      if (!only || f == *only) terms.push_back({idx.storage(hub, d, f), 1.0});
  return terms;
}

}  // namespace

MipModel restrict_frequencies(const MipModel& model, const VarIndex& idx,
                              std::span<const int> frequencies, ClosedHubRule rule) {
  check_length(idx, frequencies.size());
  for (int v : frequencies)
    if (v < 0 || v > 2)
      throw std::invalid_argument("frequency entry " + std::to_string(v) + " not in {0, 1, 2}");
  MipModel out = model;
  for (int h = 0; h < idx.num_hubs(); ++h) {
    std::vector<Term> terms;
    switch (frequencies[h]) {
      case 0:
        if (rule == ClosedHubRule::free) continue;
        terms = storage_terms(idx, h, std::nullopt);
        break;
      case 1: terms = storage_terms(idx, h, Frequency::quarterly); break;
      case 2: terms = storage_terms(idx, h, Frequency::monthly); break;
    }
    out.add_constraint("RF_" + idx.hub_id(h), std::move(terms), Sense::equal, 0.0);
  }
  return out;
}

MipModel restrict_locations(const MipModel& model, const VarIndex& idx,
                            std::span<const int> locations) {
  check_length(idx, locations.size());
  for (int v : locations)
    if (v != 0 && v != 1)
      throw std::invalid_argument("location entry " + std::to_string(v) + " not in {0, 1}");
  MipModel out = model;
  for (int h = 0; h < idx.num_hubs(); ++h)
    out.add_constraint("RL_" + idx.hub_id(h), storage_terms(idx, h, std::nullopt),
                       Sense::equal, locations[h]);
  return out;
}

InfeasibleSolution::InfeasibleSolution(std::vector<ConstraintViolation> violations)
    : std::runtime_error([&] {
        std::string msg = "solution violates " + std::to_string(violations.size()) + " row(s)";
        for (std::size_t k = 0; k < violations.size() && k < 5; ++k)
          msg += (k ? ", " : ": ") + violations[k].row;
        return msg;
      }()),
      violations_(std::move(violations)) {}

NetworkSolution decode_solution(const Instance& inst, const VarIndex& idx,
                                std::span<const double> x, double tolerance) {
  const int n = static_cast<int>(idx.num_binaries() + idx.num_continuous());
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("solution vector has " + std::to_string(x.size()) +
                                " entries, model has " + std::to_string(n));

  // The model is rebuilt here so the check always runs against the
  // unrestricted rows.
  const Program1 p = build_program1(inst);
  std::vector<double> v(x.begin(), x.end());
  std::vector<ConstraintViolation> bad;
  for (int j = 0; j < n; ++j) {
    const auto& var = p.model.variable(j);
    if (var.kind == mip::VarKind::binary) {
      if (std::abs(v[j] - std::round(v[j])) > tolerance || v[j] < -tolerance ||
          v[j] > 1.0 + tolerance)
        bad.push_back({"integrality", var.name, v[j]});
      v[j] = std::clamp(std::round(v[j]), 0.0, 1.0);
    } else if (v[j] < -tolerance) {
      bad.push_back({"bounds", var.name, -v[j]});
    }
  }
  for (int i = 0; i < p.model.num_constraints(); ++i) {
    const double r = p.model.row_violation(i, v);
    if (r > tolerance) {
      const auto& row = p.model.constraint(i);
      bad.push_back({family_of(row.name), row.name, r});
    }
  }
  if (!bad.empty()) throw InfeasibleSolution(std::move(bad));

  NetworkSolution sol;
  sol.clinics.resize(inst.num_clinics());
  sol.hubs.resize(inst.num_hubs());
  sol.flows.resize(inst.num_arcs());
  for (int j = 0; j < n; ++j) {
    const VarRef& r = idx.ref(j);
    if (r.kind == VarRef::Kind::flow) {
      sol.flows[r.arc] = std::max(0.0, v[j]);
      continue;
    }
    if (v[j] < 0.5) continue;
    if (r.kind == VarRef::Kind::route) {
      const Arc& arc = inst.arcs[r.arc];
      if (inst.is_clinic(arc.to)) {
        sol.clinics[inst.clinic_of(arc.to)] = {arc.from, r.mode};
      } else {
        HubPlan& hp = sol.hubs[inst.hub_of(arc.to)];
        hp.source = arc.from;
        hp.mode = r.mode;
      }
    } else {
      HubPlan& hp = sol.hubs[r.hub];
      hp.open = true;
      hp.device = r.device;
      hp.frequency = r.frequency;
    }
  }
  const CostBreakdown cost = assignment_cost(inst, sol);
  sol.facility_cost = cost.facility;
  sol.transport_cost = cost.transport;
  return sol;
}

std::vector<double> encode_solution(const Instance& inst, const VarIndex& idx,
                                    const NetworkSolution& sol) {
  std::vector<double> x(idx.num_binaries() + idx.num_continuous(), 0.0);
  const ArcTable table(inst);
  for (int a = 0; a < inst.num_arcs() && a < static_cast<int>(sol.flows.size()); ++a)
    x[idx.flow(a)] = sol.flows[a];
  for (int c = 0; c < inst.num_clinics() && c < static_cast<int>(sol.clinics.size()); ++c) {
    const ClinicSupply& s = sol.clinics[c];
    if (s.source < 0 || s.mode < 0) continue;
    if (auto a = table.find(s.source, inst.clinic_node(c)))
      if (auto y = idx.route(*a, s.mode, Frequency::monthly)) x[*y] = 1.0;
  }
  for (int h = 0; h < inst.num_hubs() && h < static_cast<int>(sol.hubs.size()); ++h) {
    const HubPlan& hp = sol.hubs[h];
    if (!hp.open) continue;
    if (hp.device >= 0) x[idx.storage(h, hp.device, hp.frequency)] = 1.0;
    if (hp.source < 0 || hp.mode < 0) continue;
    if (auto a = table.find(hp.source, inst.hub_node(h)))
      if (auto y = idx.route(*a, hp.mode, hp.frequency)) x[*y] = 1.0;
  }
  return x;
}

std::vector<int> branching_priorities(const Instance& inst, const VarIndex& idx) {
  std::vector<int> priority(idx.num_binaries() + idx.num_continuous(), 0);
  for (std::size_t j = 0; j < priority.size(); ++j) {
    const VarRef& r = idx.ref(static_cast<int>(j));
    if (r.kind == VarRef::Kind::storage)
      priority[j] = 2;
    else if (r.kind == VarRef::Kind::route && inst.is_hub(inst.arcs[r.arc].to))
      priority[j] = 1;
  }
  return priority;
}

std::vector<mip::Constraint> linking_cuts(const Instance& inst, const VarIndex& idx) {
  std::vector<mip::Constraint> cuts;
  for (int a = 0; a < inst.num_arcs(); ++a) {
    const Arc& arc = inst.arcs[a];
    if (!inst.is_hub(arc.from) || !inst.is_clinic(arc.to)) continue;
    const int h = arc.from - 1;
    const int c = arc.to - inst.num_hubs() - 1;
    if (!(inst.demand[c] > 0.0)) continue;  // may hang off a closed hub
    mip::Constraint row;
    row.name = "K_" + inst.hubs[h] + "_" + inst.clinics[c];
    row.sense = Sense::less_equal;
    for (int k = 0; k < inst.num_modes(); ++k)
      row.terms.push_back({*idx.route(a, k, Frequency::monthly), 1.0});
    for (int d = 0; d < inst.num_devices(); ++d)
      for (Frequency f : kFrequencies) row.terms.push_back({idx.storage(h, d, f), -1.0});
    cuts.push_back(std::move(row));
  }
  // Frequency-mixed capacity: the hub's inflow fits the storage of one
  // frequency or the vehicles of the other, since only one is in use.
  const auto incoming = inst.incoming_arcs();
  for (int h = 0; h < inst.num_hubs(); ++h)
    for (Frequency fs : kFrequencies) {
      const Frequency fv = fs == Frequency::monthly ? Frequency::quarterly : Frequency::monthly;
      mip::Constraint row;
      row.name = "KF_" + inst.hubs[h] + "_" + freq_label(fs);
      row.sense = Sense::less_equal;
      for (int a : incoming[inst.hub_node(h)]) {
        row.terms.push_back({idx.flow(a), 1.0});
        for (int k = 0; k < inst.num_modes(); ++k)
          row.terms.push_back(
              {*idx.route(a, k, fv), -inst.vehicle_capacity[k] * trips_per_year(fv)});
      }
      for (int d = 0; d < inst.num_devices(); ++d)
        row.terms.push_back({idx.storage(h, d, fs), -inst.device_capacity[d] *
                                                        trips_per_year(fs) / inst.buffer_factor});
      cuts.push_back(std::move(row));
    }
  return cuts;
}

std::vector<mip::Constraint> supply_tree_cuts(const Instance& inst, const VarIndex& idx) {
  std::vector<mip::Constraint> cuts;
  const ArcTable table(inst);
  auto routes = [&](int a, std::vector<Term>& terms) {
    for (int k = 0; k < inst.num_modes(); ++k)
      for (Frequency f : kFrequencies) terms.push_back({*idx.route(a, k, f), 1.0});
  };
  for (int h = 0; h < inst.num_hubs(); ++h)
    for (int g = 0; g < inst.num_hubs(); ++g) {
      const auto hg = table.find(inst.hub_node(h), inst.hub_node(g));
      if (!hg) continue;
      mip::Constraint row;
      row.name = "KT_" + inst.hubs[h] + "_" + inst.hubs[g];
      row.sense = Sense::less_equal;
      routes(*hg, row.terms);
      for (int d = 0; d < inst.num_devices(); ++d)
        for (Frequency f : kFrequencies) row.terms.push_back({idx.storage(h, d, f), -1.0});
      cuts.push_back(std::move(row));
      const auto gh = table.find(inst.hub_node(g), inst.hub_node(h));
      if (g <= h || !gh) continue;
      mip::Constraint pair;
      pair.name = "KC_" + inst.hubs[h] + "_" + inst.hubs[g];
      pair.sense = Sense::less_equal;
      pair.rhs = 1.0;
      routes(*hg, pair.terms);
      routes(*gh, pair.terms);
      cuts.push_back(std::move(pair));
    }
  return cuts;
}

namespace {

struct HubCapacity {
  struct Served {
    double demand = 0.0;
    std::vector<int> routes;  // Y_{h,c,m,1} over modes
  };
  std::vector<Served> clinics;
  std::vector<std::pair<int, double>> storage;  // (Z id, S_d n_f)
  std::vector<std::pair<int, double>> inbound;  // (Y id, V_m n_f)
};

std::vector<HubCapacity> hub_capacities(const Instance& inst, const VarIndex& idx) {
  std::vector<HubCapacity> hubs(inst.num_hubs());
  for (int h = 0; h < inst.num_hubs(); ++h)
    for (int d = 0; d < inst.num_devices(); ++d)
      for (Frequency f : kFrequencies)
        hubs[h].storage.push_back(
            {idx.storage(h, d, f), inst.device_capacity[d] * trips_per_year(f)});
  for (int a = 0; a < inst.num_arcs(); ++a) {
    const Arc& arc = inst.arcs[a];
    if (inst.is_hub(arc.to)) {
      for (int k = 0; k < inst.num_modes(); ++k)
        for (Frequency f : kFrequencies)
          hubs[arc.to - 1].inbound.push_back(
              {*idx.route(a, k, f), inst.vehicle_capacity[k] * trips_per_year(f)});
    } else if (inst.is_hub(arc.from)) {
      HubCapacity::Served s;
      s.demand = inst.demand[arc.to - inst.num_hubs() - 1];
      if (!(s.demand > 0.0)) continue;
      for (int k = 0; k < inst.num_modes(); ++k) s.routes.push_back(*idx.route(a, k, Frequency::monthly));
      hubs[arc.from - 1].clinics.push_back(std::move(s));
    }
  }
  return hubs;
}

// Best greedy cover for one hub and one resource, or nullopt.
std::optional<mip::Constraint> cover_cut(const HubCapacity& hub,
                                         const std::vector<std::pair<int, double>>& supply,
                                         double scale, std::span<const double> x) {
  std::vector<std::pair<double, int>> order;  // (y, clinic)
  for (int c = 0; c < static_cast<int>(hub.clinics.size()); ++c) {
    double y = 0.0;
    for (int id : hub.clinics[c].routes) y += x[id];
    if (y > 1e-6) order.push_back({y, c});
  }
  std::sort(order.begin(), order.end(), std::greater<>());
  double total = 0.0, served = 0.0, best_violation = 0.0;
  int best_size = 0;
  for (int k = 0; k < static_cast<int>(order.size()); ++k) {
    const double a = hub.clinics[order[k].second].demand * scale;
    total += a;
    served += a * order[k].first;
    double cover = 0.0;
    for (const auto& [id, cap] : supply) cover += std::min(cap, total) * x[id];
    const double violation = served - cover;
    if (violation > best_violation) {
      best_violation = violation;
      best_size = k + 1;
    }
  }
  if (best_violation <= 1e-6 * std::max(1.0, served)) return std::nullopt;
  mip::Constraint row;
  row.sense = Sense::less_equal;
  double cap_total = 0.0;
  for (int k = 0; k < best_size; ++k) {
    const auto& c = hub.clinics[order[k].second];
    cap_total += c.demand * scale;
    for (int id : c.routes) row.terms.push_back({id, c.demand * scale});
  }
  for (const auto& [id, cap] : supply) row.terms.push_back({id, -std::min(cap, cap_total)});
  return row;
}

}  // namespace

std::function<std::vector<mip::Constraint>(std::span<const double>)> capacity_separator(
    const Instance& inst, const VarIndex& idx) {
  return [hubs = hub_capacities(inst, idx), buffer = inst.buffer_factor](std::span<const double> x) {
    std::vector<mip::Constraint> cuts;
    for (const HubCapacity& hub : hubs) {
      if (auto cut = cover_cut(hub, hub.storage, buffer, x)) cuts.push_back(std::move(*cut));
      if (auto cut = cover_cut(hub, hub.inbound, 1.0, x)) cuts.push_back(std::move(*cut));
    }
    return cuts;
  };
}

std::optional<NetworkSolution> direct_supply_solution(const Instance& inst) {
  NetworkSolution sol;
  sol.clinics.resize(inst.num_clinics());
  sol.hubs.resize(inst.num_hubs());
  sol.flows.assign(inst.num_arcs(), 0.0);
  const ArcTable table(inst);
  for (int c = 0; c < inst.num_clinics(); ++c) {
    const auto a = table.find(kStore, inst.clinic_node(c));
    if (!a) return std::nullopt;
    int best = -1;
    for (int m = 0; m < inst.num_modes(); ++m) {
      if (inst.demand[c] > 12.0 * inst.vehicle_capacity[m]) continue;
      if (best < 0 || inst.transport_cost[*a][m] < inst.transport_cost[*a][best]) best = m;
    }
    if (best < 0) return std::nullopt;
    sol.clinics[c] = {kStore, best};
    sol.flows[*a] = inst.demand[c];
  }
  const CostBreakdown cost = assignment_cost(inst, sol);
  sol.facility_cost = cost.facility;
  sol.transport_cost = cost.transport;
  return sol;
}

}  // namespace vaxnet
