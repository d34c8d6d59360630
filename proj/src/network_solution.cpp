#include "vaxnet/network_solution.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace vaxnet {

using nlohmann::json;

int NetworkSolution::open_hub_count() const {
  int n = 0;
  for (const HubPlan& h : hubs) n += h.open ? 1 : 0;
  return n;
}

std::vector<int> NetworkSolution::closed_hubs() const {
  std::vector<int> out;
  for (std::size_t h = 0; h < hubs.size(); ++h)
    if (!hubs[h].open) out.push_back(static_cast<int>(h));
  return out;
}

CostBreakdown assignment_cost(const Instance& inst, const NetworkSolution& sol) {
  CostBreakdown cost;
  const ArcTable table(inst);
  auto trip_cost = [&](NodeIndex from, NodeIndex to, int mode, Frequency f) {
    if (mode < 0 || mode >= inst.num_modes()) return 0.0;
    auto a = table.find(from, to);
    if (!a) return 0.0;
    return trips_per_year(f) * inst.transport_cost[*a][mode];
  };
  for (int c = 0; c < inst.num_clinics() && c < static_cast<int>(sol.clinics.size()); ++c) {
    const ClinicSupply& s = sol.clinics[c];
    cost.transport += trip_cost(s.source, inst.clinic_node(c), s.mode, Frequency::monthly);
  }
  for (int h = 0; h < inst.num_hubs() && h < static_cast<int>(sol.hubs.size()); ++h) {
    const HubPlan& hp = sol.hubs[h];
    if (!hp.open) continue;
    if (hp.device >= 0 && hp.device < inst.num_devices())
      cost.facility += inst.facility_cost[h][hp.device];
    cost.transport += trip_cost(hp.source, inst.hub_node(h), hp.mode, hp.frequency);
  }
  return cost;
}

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw ParseError("solution: " + what);
}

const json& member(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + " is missing '" + key + "'");
  return *it;
}

std::string string_member(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_string()) fail(where + "." + key + " must be a string");
  return v.get<std::string>();
}

int lookup(const std::vector<std::string>& ids, const std::string& id,
           const std::string& where) {
  for (std::size_t k = 0; k < ids.size(); ++k)
    if (ids[k] == id) return static_cast<int>(k);
  fail(where + " refers to unknown identifier '" + id + "'");
}

}  // namespace

std::string solution_to_json(const Instance& inst, const NetworkSolution& sol) {
  json assignments = json::object();
  for (int c = 0; c < inst.num_clinics(); ++c) {
    const ClinicSupply& s = sol.clinics.at(c);
    json entry = json::object();
    if (s.source >= 0) entry["source"] = inst.node_id(s.source);
    if (s.mode >= 0) entry["mode"] = inst.modes[s.mode];
    assignments[inst.clinics[c]] = std::move(entry);
  }
  for (int h = 0; h < inst.num_hubs(); ++h) {
    const HubPlan& hp = sol.hubs.at(h);
    json entry = {{"open", hp.open}};
    if (hp.open) {
      if (hp.source >= 0) entry["source"] = inst.node_id(hp.source);
      if (hp.mode >= 0) entry["mode"] = inst.modes[hp.mode];
      entry["frequency"] = static_cast<int>(hp.frequency);
      if (hp.device >= 0) entry["device"] = inst.devices[hp.device];
    }
    assignments[inst.hubs[h]] = std::move(entry);
  }
  json flows = json::object();
  for (int a = 0; a < inst.num_arcs() && a < static_cast<int>(sol.flows.size()); ++a) {
    if (sol.flows[a] == 0.0) continue;
    const Arc& arc = inst.arcs[a];
    flows[inst.node_id(arc.from) + "," + inst.node_id(arc.to)] = sol.flows[a];
  }
  json doc = {
      {"instance", instance_fingerprint(inst)},
      {"objective", sol.total_cost()},
      {"breakdown", {{"facility", sol.facility_cost}, {"transport", sol.transport_cost}}},
      {"assignments", std::move(assignments)},
      {"flows", std::move(flows)},
  };
  return doc.dump(1) + "\n";
}

NetworkSolution solution_from_json(const Instance& inst, std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("document must be an object");
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.key() != "instance" && it.key() != "objective" && it.key() != "breakdown" &&
        it.key() != "assignments" && it.key() != "flows")
      fail("unknown key '" + it.key() + "'");

  const std::string fp = string_member(doc, "instance", "document");
  if (fp != instance_fingerprint(inst))
    throw SolutionMismatch("solution was computed for instance " + fp +
                           ", not for this instance (" + instance_fingerprint(inst) + ")");

  NetworkSolution sol;
  sol.clinics.resize(inst.num_clinics());
  sol.hubs.resize(inst.num_hubs());
  sol.flows.assign(inst.num_arcs(), 0.0);

  const json& breakdown = member(doc, "breakdown", "document");
  const json& fac = member(breakdown, "facility", "breakdown");
  const json& tr = member(breakdown, "transport", "breakdown");
  if (!fac.is_number() || !tr.is_number()) fail("breakdown entries must be numbers");
  sol.facility_cost = fac.get<double>();
  sol.transport_cost = tr.get<double>();

  const json& assignments = member(doc, "assignments", "document");
  if (!assignments.is_object()) fail("assignments must be an object");
  auto node_of = [&](const std::string& id, const std::string& where) {
    auto v = inst.find_node(id);
    if (!v) fail(where + " refers to unknown node '" + id + "'");
    return *v;
  };
  for (auto it = assignments.begin(); it != assignments.end(); ++it) {
    const std::string where = "assignments." + it.key();
    const NodeIndex v = node_of(it.key(), where);
    const json& e = it.value();
    if (!e.is_object()) fail(where + " must be an object");
    if (inst.is_clinic(v)) {
      ClinicSupply& s = sol.clinics[inst.clinic_of(v)];
      if (e.contains("source")) s.source = node_of(string_member(e, "source", where), where);
      if (e.contains("mode")) s.mode = lookup(inst.modes, string_member(e, "mode", where), where);
    } else if (inst.is_hub(v)) {
      HubPlan& hp = sol.hubs[inst.hub_of(v)];
      const json& open = member(e, "open", where);
      if (!open.is_boolean()) fail(where + ".open must be a boolean");
      hp.open = open.get<bool>();
      if (!hp.open) continue;
      if (e.contains("source")) hp.source = node_of(string_member(e, "source", where), where);
      if (e.contains("mode")) hp.mode = lookup(inst.modes, string_member(e, "mode", where), where);
      if (e.contains("device"))
        hp.device = lookup(inst.devices, string_member(e, "device", where), where);
      const json& f = member(e, "frequency", where);
      if (!f.is_number_integer() || (f.get<int>() != 1 && f.get<int>() != 2))
        fail(where + ".frequency must be 1 or 2");
      hp.frequency = static_cast<Frequency>(f.get<int>());
    } else {
      fail(where + " is not a hub or clinic");
    }
  }

  const json& flows = member(doc, "flows", "document");
  if (!flows.is_object()) fail("flows must be an object");
  const ArcTable table(inst);
  for (auto it = flows.begin(); it != flows.end(); ++it) {
    const std::string& key = it.key();
    const auto comma = key.find(',');
    if (comma == std::string::npos) fail("flow key '" + key + "' is not 'from,to'");
    const NodeIndex from = node_of(key.substr(0, comma), "flows");
    const NodeIndex to = node_of(key.substr(comma + 1), "flows");
    auto a = table.find(from, to);
    if (!a) fail("flow on '" + key + "' uses an arc the instance does not have");
    if (!it.value().is_number()) fail("flow on '" + key + "' must be a number");
    sol.flows[*a] = it.value().get<double>();
  }
  return sol;
}

void write_solution(const Instance& inst, const NetworkSolution& sol,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write solution file " + path.string());
  out << solution_to_json(inst, sol);
  if (!out) throw IoError("failed writing " + path.string());
}

NetworkSolution read_solution(const Instance& inst, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open solution file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return solution_from_json(inst, buf.str());
}

}  // namespace vaxnet
