#include "vaxnet/instance_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace vaxnet {

using nlohmann::json;

namespace {

constexpr const char* kRequiredKeys[] = {
    "hubs",           "clinics",         "modes",
    "devices",        "arcs",            "demand",
    "vehicle_capacity", "device_capacity", "transport_cost",
    "facility_cost",  "buffer_factor"};

std::string join_key(std::initializer_list<std::string_view> parts) {
  std::string out;
  for (auto p : parts) {
    if (!out.empty()) out += ',';
    out += p;
  }
  return out;
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ParseError("instance field '" + field + "': " + what);
}

std::vector<std::string> read_ids(const json& doc, const char* field) {
  const json& arr = doc.at(field);
  if (!arr.is_array()) fail(field, "expected an array of identifiers");
  std::vector<std::string> ids;
  ids.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string())
      fail(field, "entry " + std::to_string(i) + " is not a string");
    ids.push_back(arr[i].get<std::string>());
  }
  return ids;
}

double read_number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

// Reads an object keyed by the given labels; every label must be present and
// no other key may appear.
template <typename Store>
void read_keyed(const json& doc, const char* field,
                const std::vector<std::string>& labels, Store store) {
  const json& obj = doc.at(field);
  if (!obj.is_object()) fail(field, "expected an object");
  std::map<std::string, std::size_t> wanted;
  for (std::size_t i = 0; i < labels.size(); ++i) wanted.emplace(labels[i], i);
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!wanted.count(it.key())) fail(field, "unknown key '" + it.key() + "'");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = obj.find(labels[i]);
    if (it == obj.end()) fail(field, "missing key '" + labels[i] + "'");
    store(i, read_number(*it, std::string(field) + "." + labels[i]));
  }
}

std::string position_context(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  json doc;
  doc["hubs"] = inst.hubs;
  doc["clinics"] = inst.clinics;
  doc["modes"] = inst.modes;
  doc["devices"] = inst.devices;
  json arcs = json::array();
  for (const Arc& a : inst.arcs)
    arcs.push_back({inst.node_id(a.from), inst.node_id(a.to)});
  doc["arcs"] = std::move(arcs);

  json demand = json::object();
  for (int c = 0; c < inst.num_clinics(); ++c)
    demand[inst.clinics[c]] = inst.demand[c];
  doc["demand"] = std::move(demand);

  json vcap = json::object();
  for (int m = 0; m < inst.num_modes(); ++m)
    vcap[inst.modes[m]] = inst.vehicle_capacity[m];
  doc["vehicle_capacity"] = std::move(vcap);

  json scap = json::object();
  for (int d = 0; d < inst.num_devices(); ++d)
    scap[inst.devices[d]] = inst.device_capacity[d];
  doc["device_capacity"] = std::move(scap);

  json tcost = json::object();
  for (int a = 0; a < inst.num_arcs(); ++a)
    for (int m = 0; m < inst.num_modes(); ++m)
      tcost[join_key({inst.node_id(inst.arcs[a].from),
                      inst.node_id(inst.arcs[a].to), inst.modes[m]})] =
          inst.transport_cost[a][m];
  doc["transport_cost"] = std::move(tcost);

  json fcost = json::object();
  for (int h = 0; h < inst.num_hubs(); ++h)
    for (int d = 0; d < inst.num_devices(); ++d)
      fcost[join_key({inst.hubs[h], inst.devices[d]})] =
          inst.facility_cost[h][d];
  doc["facility_cost"] = std::move(fcost);

  doc["buffer_factor"] = inst.buffer_factor;

  if (!inst.coordinates.empty()) {
    json coords = json::object();
    for (NodeIndex v = 0; v < inst.num_nodes(); ++v)
      coords[inst.node_id(v)] = {inst.coordinates[v].x, inst.coordinates[v].y};
    doc["coordinates"] = std::move(coords);
  }
  return doc.dump(1) + "\n";
}

Instance instance_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("malformed instance JSON at " +
                     position_context(text, e.byte == 0 ? 0 : e.byte - 1) +
                     ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("instance JSON must be an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const bool known =
        it.key() == "coordinates" ||
        std::any_of(std::begin(kRequiredKeys), std::end(kRequiredKeys),
                    [&](const char* k) { return it.key() == k; });
    if (!known) throw ParseError("unknown instance key '" + it.key() + "'");
  }
  for (const char* key : kRequiredKeys)
    if (!doc.contains(key))
      throw ParseError("instance is missing required field '" +
                       std::string(key) + "'");

  Instance inst;
  inst.hubs = read_ids(doc, "hubs");
  inst.clinics = read_ids(doc, "clinics");
  inst.modes = read_ids(doc, "modes");
  inst.devices = read_ids(doc, "devices");

  // Identifier problems make every keyed field ambiguous, so stop here.
  {
    auto violations = validate_instance(inst);
    std::erase_if(violations, [](const InstanceViolation& v) {
      return v.code != InstanceIssue::duplicate_id &&
             v.code != InstanceIssue::invalid_id &&
             v.code != InstanceIssue::reserved_id;
    });
    if (!violations.empty()) throw InstanceError(std::move(violations));
  }

  std::vector<InstanceViolation> endpoint_errors;
  const json& arcs = doc.at("arcs");
  if (!arcs.is_array()) fail("arcs", "expected an array of [from, to] pairs");
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const json& pair = arcs[i];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
        !pair[1].is_string())
      fail("arcs", "entry " + std::to_string(i) +
                       " must be a [from, to] pair of identifiers");
    const auto from_id = pair[0].get<std::string>();
    const auto to_id = pair[1].get<std::string>();
    auto from = inst.find_node(from_id);
    auto to = inst.find_node(to_id);
    if (!from || !to) {
      endpoint_errors.push_back({InstanceIssue::unknown_endpoint,
                                 from_id + "," + to_id, "arc endpoint missing"});
      continue;
    }
    inst.arcs.push_back({*from, *to});
  }
  if (!endpoint_errors.empty()) throw InstanceError(std::move(endpoint_errors));

  inst.demand.assign(inst.clinics.size(), 0.0);
  read_keyed(doc, "demand", inst.clinics,
             [&](std::size_t i, double v) { inst.demand[i] = v; });
  inst.vehicle_capacity.assign(inst.modes.size(), 0.0);
  read_keyed(doc, "vehicle_capacity", inst.modes,
             [&](std::size_t i, double v) { inst.vehicle_capacity[i] = v; });
  inst.device_capacity.assign(inst.devices.size(), 0.0);
  read_keyed(doc, "device_capacity", inst.devices,
             [&](std::size_t i, double v) { inst.device_capacity[i] = v; });

  {
    std::vector<std::string> labels;
    labels.reserve(inst.arcs.size() * inst.modes.size());
    for (const Arc& a : inst.arcs)
      for (const auto& m : inst.modes)
        labels.push_back(
            join_key({inst.node_id(a.from), inst.node_id(a.to), m}));
    const std::size_t nm = inst.modes.size();
    inst.transport_cost.assign(inst.arcs.size(), std::vector<double>(nm));
    // Duplicate arcs produce duplicate labels; the validator reports those.
    std::set<std::string> unique(labels.begin(), labels.end());
    if (unique.size() == labels.size()) {
      read_keyed(doc, "transport_cost", labels, [&](std::size_t i, double v) {
        inst.transport_cost[i / nm][i % nm] = v;
      });
    }
  }
  {
    std::vector<std::string> labels;
    for (const auto& h : inst.hubs)
      for (const auto& d : inst.devices) labels.push_back(join_key({h, d}));
    const std::size_t nd = inst.devices.size();
    inst.facility_cost.assign(inst.hubs.size(), std::vector<double>(nd));
    read_keyed(doc, "facility_cost", labels, [&](std::size_t i, double v) {
      inst.facility_cost[i / nd][i % nd] = v;
    });
  }
  inst.buffer_factor = read_number(doc.at("buffer_factor"), "buffer_factor");

  if (auto it = doc.find("coordinates"); it != doc.end()) {
    if (!it->is_object()) fail("coordinates", "expected an object");
    inst.coordinates.resize(inst.num_nodes());
    for (auto c = it->begin(); c != it->end(); ++c)
      if (!inst.find_node(c.key()))
        fail("coordinates", "unknown node '" + c.key() + "'");
    for (NodeIndex v = 0; v < inst.num_nodes(); ++v) {
      auto c = it->find(inst.node_id(v));
      if (c == it->end())
        fail("coordinates", "missing node '" + inst.node_id(v) + "'");
      if (!c->is_array() || c->size() != 2 || !(*c)[0].is_number() ||
          !(*c)[1].is_number())
        fail("coordinates", "node '" + inst.node_id(v) + "' needs [x, y]");
      inst.coordinates[v] = {(*c)[0].get<double>(), (*c)[1].get<double>()};
    }
  }

  require_valid(inst);
  return inst;
}

Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open instance file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return instance_from_json(buffer.str());
}

void write_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write instance file " + path.string());
  out << instance_to_json(inst);
  if (!out) throw IoError("failed writing " + path.string());
}

std::string instance_fingerprint(const Instance& inst) {
  // FNV-1a over the canonical serialization.
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char ch : instance_to_json(inst)) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace vaxnet
