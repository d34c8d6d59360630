#include "vaxnet/generator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace vaxnet {

namespace {

// Draws are built from raw engine output so that generated bytes do not
// depend on the standard library's distribution implementations.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int index(int n) {
    return std::min(n - 1, static_cast<int>(uniform() * n));
  }
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

double round_to(double v, double quantum) {
  return std::round(v / quantum) * quantum;
}

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct DensityProfile {
  double clustered_share;   // clinics drawn around a hub
  double cluster_spread;    // std-dev as a fraction of the region side
  double demand_low;        // demand multiplier range
  double demand_high;
};

DensityProfile profile(Density d) {
  switch (d) {
    case Density::sparse: return {0.0, 0.0, 0.5, 1.5};
    case Density::moderate: return {0.5, 0.15, 1.0, 3.0};
    case Density::dense: return {0.85, 0.07, 2.0, 6.0};
  }
  return {};
}

}  // namespace

std::string_view to_string(Density d) {
  switch (d) {
    case Density::sparse: return "sparse";
    case Density::moderate: return "moderate";
    case Density::dense: return "dense";
  }
  return "?";
}

std::optional<Density> parse_density(std::string_view text) {
  if (text == "sparse") return Density::sparse;
  if (text == "moderate") return Density::moderate;
  if (text == "dense") return Density::dense;
  return std::nullopt;
}

std::string_view to_string(ArcPolicy p) {
  return p == ArcPolicy::complete ? "complete" : "distance-cutoff";
}

std::optional<ArcPolicy> parse_arc_policy(std::string_view text) {
  if (text == "complete") return ArcPolicy::complete;
  if (text == "distance-cutoff" || text == "cutoff")
    return ArcPolicy::distance_cutoff;
  return std::nullopt;
}

void check_config(const GeneratorConfig& cfg) {
  auto bad = [](const std::string& what) {
    throw std::invalid_argument("generator config: " + what);
  };
  if (cfg.n_hubs < 0) bad("n_hubs must be >= 0");
  if (cfg.n_clinics < 0) bad("n_clinics must be >= 0");
  if (cfg.n_modes < 1) bad("n_modes must be >= 1");
  if (cfg.n_devices < 0) bad("n_devices must be >= 0");
  if (!(cfg.region_side > 0.0)) bad("region_side must be positive");
  if (!(cfg.volume_scale > 0.0)) bad("volume_scale must be positive");
  if (!(cfg.mode_cost_per_km >= 0.0)) bad("mode_cost_per_km must be >= 0");
  if (!(cfg.trip_fixed_cost >= 0.0)) bad("trip_fixed_cost must be >= 0");
  if (!(cfg.device_cost_scale >= 0.0)) bad("device_cost_scale must be >= 0");
  if (cfg.arc_policy == ArcPolicy::distance_cutoff && !(cfg.cutoff_radius > 0.0))
    bad("cutoff_radius must be positive for the distance-cutoff policy");
}

Instance generate_instance(const GeneratorConfig& cfg) {
  check_config(cfg);
  Sampler rng(cfg.seed);
  const DensityProfile prof = profile(cfg.density);
  const double side = cfg.region_side;

  Instance inst;
  for (int h = 0; h < cfg.n_hubs; ++h) inst.hubs.push_back("h" + std::to_string(h + 1));
  for (int c = 0; c < cfg.n_clinics; ++c)
    inst.clinics.push_back("c" + std::to_string(c + 1));
  for (int m = 0; m < cfg.n_modes; ++m) inst.modes.push_back("m" + std::to_string(m + 1));
  for (int d = 0; d < cfg.n_devices; ++d)
    inst.devices.push_back("d" + std::to_string(d + 1));

  // Geography: store at the centroid, or near a corner for sparse regions.
  inst.coordinates.resize(inst.num_nodes());
  inst.coordinates[kStore] = cfg.density == Density::sparse
                                 ? Point{0.05 * side, 0.05 * side}
                                 : Point{0.5 * side, 0.5 * side};
  for (int h = 0; h < cfg.n_hubs; ++h)
    inst.coordinates[inst.hub_node(h)] = {rng.uniform(0.1, 0.9) * side,
                                          rng.uniform(0.1, 0.9) * side};
  for (int c = 0; c < cfg.n_clinics; ++c) {
    Point p;
    if (cfg.n_hubs > 0 && rng.uniform() < prof.clustered_share) {
      const Point centre = inst.coordinates[inst.hub_node(rng.index(cfg.n_hubs))];
      p = {centre.x + rng.normal() * prof.cluster_spread * side,
           centre.y + rng.normal() * prof.cluster_spread * side};
    } else {
      p = {rng.uniform() * side, rng.uniform() * side};
    }
    p.x = std::clamp(p.x, 0.0, side);
    p.y = std::clamp(p.y, 0.0, side);
    inst.coordinates[inst.clinic_node(c)] = {round_to(p.x, 0.01),
                                             round_to(p.y, 0.01)};
  }
  for (auto& p : inst.coordinates) p = {round_to(p.x, 0.01), round_to(p.y, 0.01)};

  for (int c = 0; c < cfg.n_clinics; ++c)
    inst.demand.push_back(round_to(
        cfg.volume_scale * rng.uniform(prof.demand_low, prof.demand_high), 0.1));

  // Vehicles range from a clinic courier to a truck sized for a quarterly
  // delivery to an average hub; storage devices from a small refrigerator to
  // a cold room holding an average hub's quarterly stock.
  const double total_demand =
      std::accumulate(inst.demand.begin(), inst.demand.end(), 0.0);
  const double max_demand =
      inst.demand.empty() ? cfg.volume_scale
                          : *std::max_element(inst.demand.begin(), inst.demand.end());
  const double hub_throughput =
      std::max(total_demand / std::max(1, cfg.n_hubs), max_demand);
  const double small_vehicle = 1.1 * max_demand / 12.0;
  const double large_vehicle =
      std::max(small_vehicle, 1.5 * hub_throughput / 4.0);
  std::vector<double> vehicle_cost_factor;
  for (int m = 0; m < cfg.n_modes; ++m) {
    const double t = cfg.n_modes == 1 ? 1.0 : double(m) / (cfg.n_modes - 1);
    const double cap = small_vehicle * std::pow(large_vehicle / small_vehicle, t);
    inst.vehicle_capacity.push_back(round_to(std::max(cap, 0.1), 0.1));
    vehicle_cost_factor.push_back(std::pow(cap / small_vehicle, 0.4));
  }

  const double small_store = 0.8 * inst.buffer_factor * hub_throughput / 12.0;
  const double large_store = 1.5 * inst.buffer_factor * hub_throughput / 4.0;
  for (int d = 0; d < cfg.n_devices; ++d) {
    const double t = cfg.n_devices == 1 ? 0.5 : double(d) / (cfg.n_devices - 1);
    inst.device_capacity.push_back(
        round_to(std::max(small_store * std::pow(large_store / small_store, t), 0.1), 0.1));
  }
  inst.facility_cost.assign(cfg.n_hubs, {});
  for (int h = 0; h < cfg.n_hubs; ++h) {
    const double site = rng.uniform(0.85, 1.15);
    for (int d = 0; d < cfg.n_devices; ++d)
      inst.facility_cost[h].push_back(round_to(
          cfg.device_cost_scale * std::pow(inst.device_capacity[d], 0.7) * site,
          0.01));
  }

  // Arcs: store to everything, hub to hub, hub to clinic.
  auto within = [&](NodeIndex a, NodeIndex b) {
    return cfg.arc_policy == ArcPolicy::complete ||
           distance(inst.coordinates[a], inst.coordinates[b]) <= cfg.cutoff_radius;
  };
  for (int h = 0; h < cfg.n_hubs; ++h) inst.arcs.push_back({kStore, inst.hub_node(h)});
  for (int c = 0; c < cfg.n_clinics; ++c)
    if (within(kStore, inst.clinic_node(c)))
      inst.arcs.push_back({kStore, inst.clinic_node(c)});
  for (int i = 0; i < cfg.n_hubs; ++i)
    for (int j = 0; j < cfg.n_hubs; ++j)
      if (i != j && within(inst.hub_node(i), inst.hub_node(j)))
        inst.arcs.push_back({inst.hub_node(i), inst.hub_node(j)});
  for (int h = 0; h < cfg.n_hubs; ++h)
    for (int c = 0; c < cfg.n_clinics; ++c)
      if (within(inst.hub_node(h), inst.clinic_node(c)))
        inst.arcs.push_back({inst.hub_node(h), inst.clinic_node(c)});

  for (const Arc& a : inst.arcs) {
    const double trip_km =
        2.0 * distance(inst.coordinates[a.from], inst.coordinates[a.to]);
    std::vector<double> costs;
    for (int m = 0; m < cfg.n_modes; ++m)
      costs.push_back(round_to(vehicle_cost_factor[m] *
                                   (trip_km * cfg.mode_cost_per_km + cfg.trip_fixed_cost),
                               0.01));
    inst.transport_cost.push_back(std::move(costs));
  }

  auto violations = validate_instance(inst);
  if (!violations.empty()) throw InstanceError(std::move(violations));
  return inst;
}

namespace {

using nlohmann::json;

void assign_field(GeneratorConfig& cfg, const std::string& key, const json& v) {
  auto number = [&]() {
    if (!v.is_number()) throw ParseError("generator config '" + key + "' must be a number");
    return v.get<double>();
  };
  auto integer = [&]() {
    if (!v.is_number_integer())
      throw ParseError("generator config '" + key + "' must be an integer");
    return v.get<long long>();
  };
  if (key == "seed") {
    if (!v.is_number_unsigned() && !v.is_number_integer())
      throw ParseError("generator config 'seed' must be an integer");
    cfg.seed = v.get<std::uint64_t>();
  } else if (key == "n_hubs") {
    cfg.n_hubs = static_cast<int>(integer());
  } else if (key == "n_clinics") {
    cfg.n_clinics = static_cast<int>(integer());
  } else if (key == "n_modes") {
    cfg.n_modes = static_cast<int>(integer());
  } else if (key == "n_devices") {
    cfg.n_devices = static_cast<int>(integer());
  } else if (key == "density") {
    auto d = v.is_string() ? parse_density(v.get<std::string>()) : std::nullopt;
    if (!d) throw ParseError("generator config 'density' must be sparse, moderate or dense");
    cfg.density = *d;
  } else if (key == "region_side") {
    cfg.region_side = number();
  } else if (key == "volume_scale") {
    cfg.volume_scale = number();
  } else if (key == "mode_cost_per_km") {
    cfg.mode_cost_per_km = number();
  } else if (key == "trip_fixed_cost") {
    cfg.trip_fixed_cost = number();
  } else if (key == "device_cost_scale") {
    cfg.device_cost_scale = number();
  } else if (key == "arc_policy") {
    auto p = v.is_string() ? parse_arc_policy(v.get<std::string>()) : std::nullopt;
    if (!p) throw ParseError("generator config 'arc_policy' must be complete or distance-cutoff");
    cfg.arc_policy = *p;
  } else if (key == "cutoff_radius") {
    cfg.cutoff_radius = number();
  } else {
    throw ParseError("unknown generator config key '" + key + "'");
  }
}

}  // namespace

GeneratorConfig generator_config_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed generator config: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("generator config must be a JSON object");
  GeneratorConfig cfg;
  for (auto it = doc.begin(); it != doc.end(); ++it) assign_field(cfg, it.key(), *it);
  return cfg;
}

GeneratorConfig read_generator_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open generator config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return generator_config_from_json(buffer.str());
}

std::string generator_config_to_json(const GeneratorConfig& cfg) {
  json doc = {{"seed", cfg.seed},
              {"n_hubs", cfg.n_hubs},
              {"n_clinics", cfg.n_clinics},
              {"density", std::string(to_string(cfg.density))},
              {"n_modes", cfg.n_modes},
              {"n_devices", cfg.n_devices},
              {"region_side", cfg.region_side},
              {"volume_scale", cfg.volume_scale},
              {"mode_cost_per_km", cfg.mode_cost_per_km},
              {"trip_fixed_cost", cfg.trip_fixed_cost},
              {"device_cost_scale", cfg.device_cost_scale},
              {"arc_policy", std::string(to_string(cfg.arc_policy))},
              {"cutoff_radius", cfg.cutoff_radius}};
  return doc.dump(1) + "\n";
}

}  // namespace vaxnet
