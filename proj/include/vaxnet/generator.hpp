#ifndef VAXNET_GENERATOR_HPP
#define VAXNET_GENERATOR_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "vaxnet/instance.hpp"

namespace vaxnet {

enum class Density { sparse, moderate, dense };
enum class ArcPolicy { complete, distance_cutoff };

std::string_view to_string(Density d);
std::optional<Density> parse_density(std::string_view text);
std::string_view to_string(ArcPolicy p);
std::optional<ArcPolicy> parse_arc_policy(std::string_view text);

/// Parameters of the synthetic instance generator. Distances are in the
/// units of `region_side`, volumes in litres, costs in currency units.
struct GeneratorConfig {
  std::uint64_t seed = 1;
  int n_hubs = 3;
  int n_clinics = 20;
  Density density = Density::moderate;
  int n_modes = 2;
  int n_devices = 2;
  double region_side = 200.0;
  double volume_scale = 60.0;       // mean annual clinic volume, sparse class
  double mode_cost_per_km = 0.4;    // per-km cost of the smallest mode
  double trip_fixed_cost = 3.0;     // fixed cost per round trip, smallest mode
  double device_cost_scale = 9.0;   // facility cost per litre^0.7 of storage
  ArcPolicy arc_policy = ArcPolicy::complete;
  double cutoff_radius = 0.0;       // only with distance_cutoff

  friend bool operator==(const GeneratorConfig&,
                         const GeneratorConfig&) = default;
};

/// Throws std::invalid_argument describing the first bad field.
void check_config(const GeneratorConfig& cfg);

/// Builds a deterministic instance from `cfg`. The result always passes
/// validate_instance. Throws std::invalid_argument for bad configs and
/// InstanceError(UnreachableClinic) when a distance cutoff isolates a clinic.
Instance generate_instance(const GeneratorConfig& cfg);

/// Config files use the field names above as JSON keys; absent keys keep
/// their defaults, unknown keys are rejected (ParseError).
GeneratorConfig generator_config_from_json(std::string_view text);
GeneratorConfig read_generator_config(const std::filesystem::path& path);
std::string generator_config_to_json(const GeneratorConfig& cfg);

}  // namespace vaxnet

#endif  // VAXNET_GENERATOR_HPP
