#ifndef VAXNET_INSTANCE_IO_HPP
#define VAXNET_INSTANCE_IO_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include "vaxnet/instance.hpp"

namespace vaxnet {

// JSON instance files. Keys: hubs, clinics, modes, devices, arcs, demand,
// vehicle_capacity, device_capacity, transport_cost ("i,j,m"),
// facility_cost ("i,d"), buffer_factor and optional coordinates. Unknown keys
// are rejected. Output is canonical: equal instances serialize to equal bytes.

std::string instance_to_json(const Instance& inst);

/// Parses and validates. Throws ParseError on schema problems and
/// InstanceError when the decoded instance breaks an invariant.
Instance instance_from_json(std::string_view text);

Instance read_instance(const std::filesystem::path& path);
void write_instance(const Instance& inst, const std::filesystem::path& path);

}  // namespace vaxnet

#endif  // VAXNET_INSTANCE_IO_HPP
