#ifndef VAXNET_TESTS_FIXTURES_HPP
#define VAXNET_TESTS_FIXTURES_HPP

#include "vaxnet/instance.hpp"

namespace vaxnet::testing {

// One hub, one clinic, one mode, one device; arcs 0->h1, 0->c1, h1->c1.
inline Instance tiny1() {
  Instance inst;
  inst.hubs = {"h1"};
  inst.clinics = {"c1"};
  inst.modes = {"m1"};
  inst.devices = {"d1"};
  inst.arcs = {{0, 1}, {0, 2}, {1, 2}};
  inst.demand = {100.0};
  inst.vehicle_capacity = {50.0};
  inst.device_capacity = {30.0};
  inst.transport_cost = {{4.0}, {10.0}, {3.0}};
  inst.facility_cost = {{30.0}};
  inst.buffer_factor = 1.25;
  return inst;
}

}  // namespace vaxnet::testing

#endif  // VAXNET_TESTS_FIXTURES_HPP
