#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "vaxnet/formulation.hpp"
#include "vaxnet/generator.hpp"
#include "vaxnet/oracle.hpp"
#include "vaxnet/solver.hpp"

using namespace vaxnet;

namespace {

// Fills flows and costs the way a well-behaved producer would.
NetworkSolution priced(const Instance& inst, NetworkSolution sol) {
  sol.flows.assign(inst.num_arcs(), 0.0);
  const ArcTable table(inst);
  for (int c = 0; c < inst.num_clinics(); ++c) {
    NodeIndex to = inst.clinic_node(c);
    NodeIndex from = sol.clinics[c].source;
    for (int steps = 0; steps <= inst.num_hubs(); ++steps) {
      const auto a = table.find(from, to);
      if (!a) break;
      sol.flows[*a] += inst.demand[c];
      if (from == kStore) break;
      to = from;
      from = sol.hubs[inst.hub_of(from)].source;
    }
  }
  const CostBreakdown cost = assignment_cost(inst, sol);
  sol.facility_cost = cost.facility;
  sol.transport_cost = cost.transport;
  return sol;
}

NetworkSolution hub_design(Frequency f) {
  const Instance inst = testing::tiny1();
  NetworkSolution sol;
  sol.clinics = {{1, 0}};
  HubPlan hub;
  hub.open = true;
  hub.source = kStore;
  hub.mode = 0;
  hub.frequency = f;
  hub.device = 0;
  sol.hubs = {hub};
  return priced(inst, sol);
}

bool has(const std::vector<SolutionViolation>& v, SolutionIssue code, const std::string& subject) {
  return std::any_of(v.begin(), v.end(),
                     [&](const auto& x) { return x.code == code && x.subject == subject; });
}

Instance two_hubs() {
  Instance inst;
  inst.hubs = {"h1", "h2"};
  inst.clinics = {"c1"};
  inst.modes = {"m1"};
  inst.devices = {"d1"};
  inst.arcs = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {2, 1}, {1, 3}, {2, 3}};
  inst.demand = {60.0};
  inst.vehicle_capacity = {40.0};
  inst.device_capacity = {25.0};
  inst.transport_cost = {{5.0}, {6.0}, {12.0}, {1.0}, {1.0}, {2.0}, {2.5}};
  inst.facility_cost = {{8.0}, {9.0}};
  return inst;
}

}  // namespace

TEST_CASE("the exact tiny-1 design validates") {
  const Instance inst = testing::tiny1();
  const Program1 p = build_program1(inst);
  const auto r = mip::solve_mip(p.model);
  const NetworkSolution sol = decode_solution(inst, p.index, r.x);
  const ValidationReport rep = validate_solution(inst, sol);
  CHECK(rep.ok());
  CHECK(rep.warnings.empty());
  CHECK(sol.total_cost() == doctest::Approx(114.0));
  CHECK(hub_design(Frequency::monthly).total_cost() == doctest::Approx(114.0));
}

TEST_CASE("quarterly hub overflows its device") {
  const ValidationReport rep =
      validate_solution(testing::tiny1(), hub_design(Frequency::quarterly));
  REQUIRE(rep.errors.size() == 1);
  const SolutionViolation& v = rep.errors[0];
  CHECK(v.code == SolutionIssue::storage_capacity);
  CHECK(v.subject == "h1");
  CHECK(v.detail == "31.25 > 30");
  CHECK(describe(v) == "StorageCapacity(h1): 31.25 > 30");
}

TEST_CASE("structural errors") {
  const Instance inst = testing::tiny1();

  SUBCASE("unassigned clinic") {
    NetworkSolution sol = hub_design(Frequency::monthly);
    sol.clinics[0] = {};
    const auto rep = validate_solution(inst, sol);
    CHECK(has(rep.errors, SolutionIssue::clinic_unassigned, "c1"));
  }
  SUBCASE("closed source") {
    NetworkSolution sol = hub_design(Frequency::monthly);
    sol.hubs[0] = {};
    CHECK(has(validate_solution(inst, sol).errors, SolutionIssue::source_not_open, "c1"));
  }
  SUBCASE("missing arc and bad mode") {
    NetworkSolution sol = hub_design(Frequency::monthly);
    sol.hubs[0].source = 2;  // the clinic
    CHECK(has(validate_solution(inst, sol).errors, SolutionIssue::arc_missing, "c1,h1"));
    sol = hub_design(Frequency::monthly);
    sol.clinics[0].mode = 3;
    CHECK(has(validate_solution(inst, sol).errors, SolutionIssue::arc_missing, "h1,c1"));
  }
  SUBCASE("open hub without device or supplier") {
    NetworkSolution sol = hub_design(Frequency::monthly);
    sol.hubs[0].device = -1;
    CHECK(has(validate_solution(inst, sol).errors, SolutionIssue::hub_supply_missing, "h1"));
    sol = hub_design(Frequency::monthly);
    sol.hubs[0].source = -1;
    sol.hubs[0].mode = -1;
    CHECK(has(validate_solution(inst, sol).errors, SolutionIssue::hub_supply_missing, "h1"));
  }
  SUBCASE("vehicle capacity") {
    Instance small = inst;
    small.vehicle_capacity = {8.0};
    const auto rep = validate_solution(small, priced(small, hub_design(Frequency::monthly)));
    CHECK(has(rep.errors, SolutionIssue::vehicle_capacity, "h1,c1"));
    CHECK(has(rep.errors, SolutionIssue::vehicle_capacity, "0,h1"));
  }
  SUBCASE("claimed flows and cost") {
    NetworkSolution sol = hub_design(Frequency::monthly);
    sol.flows[0] = 99.0;
    CHECK(has(validate_solution(inst, sol).errors, SolutionIssue::flow_mismatch, "0,h1"));
    sol = hub_design(Frequency::monthly);
    sol.transport_cost += 1.0;
    CHECK(has(validate_solution(inst, sol).errors, SolutionIssue::cost_mismatch, "objective"));
    sol = hub_design(Frequency::monthly);
    sol.flows.pop_back();
    CHECK(has(validate_solution(inst, sol).errors, SolutionIssue::flow_mismatch, "flows"));
  }
  SUBCASE("shape") {
    NetworkSolution sol = hub_design(Frequency::monthly);
    sol.hubs.clear();
    CHECK(has(validate_solution(inst, sol).errors, SolutionIssue::shape_mismatch, "solution"));
  }
}

TEST_CASE("supply cycles") {
  const Instance inst = two_hubs();
  NetworkSolution sol;
  HubPlan h1{true, 2, 0, Frequency::quarterly, 0};
  HubPlan h2{true, 1, 0, Frequency::quarterly, 0};
  sol.hubs = {h1, h2};

  sol.clinics = {{kStore, 0}};
  ValidationReport rep = validate_solution(inst, priced(inst, sol));
  CHECK(rep.ok());
  CHECK(has(rep.warnings, SolutionIssue::zero_flow_cycle, "h1"));
  CHECK(has(rep.warnings, SolutionIssue::zero_flow_cycle, "h2"));

  sol.clinics = {{1, 0}};
  rep = validate_solution(inst, priced(inst, sol));
  CHECK(has(rep.errors, SolutionIssue::supply_cycle, "c1"));
}

TEST_CASE("validator accepts exactly the feasible configurations") {
  for (const Instance& inst : {testing::tiny1(), two_hubs()}) {
    long accepted = 0, total = 0;
    enumerate_configurations(inst, [&](const NetworkSolution& sol, bool feasible) {
      ++total;
      const ValidationReport rep = validate_solution(inst, priced(inst, sol));
      // Zero-flow cycles satisfy every row of the program; the oracle leaves
      // them out of its search space and the validator only warns.
      if (!rep.warnings.empty()) {
        CHECK(rep.ok());
        CHECK_FALSE(feasible);
        CHECK(has(rep.warnings, SolutionIssue::zero_flow_cycle, "h1"));
        return;
      }
      CHECK(rep.ok() == feasible);
      accepted += feasible;
    });
    CHECK(total > accepted);
    CHECK(accepted == static_cast<long>(oracle_enumerate(inst).accepted));
  }
}

TEST_CASE("oracle designs validate on generated instances") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GeneratorConfig g;
    g.seed = seed;
    g.n_hubs = 1 + static_cast<int>(seed % 3);
    g.n_clinics = 3;
    g.density = static_cast<Density>(seed % 3);
    const Instance inst = generate_instance(g);
    const OracleResult o = oracle_enumerate(inst);
    REQUIRE(o.feasible);
    CHECK(validate_solution(inst, o.best).ok());
    CHECK(o.best.total_cost() == doctest::Approx(o.cost));
  }
}

TEST_CASE("oracle guard") {
  GeneratorConfig g;
  g.n_hubs = 6;
  g.n_clinics = 30;
  const Instance inst = generate_instance(g);
  CHECK_FALSE(oracle_search_size(inst));
  CHECK_THROWS_AS(oracle_enumerate(inst), OracleGuardError);
  CHECK(oracle_search_size(testing::tiny1()) == doctest::Approx(5.0));
}
