#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "vaxnet/formulation.hpp"
#include "vaxnet/generator.hpp"
#include "vaxnet/oracle.hpp"
#include "vaxnet/solver.hpp"

using namespace vaxnet;

namespace {

std::vector<std::string> row_names(const mip::MipModel& m) {
  std::vector<std::string> out;
  for (const auto& c : m.constraints()) out.push_back(c.name);
  return out;
}

bool has_violation(const InfeasibleSolution& e, const std::string& family,
                   const std::string& row) {
  return std::any_of(e.violations().begin(), e.violations().end(), [&](const auto& v) {
    return v.family == family && v.row == row;
  });
}

}  // namespace

TEST_CASE("tiny-1 model sizes") {
  const Instance inst = testing::tiny1();
  const Program1 p = build_program1(inst);
  CHECK(p.model.num_binaries() == 6);
  CHECK(p.model.num_variables() - p.model.num_binaries() == 3);
  CHECK(p.index.num_binaries() == VarIndex::expected_binaries(inst));
  CHECK(family_counts(p.model) == std::vector<int>{1, 1, 1, 2, 1, 1, 3, 1});
  CHECK(family_counts(p.model) == expected_family_counts(inst));
}

TEST_CASE("tiny-1 names and coefficients") {
  const Program1 p = build_program1(testing::tiny1());
  const auto& m = p.model;
  REQUIRE(m.find_variable("X_0_h1"));
  REQUIRE(m.find_variable("Y_0_h1_m1_2"));
  REQUIRE(m.find_variable("Y_h1_c1_m1_1"));
  CHECK_FALSE(m.find_variable("Y_h1_c1_m1_2"));  // clinics are served monthly only
  REQUIRE(m.find_variable("Z_h1_d1_2"));

  CHECK(m.variable(*m.find_variable("Z_h1_d1_1")).objective == 30.0);
  CHECK(m.variable(*m.find_variable("Y_0_h1_m1_1")).objective == 48.0);
  CHECK(m.variable(*m.find_variable("Y_0_h1_m1_2")).objective == 16.0);
  CHECK(m.variable(*m.find_variable("Y_0_c1_m1_1")).objective == 120.0);

  const auto& c9 = m.constraint(*m.find_constraint("C9_h1"));
  CHECK(c9.sense == mip::Sense::greater_equal);
  for (const auto& t : c9.terms) {
    const std::string& name = m.variable(t.var).name;
    if (name == "Z_h1_d1_1") CHECK(t.coef == 360.0);
    if (name == "Z_h1_d1_2") CHECK(t.coef == 120.0);
    if (name == "X_0_h1") CHECK(t.coef == -1.25);
  }
  const auto& c8 = m.constraint(*m.find_constraint("C8_0_h1"));
  for (const auto& t : c8.terms) {
    const std::string& name = m.variable(t.var).name;
    if (name == "Y_0_h1_m1_1") CHECK(t.coef == 600.0);
    if (name == "Y_0_h1_m1_2") CHECK(t.coef == 200.0);
    if (name == "X_0_h1") CHECK(t.coef == -1.0);
  }
  CHECK(m.constraint(*m.find_constraint("C6_c1")).rhs == 100.0);
  CHECK(m.constraint(*m.find_constraint("C3_h1")).sense == mip::Sense::less_equal);
}

TEST_CASE("invalid instances are rejected") {
  Instance inst = testing::tiny1();
  inst.demand = {-1.0};
  CHECK_THROWS_AS(build_program1(inst), InstanceError);
}

TEST_CASE("zero-demand clinic still needs a supplier") {
  Instance inst = testing::tiny1();
  inst.demand = {0.0};
  const Program1 p = build_program1(inst);
  CHECK(p.model.constraint(*p.model.find_constraint("C6_c1")).rhs == 0.0);
  const auto r = mip::solve_mip(p.model);
  REQUIRE(r.status == mip::BnbStatus::optimal);
  const NetworkSolution sol = decode_solution(inst, p.index, r.x);
  CHECK(sol.clinics[0].source >= 0);
  CHECK(r.objective <= 120.0 + 1e-9);
}

TEST_CASE("counts follow the closed forms on random generator configs") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GeneratorConfig g;
    g.seed = seed;
    g.n_hubs = static_cast<int>(seed % 5);
    g.n_clinics = 1 + static_cast<int>(seed * 7 % 13);
    g.n_modes = 1 + static_cast<int>(seed % 3);
    g.n_devices = 1 + static_cast<int>(seed * 3 % 4);
    g.density = static_cast<Density>(seed % 3);
    const Instance inst = generate_instance(g);
    const Program1 p = build_program1(inst);
    CAPTURE(seed);
    CHECK(p.model.num_binaries() == VarIndex::expected_binaries(inst));
    CHECK(p.model.num_variables() - p.model.num_binaries() == inst.num_arcs());
    CHECK(family_counts(p.model) == expected_family_counts(inst));
    CHECK(p.model.num_constraints() ==
          2 * inst.num_clinics() + 6 * inst.num_hubs() + inst.num_arcs());
  }
}

TEST_CASE("frequency restrictions") {
  const Program1 p = build_program1(testing::tiny1());
  const int base = p.model.num_constraints();

  SUBCASE("monthly only") {
    const std::vector<int> f{1};
    const auto m = restrict_frequencies(p.model, p.index, f);
    REQUIRE(m.num_constraints() == base + 1);
    const auto& row = m.constraint(base);
    CHECK(row.name == "RF_h1");
    REQUIRE(row.terms.size() == 1);
    CHECK(m.variable(row.terms[0].var).name == "Z_h1_d1_2");
    CHECK(row.sense == mip::Sense::equal);
    CHECK(row.rhs == 0.0);
  }
  SUBCASE("quarterly only") {
    const std::vector<int> f{2};
    const auto m = restrict_frequencies(p.model, p.index, f);
    REQUIRE(m.constraint(base).terms.size() == 1);
    CHECK(m.variable(m.constraint(base).terms[0].var).name == "Z_h1_d1_1");
  }
  SUBCASE("closed") {
    const std::vector<int> f{0};
    const auto m = restrict_frequencies(p.model, p.index, f);
    CHECK(m.constraint(base).terms.size() == 2);
    const auto free = restrict_frequencies(p.model, p.index, f, ClosedHubRule::free);
    CHECK(free.num_constraints() == base);
  }
  SUBCASE("bad entries") {
    const std::vector<int> bad{3};
    CHECK_THROWS_AS(restrict_frequencies(p.model, p.index, bad), std::invalid_argument);
    const std::vector<int> too_long{1, 1};
    CHECK_THROWS_AS(restrict_frequencies(p.model, p.index, too_long), std::invalid_argument);
  }
  CHECK(p.model.num_constraints() == base);
}

TEST_CASE("location restrictions") {
  const Program1 p = build_program1(testing::tiny1());
  const int base = p.model.num_constraints();
  const std::vector<int> open{1};
  const auto m = restrict_locations(p.model, p.index, open);
  REQUIRE(m.num_constraints() == base + 1);
  CHECK(m.constraint(base).name == "RL_h1");
  CHECK(m.constraint(base).terms.size() == 2);
  CHECK(m.constraint(base).rhs == 1.0);
  const std::vector<int> closed{0};
  CHECK(restrict_locations(p.model, p.index, closed).constraint(base).rhs == 0.0);
  const std::vector<int> bad{2};
  CHECK_THROWS_AS(restrict_locations(p.model, p.index, bad), std::invalid_argument);

  GeneratorConfig g;
  g.n_hubs = 3;
  g.n_clinics = 4;
  const Instance inst = generate_instance(g);
  const Program1 q = build_program1(inst);
  const std::vector<int> ones{1, 1, 1};
  CHECK(restrict_locations(q.model, q.index, ones).num_constraints() ==
        q.model.num_constraints() + 3);
}

TEST_CASE("removing restrictions restores the model") {
  GeneratorConfig g;
  g.seed = 5;
  g.n_hubs = 3;
  g.n_clinics = 6;
  const Instance inst = generate_instance(g);
  const Program1 p = build_program1(inst);
  const std::vector<int> f{1, 2, 0};
  const std::vector<int> l{1, 0, 1};
  const auto restricted =
      restrict_locations(restrict_frequencies(p.model, p.index, f), p.index, l);
  CHECK(restricted.num_constraints() == p.model.num_constraints() + 6);
  CHECK(remove_restrictions(restricted) == p.model);
  CHECK(row_names(remove_restrictions(restricted)) == row_names(p.model));
}

TEST_CASE("decode reports violated families") {
  const Instance inst = testing::tiny1();
  const Program1 p = build_program1(inst);
  const auto& m = p.model;

  std::vector<double> x(m.num_variables(), 0.0);
  try {
    decode_solution(inst, p.index, x);
    FAIL("all-zero vector accepted");
  } catch (const InfeasibleSolution& e) {
    CHECK(has_violation(e, "C2", "C2_c1"));
  }

  x[*m.find_variable("Y_0_c1_m1_1")] = 1.0;
  x[*m.find_variable("Y_h1_c1_m1_1")] = 1.0;
  x[*m.find_variable("X_0_c1")] = 100.0;
  try {
    decode_solution(inst, p.index, x);
    FAIL("double supply accepted");
  } catch (const InfeasibleSolution& e) {
    CHECK(has_violation(e, "C2", "C2_c1"));
  }

  std::vector<double> short_x(3, 0.0);
  CHECK_THROWS_AS(decode_solution(inst, p.index, short_x), std::invalid_argument);
}

TEST_CASE("decoded cost equals the MIP objective") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    GeneratorConfig g;
    g.seed = seed;
    g.n_hubs = 2;
    g.n_clinics = 5;
    g.density = static_cast<Density>(seed % 3);
    const Instance inst = generate_instance(g);
    const Program1 p = build_program1(inst);
    const auto r = mip::solve_mip(p.model);
    REQUIRE(r.has_incumbent());
    const NetworkSolution sol = decode_solution(inst, p.index, r.x);
    CHECK(sol.total_cost() == doctest::Approx(r.objective).epsilon(1e-6));
    CHECK(validate_solution(inst, sol).ok());
    // Encoding the design reproduces a feasible vector with the same value.
    const auto x = encode_solution(inst, p.index, sol);
    CHECK(p.model.max_violation(x) <= 1e-6);
    CHECK(p.model.objective_value(x) == doctest::Approx(r.objective).epsilon(1e-9));
  }
}

TEST_CASE("restricted optima stay feasible for the full model") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    GeneratorConfig g;
    g.seed = seed;
    g.n_hubs = 3;
    g.n_clinics = 5;
    const Instance inst = generate_instance(g);
    const Program1 p = build_program1(inst);
    const std::vector<int> f{1 + int(seed % 2), 2 - int(seed % 2), 1};
    const auto r = mip::solve_mip(restrict_frequencies(p.model, p.index, f));
    REQUIRE(r.has_incumbent());
    CHECK(p.model.max_violation(r.x) <= 1e-6);
    CHECK_NOTHROW(decode_solution(inst, p.index, r.x));
  }
}

TEST_CASE("direct supply solution") {
  const Instance inst = testing::tiny1();
  const auto sol = direct_supply_solution(inst);
  REQUIRE(sol);
  CHECK(sol->total_cost() == 120.0);
  CHECK(validate_solution(inst, *sol).ok());

  Instance no_direct = inst;
  no_direct.arcs = {{0, 1}, {1, 2}};
  no_direct.transport_cost = {{4.0}, {3.0}};
  CHECK_FALSE(direct_supply_solution(no_direct));
}
