#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "vaxnet/formulation.hpp"
#include "vaxnet/generator.hpp"
#include "vaxnet/oracle.hpp"
#include "vaxnet/solver.hpp"

using namespace vaxnet;
using namespace vaxnet::mip;

namespace {

// Random LP built around a known feasible point, so the status is feasible by
// construction; bounded because every variable has a finite box.
MipModel random_feasible_lp(std::mt19937_64& rng, std::vector<double>& point) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  MipModel m("LP");
  const int n = 2 + static_cast<int>(rng() % 6);
  point.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    point[j] = std::abs(u(rng));
    m.add_continuous("x" + std::to_string(j), u(rng), 0.0, 10.0);
  }
  const int rows = 1 + static_cast<int>(rng() % 6);
  for (int i = 0; i < rows; ++i) {
    std::vector<Term> terms;
    double act = 0.0;
    for (int j = 0; j < n; ++j)
      if (rng() % 3) {
        const double a = u(rng);
        terms.push_back({j, a});
        act += a * point[j];
      }
    const auto sense = static_cast<Sense>(rng() % 3);
    const double slack = std::abs(u(rng));
    const double rhs = sense == Sense::less_equal      ? act + slack
                       : sense == Sense::greater_equal ? act - slack
                                                       : act;
    m.add_constraint("r" + std::to_string(i), std::move(terms), sense, rhs);
  }
  return m;
}

// Minimum over all 0/1 assignments of a pure binary model, by enumeration.
double brute_force(const MipModel& m) {
  const int n = m.num_variables();
  double best = kInfinity;
  std::vector<double> x(n);
  for (long mask = 0; mask < (1L << n); ++mask) {
    for (int j = 0; j < n; ++j) x[j] = (mask >> j) & 1;
    if (m.max_violation(x) <= 1e-9) best = std::min(best, m.objective_value(x));
  }
  return best;
}

MipModel random_binary_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coef(-6, 9);
  MipModel m("BIN");
  const int n = 3 + static_cast<int>(rng() % 8);
  for (int j = 0; j < n; ++j) m.add_binary("b" + std::to_string(j), coef(rng));
  const int rows = 1 + static_cast<int>(rng() % 5);
  for (int i = 0; i < rows; ++i) {
    std::vector<Term> terms;
    for (int j = 0; j < n; ++j)
      if (rng() % 2) terms.push_back({j, static_cast<double>(coef(rng))});
    m.add_constraint("r" + std::to_string(i), std::move(terms),
                     rng() % 2 ? Sense::less_equal : Sense::greater_equal, coef(rng) / 2.0);
  }
  return m;
}

}  // namespace

TEST_CASE("small LPs") {
  SUBCASE("single bound") {
    MipModel m;
    const int x = m.add_continuous("x", 1.0);
    m.add_constraint("c", {{x, 1.0}}, Sense::greater_equal, 3.0);
    const LpResult r = solve_lp(m);
    CHECK(r.status == LpStatus::optimal);
    CHECK(r.objective == doctest::Approx(3.0));
  }
  SUBCASE("infeasible") {
    MipModel m;
    const int x = m.add_continuous("x", 1.0);
    const int y = m.add_continuous("y", 1.0);
    m.add_constraint("a", {{x, 1.0}, {y, 1.0}}, Sense::greater_equal, 5.0);
    m.add_constraint("b", {{x, 1.0}, {y, 1.0}}, Sense::less_equal, 3.0);
    CHECK(solve_lp(m).status == LpStatus::infeasible);
    CHECK(solve_mip(m).status == BnbStatus::infeasible);
  }
  SUBCASE("unbounded") {
    MipModel m;
    const int x = m.add_continuous("x", -1.0);
    m.add_constraint("c", {{x, 1.0}}, Sense::greater_equal, 0.0);
    CHECK(solve_lp(m).status == LpStatus::unbounded);
  }
  SUBCASE("free and negative variables") {
    MipModel m;
    const int x = m.add_continuous("x", 1.0, -kInfinity, kInfinity);
    const int y = m.add_continuous("y", -1.0, -4.0, -1.0);
    m.add_constraint("c", {{x, 1.0}, {y, 1.0}}, Sense::equal, -2.0);
    const LpResult r = solve_lp(m);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.x[y] == doctest::Approx(-1.0));
    CHECK(r.x[x] == doctest::Approx(-1.0));
  }
}

TEST_CASE("random feasible LPs are solved to a feasible optimum") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> point;
    const MipModel m = random_feasible_lp(rng, point);
    const LpResult r = solve_lp(m);
    CAPTURE(k);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(m.max_violation(r.x) <= 1e-6);
    CHECK(r.objective <= m.objective_value(point) + 1e-6);
  }
}

TEST_CASE("random LPs made infeasible are reported infeasible") {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> point;
    MipModel m = random_feasible_lp(rng, point);
    // Contradicting pair on a random combination.
    std::vector<Term> terms;
    for (int j = 0; j < m.num_variables(); ++j) terms.push_back({j, 1.0 + j % 3});
    m.add_constraint("lo", terms, Sense::greater_equal, 7.0);
    m.add_constraint("hi", terms, Sense::less_equal, 6.0);
    CHECK(solve_lp(m).status == LpStatus::infeasible);
  }
}

TEST_CASE("branch and bound matches enumeration on pure binary models") {
  std::mt19937_64 rng(13);
  int feasible = 0;
  for (int k = 0; k < 150; ++k) {
    const MipModel m = random_binary_model(rng);
    const double truth = brute_force(m);
    const BnbResult r = solve_mip(m);
    CAPTURE(k);
    if (std::isinf(truth)) {
      CHECK(r.status == BnbStatus::infeasible);
      continue;
    }
    ++feasible;
    REQUIRE(r.status == BnbStatus::optimal);
    CHECK(r.objective == doctest::Approx(truth).epsilon(1e-9));
    SolveConfig plain;
    plain.tighten = false;
    CHECK(solve_mip(m, plain).objective == doctest::Approx(truth).epsilon(1e-9));
  }
  CHECK(feasible > 50);
}

TEST_CASE("coefficient tightening keeps the integer optimum") {
  std::mt19937_64 rng(14);
  for (int k = 0; k < 100; ++k) {
    const MipModel m = random_binary_model(rng);
    CHECK(brute_force(tighten_coefficients(m)) == brute_force(m));
  }
  // The textbook case: y binary, x <= 4, 100 y - x >= 0 becomes 4 y - x >= 0.
  MipModel m;
  const int x = m.add_continuous("x", -1.0, 0.0, 4.0);
  const int y = m.add_binary("y", 1.0);
  m.add_constraint("cap", {{x, -1.0}, {y, 100.0}}, Sense::greater_equal, 0.0);
  int changed = 0;
  const MipModel t = tighten_coefficients(m, &changed);
  CHECK(changed == 1);
  CHECK(t.constraint(0).terms[1].coef == doctest::Approx(4.0));
  CHECK(solve_lp(t).objective == doctest::Approx(-3.0));
  CHECK(solve_mip(m).objective == doctest::Approx(-3.0));
}

TEST_CASE("tiny-1 search") {
  const Program1 p = build_program1(testing::tiny1());
  SolveConfig cfg;
  cfg.record_trace = true;
  const BnbResult r = solve_mip(p.model, cfg);
  REQUIRE(r.status == BnbStatus::optimal);
  CHECK(r.objective == doctest::Approx(114.0).epsilon(1e-12));
  CHECK(r.best_bound == doctest::Approx(114.0));
  CHECK(solve_lp(p.model).objective <= 114.0 + 1e-9);
  // Node LP values never beat the root in a minimization.
  REQUIRE_FALSE(r.node_lp_values.empty());
  for (double v : r.node_lp_values) CHECK(v >= r.node_lp_values.front() - 1e-9);
  // Bound trace is monotone and ends at the optimum.
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].best_bound >= r.trace[i - 1].best_bound - 1e-9);
    CHECK(r.trace[i].incumbent <= r.trace[i - 1].incumbent + 1e-9);
  }
}

TEST_CASE("integral root needs one node") {
  MipModel m;
  const int a = m.add_binary("a", 1.0);
  const int b = m.add_binary("b", 2.0);
  m.add_constraint("c", {{a, 1.0}, {b, 1.0}}, Sense::greater_equal, 1.0);
  const BnbResult r = solve_mip(m);
  CHECK(r.status == BnbStatus::optimal);
  CHECK(r.nodes == 1);
  CHECK(r.objective == 1.0);
}

TEST_CASE("deterministic search") {
  GeneratorConfig g;
  g.seed = 21;
  g.n_hubs = 2;
  g.n_clinics = 6;
  const Instance inst = generate_instance(g);
  const Program1 p = build_program1(inst);
  const BnbResult a = solve_mip(p.model);
  const BnbResult b = solve_mip(p.model);
  CHECK(a.objective == b.objective);
  CHECK(a.x == b.x);
  CHECK(a.nodes == b.nodes);
}

TEST_CASE("limits, starts and cuts") {
  GeneratorConfig g;
  g.seed = 4;
  g.n_hubs = 3;
  g.n_clinics = 10;
  const Instance inst = generate_instance(g);
  const Program1 p = build_program1(inst);
  const BnbResult full = solve_mip(p.model);
  REQUIRE(full.status == BnbStatus::optimal);

  SolveConfig tiny;
  tiny.node_limit = 1;
  tiny.tighten = false;
  const BnbResult cut_short = solve_mip(p.model, tiny);
  if (cut_short.status == BnbStatus::node_limit) {
    CHECK(cut_short.best_bound <= full.objective + 1e-6);
    if (cut_short.has_incumbent()) CHECK(cut_short.objective >= full.objective - 1e-6);
  }

  const auto direct = encode_solution(inst, p.index, *direct_supply_solution(inst));
  SolveConfig none;
  none.node_limit = 1;
  none.tighten = false;
  const BnbResult started = solve_mip(p.model, none, direct);
  REQUIRE(started.has_incumbent());
  CHECK(started.objective <= p.model.objective_value(direct) + 1e-9);

  // An infeasible start is ignored.
  std::vector<double> junk(p.model.num_variables(), 0.5);
  CHECK(solve_mip(p.model, {}, junk).objective == doctest::Approx(full.objective));

  SolveConfig strong;
  strong.cuts = linking_cuts(inst, p.index);
  strong.separator = capacity_separator(inst, p.index);
  strong.branch_priority = branching_priorities(inst, p.index);
  const BnbResult with_cuts = solve_mip(p.model, strong, direct);
  CHECK(with_cuts.objective == doctest::Approx(full.objective).epsilon(1e-9));
  CHECK(p.model.max_violation(with_cuts.x) <= 1e-6);

  SolveConfig bad;
  bad.time_limit_s = -1.0;
  CHECK_THROWS_AS(solve_mip(p.model, bad), std::invalid_argument);
}

TEST_CASE("cuts are checked against the model") {
  MipModel m;
  m.add_binary("a", 1.0);
  SolveConfig cfg;
  cfg.cuts.push_back({"bad", {{5, 1.0}}, Sense::less_equal, 1.0});
  CHECK_THROWS_AS(solve_mip(m, cfg), std::invalid_argument);
}

TEST_CASE("generated cuts hold at every feasible design") {
  // Each feasible design of a small instance, encoded as a model vector, must
  // satisfy the linking cuts, every separated capacity cut and, as it has no
  // supply cycle and no hub behind a closed one, the supply tree cuts.
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    GeneratorConfig g;
    g.seed = seed;
    g.n_hubs = 2;
    g.n_clinics = 2;
    g.density = static_cast<Density>(seed % 3);
    const Instance inst = generate_instance(g);
    const Program1 p = build_program1(inst);
    MipModel strong = p.model;
    for (const auto& c : linking_cuts(inst, p.index))
      strong.add_constraint(c.name, c.terms, c.sense, c.rhs);
    for (const auto& c : supply_tree_cuts(inst, p.index))
      strong.add_constraint(c.name, c.terms, c.sense, c.rhs);
    auto separate = capacity_separator(inst, p.index);
    for (int round = 0; round < 5; ++round) {
      const LpResult lp = solve_lp(strong);
      REQUIRE(lp.status == LpStatus::optimal);
      const auto cuts = separate(lp.x);
      if (cuts.empty()) break;
      for (const auto& c : cuts)
        strong.add_constraint("s" + std::to_string(strong.num_constraints()), c.terms, c.sense,
                              c.rhs);
    }
    long checked = 0;
    enumerate_configurations(inst, [&](const NetworkSolution& sol, bool feasible) {
      if (!feasible) return;
      ++checked;
      const auto x = encode_solution(inst, p.index, sol);
      CHECK(strong.max_violation(x) <= 1e-6);
    });
    CAPTURE(seed);
    CHECK(checked > 0);
  }
}
