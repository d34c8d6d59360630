#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "vaxnet/formulation.hpp"
#include "vaxnet/generator.hpp"
#include "vaxnet/mps.hpp"
#include "vaxnet/solver.hpp"

using namespace vaxnet;
using namespace vaxnet::mip;

namespace {

MipModel round_trip(const MipModel& m) {
  std::stringstream buf;
  write_mps(m, buf);
  return read_mps(buf);
}

MipModel parse(const std::string& text) {
  std::istringstream in(text);
  return read_mps(in);
}

int parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const UnsupportedSection&) {
    return -1;
  } catch (const MpsParseError& e) {
    return e.line();
  }
  return -2;
}

const char* kSmall =
    "NAME          SMALL\n"
    "ROWS\n"
    " N  COST\n"
    " G  R1\n"
    " L  R2\n"
    "COLUMNS\n"
    "    x         COST      1.0        R1        1.0\n"
    "    x         R2        1.0\n"
    "    y         COST      2.0        R1        1.0\n"
    "RHS\n"
    "    RHS       R1        2.5        R2        4.0\n"
    "BOUNDS\n"
    " BV BND       y\n"
    "ENDATA\n";

}  // namespace

TEST_CASE("tiny-1 round trip") {
  const Program1 p = build_program1(testing::tiny1());
  const MipModel back = round_trip(p.model);
  CHECK(back == p.model);
  CHECK(solve_mip(back).objective == doctest::Approx(114.0).epsilon(1e-12));
}

TEST_CASE("generated models round trip with restrictions") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GeneratorConfig g;
    g.seed = seed;
    g.n_hubs = 1 + static_cast<int>(seed % 4);
    g.n_clinics = 3 + static_cast<int>(seed % 7);
    g.density = static_cast<Density>(seed % 3);
    const Instance inst = generate_instance(g);
    const Program1 p = build_program1(inst);
    CHECK(round_trip(p.model) == p.model);
    std::vector<int> f(inst.num_hubs());
    for (int h = 0; h < inst.num_hubs(); ++h) f[h] = static_cast<int>((seed + h) % 3);
    const MipModel r = restrict_frequencies(p.model, p.index, f);
    CHECK(round_trip(r) == r);
  }
}

TEST_CASE("random models with every bound kind round trip") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int k = 0; k < 20; ++k) {
    MipModel m("RAND" + std::to_string(k));
    const int n = 2 + static_cast<int>(rng() % 6);
    for (int j = 0; j < n; ++j) {
      const std::string name = "v" + std::to_string(j);
      switch (rng() % 6) {
        case 0: m.add_binary(name, u(rng)); break;
        case 1: m.add_continuous(name, u(rng)); break;
        case 2: m.add_continuous(name, u(rng), -kInfinity, kInfinity); break;
        case 3: m.add_continuous(name, u(rng), -kInfinity, 3.25); break;
        case 4: m.add_continuous(name, u(rng), 1.5, 1.5); break;
        default: m.add_continuous(name, 0.0, -2.0, 1.0 / 3.0); break;
      }
    }
    const int rows = static_cast<int>(rng() % 5);
    for (int i = 0; i < rows; ++i) {
      std::vector<Term> terms;
      for (int j = 0; j < n; ++j)
        if (rng() % 2) terms.push_back({j, u(rng)});
      m.add_constraint("r" + std::to_string(i), std::move(terms),
                       static_cast<Sense>(rng() % 3), u(rng));
    }
    CAPTURE(k);
    CHECK(round_trip(m) == m);
  }
}

TEST_CASE("objective row name avoids clashes") {
  MipModel m("CLASH");
  const int x = m.add_continuous("x", 1.0);
  m.add_constraint("COST", {{x, 1.0}}, Sense::greater_equal, 1.0);
  CHECK(round_trip(m) == m);
}

TEST_CASE("names with whitespace are rejected on export") {
  MipModel m("BAD");
  m.add_continuous("has space", 1.0);
  std::stringstream out;
  CHECK_THROWS_AS(write_mps(m, out), std::invalid_argument);
  CHECK_THROWS(m.add_continuous("", 1.0));  // unnamed variables cannot exist
}

TEST_CASE("reading a hand-written file") {
  const MipModel m = parse(kSmall);
  REQUIRE(m.num_variables() == 2);
  CHECK(m.variable(1).kind == VarKind::binary);
  CHECK(m.constraint(0).sense == Sense::greater_equal);
  CHECK(m.constraint(1).rhs == 4.0);
  const BnbResult r = solve_mip(m);
  CHECK(r.objective == doctest::Approx(2.5));  // x = 2.5, y = 0
}

TEST_CASE("integer markers") {
  const std::string text =
      "NAME M\nROWS\n N obj\n G c\nCOLUMNS\n"
      "    MARKER   'MARKER'   'INTORG'\n"
      "    z  obj  1  c  1\n"
      "    MARKER   'MARKER'   'INTEND'\n"
      "RHS\n    rhs  c  0.5\nBOUNDS\n UP bnd z 1\nENDATA\n";
  const MipModel m = parse(text);
  CHECK(m.variable(0).kind == VarKind::binary);
  CHECK(solve_mip(m).objective == doctest::Approx(1.0));
}

TEST_CASE("unsupported and malformed input") {
  const std::string ranges =
      "NAME R\nROWS\n N obj\n L c\nCOLUMNS\n    x obj 1 c 1\nRHS\n    rhs c 2\n"
      "RANGES\n    rng c 1\nENDATA\n";
  try {
    parse(ranges);
    FAIL("RANGES accepted");
  } catch (const UnsupportedSection& e) {
    CHECK(e.section() == "RANGES");
    CHECK(e.line() == 9);
  }
  try {
    parse("NAME S\nOBJSENSE\n    MAX\nROWS\n N obj\nENDATA\n");
    FAIL("maximization accepted");
  } catch (const UnsupportedSection& e) {
    CHECK(e.section() == "OBJSENSE MAX");
  }
  CHECK(parse_error_line("NAME S\nROWS\n N obj\n L\nENDATA\n") == 4);
  CHECK(parse_error_line("NAME S\nROWS\n N obj\n Q c\nENDATA\n") == 4);
  CHECK(parse_error_line("NAME S\nROWS\n N obj\nCOLUMNS\n    x nope 1\nENDATA\n") == 5);
  CHECK(parse_error_line("NAME S\nROWS\n N obj\nCOLUMNS\n    x obj 1\n") > 0);
  CHECK(parse_error_line("NAME S\nROWS\n N obj\nCOLUMNS\n    x obj abc\nENDATA\n") == 5);
  CHECK(parse_error_line(
            "NAME S\nROWS\n N obj\nCOLUMNS\n    x obj 1\nRHS\n    rhs obj 5\nENDATA\n") == 7);
  CHECK(parse_error_line("NAME S\nROWS\n N obj\nSOS\nENDATA\n") == -1);
}

TEST_CASE("file helpers") {
  const auto path = std::filesystem::temp_directory_path() / "vaxnet_test_tiny1.mps";
  const Program1 p = build_program1(testing::tiny1());
  export_mps(p.model, path);
  CHECK(import_mps(path) == p.model);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(import_mps(path), IoError);
}
