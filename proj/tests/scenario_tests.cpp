#include <cmath>

#include "doctest.h"
#include "spde/scenario.hpp"
#include "support/test_fields.hpp"

using namespace spde;

TEST_SUITE_BEGIN("scenario");

TEST_CASE("zero scenario builds zero data") {
  const ScenarioSpec spec = reference_scenario("zero");
  const BuiltScenario built = build(spec);
  CHECK(max_abs(built.u0) == 0.0);
  const ScalarField f0 = built.coeffs.f0(0.0, built.u0);
  CHECK(max_abs(f0) == 0.0);
  const VectorField fv = built.coeffs.fvec(0.0, built.u0);
  for (const auto& comp : fv.comps) CHECK(max_abs(comp) == 0.0);
  CHECK(built.coeffs.g(0.0, built.u0).mode_count() == 0);
}

TEST_CASE("catalog lookup for the constant-noise scenario") {
  const ScenarioSpec spec = reference_scenario("const-noise-p4");
  CHECK(spec.grid.dim == 1);
  CHECK(spec.grid.n == 32);
  CHECK(spec.grid.len == 1.0);
  CHECK(spec.p == 4.0);
  CHECK(spec.K == 1);
  const BuiltScenario built = build(spec);
  const SeqField g = built.coeffs.g(0.0, built.u0);
  REQUIRE(g.mode_count() == 1);
  for (double x : g.modes[0].values) CHECK(x == 1.0);
  CHECK(max_abs(built.u0) == 0.0);
}

TEST_CASE("unknown reference name is rejected") {
  CHECK_THROWS_AS(reference_scenario("nope"), std::invalid_argument);
}

TEST_CASE("serialize/parse round-trip is the identity") {
  for (const auto& name : reference_names()) {
    const ScenarioSpec spec = reference_scenario(name);
    const ScenarioSpec again = parse_scenario(serialize_scenario(spec));
    CHECK(again == spec);
  }
  for (const auto& spec : randomized_catalog(10, 31415)) {
    const ScenarioSpec again = parse_scenario(serialize_scenario(spec));
    CHECK(again == spec);
  }
}

TEST_CASE("parser rejects malformed input") {
  const std::string base = serialize_scenario(reference_scenario("const-noise-p4"));

  CHECK_THROWS_AS(parse_scenario(base + "\nbogus = 1\n"), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario(base + "\n[mystery]\nx = 1\n"), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario("name = x\n"), ScenarioParseError);  // missing keys

  std::string dup = base;
  dup += "\n[grid]\ndim = 1\n";  // duplicate key in a reopened section
  CHECK_THROWS_AS(parse_scenario(dup), ScenarioParseError);

  auto replaced = [&](const std::string& from, const std::string& to) {
    std::string s = base;
    const std::size_t at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
  };
  CHECK_THROWS_AS(parse_scenario(replaced("p = 4", "p = 1.5")), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario(replaced("n = 32", "n = 31")), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario(replaced("len = 1", "len = oops")), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario(replaced("u0 = zero", "u0 = wavelet")), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario(replaced("u0 = zero", "u0 = zero tmod=ramp")),
                  ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario(replaced("u0 = zero", "u0 = bump radius=0.9")),
                  ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario(replaced("g1 = constant amp=1", "g1 = constant amp=1 q=2")),
                  ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario(replaced("kind = horizon", "kind = hitting")),
                  ScenarioParseError);  // hitting without functional/level
}

TEST_CASE("feedback scenarios respect the stability bound at parse time") {
  std::string text = serialize_scenario(reference_scenario("heat-feedback"));
  const std::size_t at = text.find("M = 512");
  REQUIRE(at != std::string::npos);
  text.replace(at, 7, "M = 64");  // dt too large for h^2/(2 dim)
  CHECK_THROWS_AS(parse_scenario(text), ScenarioParseError);
}

TEST_CASE("shipped scenario files match the in-code catalog") {
  for (const auto& name : reference_names()) {
    const std::string path = std::string(SPDE_SOURCE_DIR) + "/scenarios/" + name + ".ini";
    const ScenarioSpec from_file = load_scenario(path);
    CHECK(from_file == reference_scenario(name));
  }
  CHECK_THROWS_AS(load_scenario("/nonexistent/file.ini"), ScenarioParseError);
}

TEST_CASE("randomized catalog is deterministic and well formed") {
  const std::vector<ScenarioSpec> a = randomized_catalog(20, 777);
  const std::vector<ScenarioSpec> b = randomized_catalog(20, 777);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  const std::vector<ScenarioSpec> c = randomized_catalog(1, 3);
  CHECK(c.size() == 1);
  CHECK_NOTHROW(build(c.front()));

  for (const auto& spec : a) {
    CHECK(spec.p >= 2.0);
    for (const auto& entry : spec.coeffs.g) {
      if (entry.profile.kind != Profile::Kind::Zero) {
        CHECK(entry.profile.amplitude >= 0.1);
        CHECK(entry.profile.amplitude <= 2.0);
      }
    }
  }
}

TEST_CASE("every catalog scenario integrates without blow-up") {
  for (const auto& spec : randomized_catalog(20, 777)) {
    CHECK_NOTHROW(run_scenario(spec, 0));
  }
}

TEST_CASE("amplitude scaling and step override helpers") {
  ScenarioSpec spec = reference_scenario("const-noise-p4");
  const ScenarioSpec doubled = scaled_scenario(spec, 2.0);
  CHECK(doubled.coeffs.g[0].profile.amplitude == 2.0);
  CHECK(doubled.coeffs.u0.amplitude == 0.0);

  const ScenarioSpec fine = with_steps(spec, 2048);
  CHECK(fine.tg.M == 2048);
  CHECK(fine.tg.T == spec.tg.T);

  CHECK(is_deterministic(reference_scenario("zero")));
  CHECK(is_deterministic(reference_scenario("det-chain-rule-p4")));
  CHECK(!is_deterministic(spec));
}

TEST_SUITE_END();
