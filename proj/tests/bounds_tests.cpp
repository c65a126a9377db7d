#include <cmath>

#include "doctest.h"
#include "spde/bounds.hpp"
#include "support/test_fields.hpp"

using namespace spde;
using test_fields::random_field;

TEST_SUITE_BEGIN("bounds");

namespace {

ScenarioSpec parse_lines(const std::string& text) { return parse_scenario(text); }

const char* kConstDrift = R"(name = const-drift
p = 3
seed = 5

[grid]
dim = 1
n = 16
len = 1

[time]
T = 1
M = 256

[coefficients]
mode = explicit
u0 = zero
f0 = constant amp=0.8
f1 = zero

[noise]
K = 0

[stopping]
kind = horizon
)";

const char* kRampDrift = R"(name = ramp-drift
p = 2
seed = 5

[grid]
dim = 1
n = 16
len = 1

[time]
T = 1
M = 256

[coefficients]
mode = explicit
u0 = zero
f0 = bump amp=1.3 center=0.5 radius=0.25 tmod=ramp
f1 = zero

[noise]
K = 0

[stopping]
kind = horizon
)";

}  // namespace

TEST_CASE("sup estimate on the zero scenario") {
  const BoundReport rep = sup_estimate_check(reference_scenario("zero"), 50, 1);
  CHECK(rep.lhs.mean == 0.0);
  CHECK(rep.ratio == 0.0);
  CHECK(!rep.violation);
  CHECK_THROWS_AS(sup_estimate_check(reference_scenario("zero"), 10, 1), std::invalid_argument);
}

TEST_CASE("sup estimate ratio is 1 for constant pure drift") {
  // u_t = t f0 exactly, so sup_t ||u||_p^p = (0.8 T)^p len while the f0 term
  // contributes T^{p-1} * T * 0.8^p len; the ratio collapses to 1.
  const ScenarioSpec spec = parse_lines(kConstDrift);
  const BoundReport rep = sup_estimate_check(spec, 50, 9);
  CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(!rep.violation);
}

TEST_CASE("sup estimate implied constant is stable across seed bases") {
  const ScenarioSpec spec = randomized_catalog(20, 777)[1];
  const BoundReport a = sup_estimate_check(spec, 64, 1000);
  const BoundReport b = sup_estimate_check(spec, 64, 2000);
  REQUIRE(a.implied_N > 0.0);
  CHECK(std::abs(a.implied_N - b.implied_N) <= 0.3 * std::max(a.implied_N, b.implied_N));
}

TEST_CASE("energy identity gap is rectangle-rule biased and halves with dt") {
  const ScenarioSpec spec = with_steps(reference_scenario("det-chain-rule-p4"), 256);
  const EnergyReport rep = energy_identity_check(spec, 2, 1);
  REQUIRE(std::abs(rep.gap.mean) > 0.0);
  const double ratio = std::abs(rep.gap_half.mean) / std::abs(rep.gap.mean);
  CHECK(ratio >= 0.35);
  CHECK(ratio <= 0.65);
  CHECK(rep.holds_equality);
  CHECK(rep.holds_inequality);
}

TEST_CASE("energy identity matches the Gaussian fourth-moment oracle") {
  // For du = dw with u_0 = 0 and p = 4 the terminal expectation is
  // E|w_T|^4 * len = 3 T^2; both sides of the identity must sit within
  // three standard errors of that value.
  const ScenarioSpec spec = reference_scenario("const-noise-p4");
  const EnergyReport rep = energy_identity_check(spec, 200, 4242);
  const double oracle = 3.0;
  CHECK(std::abs(rep.lhs.mean - oracle) <= 3.0 * rep.lhs.std_error + 0.02);
  CHECK(std::abs(rep.rhs.mean - oracle) <= 3.0 * rep.rhs.std_error);
  CHECK(rep.holds_equality);
  CHECK(rep.holds_inequality);
}

TEST_CASE("simple-process bound: zero tables are trivially within the bound") {
  const GridSpec g(1, 16, 1.0);
  StepProcessSpec sp{g, 1, {{ScalarField(g)}},
                     {StepTime{}, StepTime{StepTime::Kind::Fixed, 1.0, 0, 0.0}}};
  const BoundReport rep = simple_g_bound_check(sp, TimeGrid(1.0, 128), 2.0, 8, 3);
  CHECK(rep.lhs.mean == 0.0);
  CHECK(rep.ratio == 0.0);
}

TEST_CASE("simple-process bound honors the martingale maximal constant") {
  const GridSpec g(1, 16, 1.0);
  ScalarField one(g);
  std::fill(one.values.begin(), one.values.end(), 1.0);
  StepProcessSpec sp{g, 1, {{one}}, {StepTime{}, StepTime{StepTime::Kind::Fixed, 1.0, 0, 0.0}}};
  const BoundReport rep = simple_g_bound_check(sp, TimeGrid(1.0, 1024), 2.0, 400, 77);
  // The L2 maximal inequality gives E sup w^2 <= 4 T; the empirical ratio
  // lands well inside and must stay there.
  CHECK(rep.implied_N <= 4.5);
  CHECK(rep.implied_N >= 0.5);
}

TEST_CASE("two-stage step process has a finite stable ratio") {
  const GridSpec g(1, 16, 1.0);
  const ScalarField g11 = test_fields::random_smooth_field(g, 1);
  const ScalarField g12 = test_fields::random_smooth_field(g, 2);
  const ScalarField g21 = test_fields::random_smooth_field(g, 3);
  const ScalarField g22 = test_fields::random_smooth_field(g, 4);
  StepProcessSpec sp{g,
                     2,
                     {{g11, g12}, {g21, g22}},
                     {StepTime{}, StepTime{StepTime::Kind::Fixed, 0.5, 0, 0.0},
                      StepTime{StepTime::Kind::Fixed, 1.0, 0, 0.0}}};
  const BoundReport rep = simple_g_bound_check(sp, TimeGrid(1.0, 512), 4.0, 100, 5);
  CHECK(rep.implied_N > 0.0);
  CHECK(std::isfinite(rep.implied_N));
}

TEST_CASE("drift-only bound: Jensen equality for constant drift") {
  const BoundReport rep = drift_only_bound_check(parse_lines(kConstDrift), 4, 1);
  CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("drift-only bound: time-varying drift stays below 1") {
  const BoundReport rep = drift_only_bound_check(parse_lines(kRampDrift), 4, 1);
  CHECK(rep.ratio <= 1.0 + 1e-12);
  CHECK(rep.ratio > 0.0);
}

TEST_CASE("drift-only bound rejects scenarios outside its hypotheses") {
  CHECK_THROWS_AS(drift_only_bound_check(reference_scenario("const-noise-p4"), 4, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(drift_only_bound_check(reference_scenario("heat-feedback"), 4, 1),
                  std::invalid_argument);
}

TEST_CASE("scheffe check passes on shrinking perturbations") {
  const GridSpec g(1, 32, 1.0);
  const ScalarField u = test_fields::random_smooth_field(g, 50);
  const ScalarField bump = bump_test_function(g, {0.5}, 0.2);
  std::vector<ScalarField> un;
  for (int n = 1; n <= 200; ++n) {
    ScalarField f = u;
    add_scaled(f, 1.0 / n, bump);
    un.push_back(std::move(f));
  }
  ConvergenceTols tols{1e-2, 1e-2, 1e-2, 1.05};
  CHECK(scheffe_check(un, u, 2.0, tols) == Verdict::Pass);
  CHECK(scheffe_check(un, u, 1.0, tols) == Verdict::Pass);  // r down to 1 is allowed
}

TEST_CASE("scheffe check is vacuous for the translating bump") {
  const GridSpec g(1, 64, 1.0);
  std::vector<ScalarField> un;
  for (int n = 0; n < 8; ++n)
    un.push_back(bump_test_function(g, {0.1 + 0.1 * n}, 0.04));
  const ScalarField zero(g);
  CHECK(scheffe_check(un, zero, 2.0) == Verdict::Vacuous);
}

TEST_CASE("scheffe check fails when the envelope is violated") {
  const GridSpec g(1, 32, 1.0);
  const ScalarField u = test_fields::random_smooth_field(g, 51);
  const ScalarField bump = bump_test_function(g, {0.5}, 0.2);
  std::vector<ScalarField> un;
  for (double eps : {1e-8, 5e-8, 1e-9}) {  // non-monotone middle step
    ScalarField f = u;
    add_scaled(f, eps, bump);
    un.push_back(std::move(f));
  }
  CHECK(scheffe_check(un, u, 2.0) == Verdict::Fail);
}

TEST_CASE("scheffe check passes a randomized geometric schedule") {
  const GridSpec g(1, 32, 1.0);
  const ScalarField u = test_fields::random_smooth_field(g, 52);
  std::vector<ScalarField> un;
  double eta = 0.5;
  for (int n = 0; n < 40; ++n, eta *= 0.7) {
    ScalarField w = random_field(g, 100 + static_cast<std::uint64_t>(n));
    const double norm = std::sqrt(lp_norm_pow(w, 2.0));
    ScalarField f = u;
    add_scaled(f, eta / norm, w);
    un.push_back(std::move(f));
  }
  CHECK(scheffe_check(un, u, 2.0, ConvergenceTols{1e-4, 1e-4, 1e-4, 1.0}) == Verdict::Pass);
}

TEST_CASE("product limit check") {
  const GridSpec g(1, 32, 1.0);
  const ScalarField u = test_fields::random_smooth_field(g, 60);
  const ScalarField v = test_fields::random_smooth_field(g, 61);
  const ScalarField bump = bump_test_function(g, {0.5}, 0.2);

  std::vector<ScalarField> un, vn_const, vn;
  for (int n = 1; n <= 100; ++n) {
    ScalarField f = u;
    add_scaled(f, 1.0 / (n * n), bump);
    un.push_back(std::move(f));
    vn_const.push_back(v);
    ScalarField h = v;
    add_scaled(h, 0.5 / (n * n), bump);
    vn.push_back(std::move(h));
  }
  ConvergenceTols tols{1e-2, 1e-2, 1e-2, 1.05};
  CHECK(product_limit_check(un, u, vn_const, v, 2.0, 2.0, tols) == Verdict::Pass);
  CHECK(product_limit_check(un, u, vn, v, 4.0, 4.0 / 3.0, tols) == Verdict::Pass);
  CHECK_THROWS_AS(product_limit_check(un, u, vn, v, 3.0, 3.0, tols), std::invalid_argument);
}

TEST_CASE("inequality suite holds on random draws") {
  const InequalitySuiteResult result = inequality_suite(500, 2024);
  CHECK(result.pass);
  for (const auto& row : result.rows) {
    CHECK(row.violations == 0);
    CHECK(row.first_fail_seed == 0);
  }
  CHECK_THROWS_AS(inequality_suite(0, 1), std::invalid_argument);
}

TEST_CASE("injected faulty inequality is detected, replayable and shrunk") {
  const InequalitySuiteResult result = inequality_suite(200, 2024, true);
  CHECK(!result.pass);
  bool found = false;
  for (const auto& row : result.rows) {
    if (row.name == "injected-negative-control") {
      found = true;
      CHECK(row.violations > 0);
      CHECK(row.first_fail_seed != 0);
      // The planted violation is scale invariant, so shrinking runs all the
      // way down to the floor.
      CHECK(row.shrunk_scale <= 1.0 / 128.0);
    } else {
      CHECK(row.violations == 0);
      CHECK(row.shrunk_scale == 1.0);
    }
  }
  CHECK(found);
}

TEST_CASE("triple product bound endpoints") {
  // a = b = c = 1 gives 1 <= 3; zero entries give 0 <= 0.
  for (double p : {2.0, 3.0, 4.0, 6.0}) {
    CHECK(std::pow(1.0, p - 2.0) * 1.0 * 1.0 <= 3.0);
    CHECK(0.0 * 0.0 <= 0.0 + 0.0 + 0.0);
  }
}

TEST_CASE("mollifier property battery passes") {
  const MollifierPropertyReport rep = mollifier_property_check(200, 99);
  CHECK(rep.pass);
  CHECK(rep.contraction_violations == 0);
  CHECK(rep.pointwise_violations == 0);
  CHECK(rep.mass_violations == 0);
  CHECK(rep.minkowski_violations == 0);
  CHECK(rep.convergence_monotone);
}

TEST_SUITE_END();
