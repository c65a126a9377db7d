#include <cmath>
#include <numbers>

#include "doctest.h"
#include "spde/mollify.hpp"
#include "support/test_fields.hpp"

using namespace spde;
using test_fields::random_field;

TEST_SUITE_BEGIN("mollify");

namespace {

// Naive reference convolution over the full grid (1d), independent of the
// support-list implementation.
ScalarField naive_convolution_1d(const ScalarField& u, const MollifierKernel& k) {
  const int n = u.grid.n;
  ScalarField out(u.grid);
  for (int i = 0; i < n; ++i) {
    long double acc = 0.0L;
    for (int j = 0; j < n; ++j) {
      const int src = ((i - j) % n + n) % n;
      acc += static_cast<long double>(u.values[static_cast<std::size_t>(src)]) *
             static_cast<long double>(k.weights.values[static_cast<std::size_t>(j)]);
    }
    out.values[static_cast<std::size_t>(i)] = static_cast<double>(acc * u.grid.h);
  }
  return out;
}

}  // namespace

TEST_CASE("kernel construction and validation") {
  const GridSpec g(1, 64, 1.0);
  const MollifierKernel k = make_kernel(g, 1.0 / 8.0);

  long double mass = 0.0L;
  for (double w : k.weights.values) {
    CHECK(w >= 0.0);
    mass += static_cast<long double>(w) * g.h;
  }
  CHECK(std::abs(static_cast<double>(mass) - 1.0) <= 1e-14);

  // No weight outside the support radius.
  for (int i = 0; i < g.n; ++i) {
    double d = std::abs(g.coord(i));
    d = std::min(d, g.len - d);
    if (d > k.eps) CHECK(k.weights.values[static_cast<std::size_t>(i)] == 0.0);
  }

  CHECK_THROWS_WITH_AS(make_kernel(g, g.h), "kernel resolution error", std::invalid_argument);
  CHECK_THROWS_AS(make_kernel(g, 0.3), std::invalid_argument);
}

TEST_CASE("constants are fixed points") {
  const GridSpec g(1, 64, 1.0);
  const MollifierKernel k = make_kernel(g, 1.0 / 8.0);
  ScalarField c(g);
  std::fill(c.values.begin(), c.values.end(), -1.7);
  const ScalarField smoothed = mollify(c, k);
  for (double x : smoothed.values) CHECK(x == doctest::Approx(-1.7).epsilon(1e-13));
}

TEST_CASE("convolution agrees with a naive full-grid reference") {
  const GridSpec g(1, 64, 1.0);
  const MollifierKernel k = make_kernel(g, 1.0 / 8.0);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const ScalarField u = random_field(g, 40 + s, 2.0);
    const ScalarField got = mollify(u, k);
    const ScalarField expected = naive_convolution_1d(u, k);
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(got.values[i] == doctest::Approx(expected.values[i]).epsilon(1e-13));
  }
}

TEST_CASE("delta spike reproduces the kernel shape") {
  const GridSpec g(1, 64, 1.0);
  const MollifierKernel k = make_kernel(g, 1.0 / 8.0);
  const int x0 = 20;
  ScalarField spike(g);
  spike.values[x0] = 1.0 / g.h;  // unit-mass discrete delta
  const ScalarField out = mollify(spike, k);
  for (int i = 0; i < g.n; ++i) {
    const int off = ((i - x0) % g.n + g.n) % g.n;
    CHECK(out.values[static_cast<std::size_t>(i)] ==
          doctest::Approx(k.weights.values[static_cast<std::size_t>(off)]).epsilon(1e-13));
  }
}

TEST_CASE("L_p contraction on random fields") {
  const GridSpec g(1, 64, 1.0);
  const MollifierKernel k = make_kernel(g, 1.0 / 8.0);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const ScalarField u = random_field(g, 600 + s, 2.0);
    const ScalarField mu = mollify(u, k);
    for (double p : {2.0, 4.0})
      CHECK(lp_norm_pow(mu, p) <= lp_norm_pow(u, p) * (1.0 + 1e-12));
  }
}

TEST_CASE("pointwise power bound") {
  const GridSpec g(1, 64, 1.0);
  const MollifierKernel k = make_kernel(g, 1.0 / 8.0);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const ScalarField u = random_field(g, 800 + s, 2.0);
    const ScalarField mu = mollify(u, k);
    for (double p : {3.0, 4.0}) {
      ScalarField upow(g);
      for (std::size_t i = 0; i < g.size(); ++i)
        upow.values[i] = std::pow(std::abs(u.values[i]), p);
      const ScalarField mpow = mollify(upow, k);
      double scale = 1.0;
      for (double x : mpow.values) scale = std::max(scale, x);
      for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::pow(std::abs(mu.values[i]), p) <= mpow.values[i] + 1e-12 * scale);
    }
  }
}

TEST_CASE("mass conservation") {
  const GridSpec g(1, 64, 1.0);
  const MollifierKernel k = make_kernel(g, 1.0 / 8.0);
  ScalarField ones(g);
  std::fill(ones.values.begin(), ones.values.end(), 1.0);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const ScalarField u = random_field(g, 900 + s, 3.0);
    CHECK(inner(mollify(u, k), ones) == doctest::Approx(inner(u, ones)).epsilon(1e-12));
  }
}

TEST_CASE("mode-wise mollification") {
  const GridSpec g(1, 64, 1.0);
  const MollifierKernel k = make_kernel(g, 1.0 / 8.0);

  SeqField empty(g);
  CHECK(mollify_seq(empty, k).mode_count() == 0);

  SeqField gseq(g, {random_field(g, 1), random_field(g, 2)});
  const SeqField mg = mollify_seq(gseq, k);
  for (int kk = 0; kk < 2; ++kk) {
    const ScalarField direct = mollify(gseq.modes[static_cast<std::size_t>(kk)], k);
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(mg.modes[static_cast<std::size_t>(kk)].values[i] == direct.values[i]);
  }

  // l2 magnitude of the mollified stack is dominated by the mollified
  // magnitude (integral triangle inequality with nonnegative weights).
  const ScalarField lhs = seq_ell2_pointwise(mg);
  const ScalarField rhs = mollify(seq_ell2_pointwise(gseq), k);
  double scale = 1.0;
  for (double x : rhs.values) scale = std::max(scale, x);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(lhs.values[i] <= rhs.values[i] + 1e-12 * scale);
}

TEST_CASE("halving eps tightens the approximation of smooth fields") {
  const GridSpec g(1, 64, 1.0);
  const ScalarField u = sample_field(g, [](const std::array<double, 3>& x) {
    return std::sin(2.0 * std::numbers::pi * x[0]) +
           0.5 * std::cos(4.0 * std::numbers::pi * x[0]);
  });
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0}) {
    const MollifierKernel k = make_kernel(g, eps);
    ScalarField diff = mollify(u, k);
    add_scaled(diff, -1.0, u);
    const double gap = lp_norm_pow(diff, 2.0);
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("grid mismatch is rejected") {
  const GridSpec g(1, 64, 1.0);
  const GridSpec g2(1, 32, 1.0);
  const MollifierKernel k = make_kernel(g, 1.0 / 8.0);
  CHECK_THROWS_AS(mollify(ScalarField(g2), k), std::invalid_argument);
  CHECK_THROWS_AS(mollify_seq(SeqField(g2), k), std::invalid_argument);
}

TEST_SUITE_END();
