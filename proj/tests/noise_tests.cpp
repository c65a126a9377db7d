#include <cmath>

#include "doctest.h"
#include "spde/noise.hpp"
#include "support/oracles.hpp"

using namespace spde;

TEST_SUITE_BEGIN("noise");

TEST_CASE("time grid endpoints") {
  CHECK_THROWS_AS(TimeGrid(0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid(1.0, 0), std::invalid_argument);
  const TimeGrid tg(0.7, 3);
  CHECK(tg.time(0) == 0.0);
  CHECK(tg.time(3) == 0.7);  // the endpoint is T by definition
  CHECK(tg.time(1) == tg.dt);
}

TEST_CASE("K = 0 produces an empty table") {
  const NoisePath np = sample_noise(TimeGrid(1.0, 16), 0, 1, 0);
  CHECK(np.dW.empty());
}

TEST_CASE("generation is reproducible bit-for-bit") {
  const TimeGrid tg(1.0, 256);
  const NoisePath a = sample_noise(tg, 3, 99, 7);
  const NoisePath b = sample_noise(tg, 3, 99, 7);
  CHECK(a.dW == b.dW);

  const NoisePath c = sample_noise(tg, 3, 99, 8);
  CHECK(a.dW != c.dW);
  const NoisePath d = sample_noise(tg, 3, 98, 7);
  CHECK(a.dW != d.dW);
}

TEST_CASE("increment moments match the normal law") {
  const int M = 100000;
  const TimeGrid tg(1.0, M);
  const NoisePath np = sample_noise(tg, 1, 20240601, 0);

  double mean = 0.0;
  for (double x : np.dW[0]) mean += x;
  mean /= M;
  CHECK(std::abs(mean) <= 4.0 * std::sqrt(tg.dt / M));

  double var = 0.0;
  for (double x : np.dW[0]) {
    const double z = x / std::sqrt(tg.dt);
    var += z * z;
  }
  const double mean_z = mean / std::sqrt(tg.dt);
  var = var / M - mean_z * mean_z;
  CHECK(var >= 0.98);
  CHECK(var <= 1.02);
}

TEST_CASE("brownian prefix values") {
  const TimeGrid tg(2.0, 512);
  const NoisePath np = sample_noise(tg, 2, 5, 3);
  CHECK(brownian_value(np, 0, 0) == 0.0);

  double sum = 0.0;
  for (double x : np.dW[1]) sum += x;
  CHECK(brownian_value(np, 1, tg.M) == sum);  // same left-fold order, bit-equal

  CHECK_THROWS_AS(brownian_value(np, 2, 0), std::out_of_range);
  CHECK_THROWS_AS(brownian_value(np, 0, tg.M + 1), std::out_of_range);
}

TEST_CASE("quadratic variation concentrates around T") {
  const TimeGrid tg(1.0, 4096);
  const NoisePath np = sample_noise(tg, 1, 77, 0);
  double qv = 0.0;
  for (double x : np.dW[0]) qv += x * x;
  CHECK(qv / tg.T >= 0.9);
  CHECK(qv / tg.T <= 1.1);
}

TEST_CASE("distinct modes are empirically uncorrelated") {
  const int M = 100000;
  const NoisePath np = sample_noise(TimeGrid(1.0, M), 2, 31337, 0);
  double m0 = 0.0, m1 = 0.0;
  for (int m = 0; m < M; ++m) {
    m0 += np.dW[0][static_cast<std::size_t>(m)];
    m1 += np.dW[1][static_cast<std::size_t>(m)];
  }
  m0 /= M;
  m1 /= M;
  double c01 = 0.0, v0 = 0.0, v1 = 0.0;
  for (int m = 0; m < M; ++m) {
    const double a = np.dW[0][static_cast<std::size_t>(m)] - m0;
    const double b = np.dW[1][static_cast<std::size_t>(m)] - m1;
    c01 += a * b;
    v0 += a * a;
    v1 += b * b;
  }
  CHECK(std::abs(c01 / std::sqrt(v0 * v1)) <= 0.02);
}

TEST_CASE("pairing increments at double resolution preserves the law at T") {
  // Marginals of w_T from an M-step table and from a 2M-step table with
  // paired increments summed must agree in law; two-sample KS at the 1e-3
  // level over 1e4 replicates.
  const int R = 10000;
  const TimeGrid coarse(1.0, 8);
  const TimeGrid fine(1.0, 16);
  std::vector<double> a, b;
  a.reserve(R);
  b.reserve(R);
  for (int r = 0; r < R; ++r) {
    a.push_back(brownian_value(sample_noise(coarse, 1, 404, static_cast<std::uint64_t>(r)), 0, 8));
    const NoisePath f = sample_noise(fine, 1, 505, static_cast<std::uint64_t>(r));
    double w = 0.0;
    for (int m = 0; m < 16; m += 2)
      w += f.dW[0][static_cast<std::size_t>(m)] + f.dW[0][static_cast<std::size_t>(m) + 1];
    b.push_back(w);
  }
  const double d = oracles::ks_statistic(a, b);
  // critical value c(alpha) * sqrt((n1+n2)/(n1*n2)) with alpha = 1e-3
  const double crit = 1.949 * std::sqrt(2.0 / R);
  CHECK(d <= crit);
}

TEST_SUITE_END();
