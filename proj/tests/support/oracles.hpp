#pragma once

// Independent oracles for the test suites.  Everything here recomputes
// expected values through a different route than the library (long-double
// plain loops, naive convolutions, the scalar one-dimensional calculus), so
// agreement is evidence rather than tautology.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "spde/lattice.hpp"

namespace oracles {

inline long double brute_inner(const spde::ScalarField& u, const spde::ScalarField& v) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < u.size(); ++i)
    s += static_cast<long double>(u.values[i]) * static_cast<long double>(v.values[i]);
  long double cell = 1.0L;
  for (int a = 0; a < u.grid.dim; ++a) cell *= static_cast<long double>(u.grid.h);
  return s * cell;
}

inline long double brute_lp_pow(const spde::ScalarField& u, double p) {
  long double s = 0.0L;
  for (double x : u.values) s += std::pow(std::abs(static_cast<long double>(x)), static_cast<long double>(p));
  long double cell = 1.0L;
  for (int a = 0; a < u.grid.dim; ++a) cell *= static_cast<long double>(u.grid.h);
  return s * cell;
}

/// Scalar Euler discretization of the one-dimensional identity for |w_t|^p:
/// the same left-endpoint rule applied to the scalar process, kept fully
/// independent of the lattice code path.
struct ScalarItoSeries {
  std::vector<double> lhs, rhs, stoch, l2;
};

inline ScalarItoSeries scalar_ito_pow(const std::vector<double>& w, double p, double dt) {
  const std::size_t M = w.size() - 1;
  ScalarItoSeries s;
  s.lhs.resize(M + 1);
  s.rhs.resize(M + 1);
  s.stoch.assign(M + 1, 0.0);
  s.l2.assign(M + 1, 0.0);
  for (std::size_t m = 0; m <= M; ++m) s.lhs[m] = std::pow(std::abs(w[m]), p);
  s.rhs[0] = s.lhs[0];
  for (std::size_t m = 0; m < M; ++m) {
    const double wm = w[m];
    const double dw = w[m + 1] - w[m];
    const double weight = p == 2.0 ? 1.0 : std::pow(std::abs(wm), p - 2.0);
    const double stoch_inc = p * weight * wm * dw;
    const double l2_inc = 0.5 * p * (p - 1.0) * weight * dt;
    s.stoch[m + 1] = s.stoch[m] + stoch_inc;
    s.l2[m + 1] = s.l2[m] + l2_inc;
    s.rhs[m + 1] = s.rhs[m] + stoch_inc + l2_inc;
  }
  return s;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    const double fa = static_cast<double>(i) / static_cast<double>(a.size());
    const double fb = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

}  // namespace oracles
