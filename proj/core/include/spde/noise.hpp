#pragma once

#include <cstdint>
#include <vector>

#include "spde/lattice.hpp"

namespace spde {

/// Uniform time grid on [0, T].  t_M is T by definition, so the endpoint is
/// exact even when T/M is not representable.
struct TimeGrid {
  double T;
  int M;
  double dt;

  TimeGrid(double T_, int M_);

  double time(int m) const { return m == M ? T : static_cast<double>(m) * dt; }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) { return a.T == b.T && a.M == b.M; }
  friend bool operator!=(const TimeGrid& a, const TimeGrid& b) { return !(a == b); }
};

/// Table of Brownian increments for K independent modes over M steps,
/// reproducible bit-for-bit from (seed, replicate, K, tg).  Mode k of
/// replicate r draws from its own generator stream keyed on (seed, r, k), so
/// modes are independent and replicates non-overlapping.
struct NoisePath {
  TimeGrid tg;
  int K;
  std::uint64_t seed;
  std::uint64_t replicate;
  std::vector<std::vector<double>> dW;  // K x M
  std::vector<std::vector<double>> w;   // K x (M+1), prefix sums, w[k][0] = 0
};

NoisePath sample_noise(const TimeGrid& tg, int K, std::uint64_t seed, std::uint64_t replicate);

/// w^k at grid time t_m (prefix sum of increments; m = 0 gives 0).
double brownian_value(const NoisePath& np, int k, int m);

namespace detail {

/// splitmix64 finalizer; used to derive independent generator streams from
/// structured keys.
std::uint64_t mix64(std::uint64_t z);

/// Stream key for (seed, replicate, mode).
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t replicate, std::uint64_t k);

}  // namespace detail

}  // namespace spde
