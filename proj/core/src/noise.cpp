#include "spde/noise.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace spde {

TimeGrid::TimeGrid(double T_, int M_) : T(T_), M(M_), dt(T_ / M_) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("horizon T must be positive");
  if (M < 1) throw std::invalid_argument("step count M must be >= 1");
}

namespace detail {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t replicate, std::uint64_t k) {
  return mix64(mix64(mix64(seed) ^ replicate) ^ k);
}

}  // namespace detail

namespace {

// Box-Muller on top of mt19937_64; normal_distribution is not pinned down by
// the standard, this is.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t key) : eng_(key) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1], u2 in [0, 1)
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace

NoisePath sample_noise(const TimeGrid& tg, int K, std::uint64_t seed, std::uint64_t replicate) {
  if (K < 0) throw std::invalid_argument("mode count K must be >= 0");
  NoisePath np{tg, K, seed, replicate, {}, {}};
  np.dW.resize(static_cast<std::size_t>(K));
  np.w.resize(static_cast<std::size_t>(K));
  const double root_dt = std::sqrt(tg.dt);
  for (int k = 0; k < K; ++k) {
    NormalStream stream(detail::stream_key(seed, replicate, static_cast<std::uint64_t>(k)));
    auto& inc = np.dW[static_cast<std::size_t>(k)];
    auto& pre = np.w[static_cast<std::size_t>(k)];
    inc.resize(static_cast<std::size_t>(tg.M));
    pre.resize(static_cast<std::size_t>(tg.M) + 1);
    pre[0] = 0.0;
    for (int m = 0; m < tg.M; ++m) {
      inc[static_cast<std::size_t>(m)] = stream.next() * root_dt;
      pre[static_cast<std::size_t>(m) + 1] = pre[static_cast<std::size_t>(m)] + inc[static_cast<std::size_t>(m)];
    }
  }
  return np;
}

double brownian_value(const NoisePath& np, int k, int m) {
  if (k < 0 || k >= np.K) throw std::out_of_range("mode index out of range");
  if (m < 0 || m > np.tg.M) throw std::out_of_range("time index out of range");
  return np.w[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)];
}

}  // namespace spde
