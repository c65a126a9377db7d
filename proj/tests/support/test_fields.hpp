#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "spde/lattice.hpp"

namespace test_fields {

inline double u01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline spde::ScalarField random_field(const spde::GridSpec& grid, std::uint64_t seed,
                                      double amp = 1.0) {
  std::mt19937_64 eng(seed);
  spde::ScalarField out(grid);
  for (double& x : out.values) x = amp * (2.0 * u01(eng) - 1.0);
  return out;
}

/// Low-frequency trigonometric combination; smooth on the torus by
/// construction.
inline spde::ScalarField random_smooth_field(const spde::GridSpec& grid, std::uint64_t seed,
                                             double amp = 1.0) {
  std::mt19937_64 eng(seed);
  const double a1 = amp * (2.0 * u01(eng) - 1.0);
  const double a2 = amp * (2.0 * u01(eng) - 1.0);
  const double a3 = amp * (2.0 * u01(eng) - 1.0);
  const double a4 = amp * (2.0 * u01(eng) - 1.0);
  const double twopi = 2.0 * std::numbers::pi;
  return spde::sample_field(grid, [&](const std::array<double, 3>& x) {
    double v = a4;
    for (int a = 0; a < grid.dim; ++a) {
      const double q = twopi * x[static_cast<std::size_t>(a)] / grid.len;
      v += a1 * std::sin(q) + a2 * std::cos(q) + a3 * std::sin(2.0 * q);
    }
    return v;
  });
}

inline spde::VectorField random_vector_field(const spde::GridSpec& grid, std::uint64_t seed,
                                             double amp = 1.0) {
  std::vector<spde::ScalarField> comps;
  for (int a = 0; a < grid.dim; ++a)
    comps.push_back(random_field(grid, seed + 1000u * static_cast<std::uint64_t>(a + 1), amp));
  return spde::VectorField(grid, std::move(comps));
}

}  // namespace test_fields
