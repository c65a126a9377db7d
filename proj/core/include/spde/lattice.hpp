#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace spde {

/// Uniform periodic lattice on the torus [0,len)^dim.
///
/// All fields in this library live on such a lattice.  The torus replaces the
/// whole space: every shipped scenario keeps its data concentrated well inside
/// one period, so wrap-around effects are negligible and all L_p quadratures
/// are finite.
struct GridSpec {
  int dim;     // 1, 2 or 3
  int n;       // points per axis, even, >= 8
  double len;  // physical side length, > 0
  double h;    // spacing, len / n

  GridSpec(int dim_, int n_, double len_);

  std::size_t size() const { return size_; }

  // Grid coordinate of point index along one axis.
  double coord(int i) const { return static_cast<double>(i) * h; }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.dim == b.dim && a.n == b.n && a.len == b.len;
  }
  friend bool operator!=(const GridSpec& a, const GridSpec& b) { return !(a == b); }

 private:
  std::size_t size_;
};

/// Real lattice function, row-major over axes (last axis contiguous).
struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  explicit ScalarField(const GridSpec& g) : grid(g), values(g.size(), 0.0) {}
  ScalarField(const GridSpec& g, std::vector<double> v);

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

/// dim-component field (plays f^1..f^d and gradients).
struct VectorField {
  GridSpec grid;
  std::vector<ScalarField> comps;

  explicit VectorField(const GridSpec& g);
  VectorField(const GridSpec& g, std::vector<ScalarField> c);
};

/// Finite stack of modes (plays the l2-valued g = (g^1, g^2, ...)).
struct SeqField {
  GridSpec grid;
  std::vector<ScalarField> modes;

  explicit SeqField(const GridSpec& g) : grid(g) {}
  SeqField(const GridSpec& g, std::vector<ScalarField> m);

  int mode_count() const { return static_cast<int>(modes.size()); }
};

namespace detail {

/// Pairwise reduction of f(lo..hi); keeps accumulated rounding near
/// eps*log2(n) so quadrature tolerances hold on 3-d grids too.
template <class F>
double pairwise_map_sum(std::size_t lo, std::size_t hi, const F& f) {
  if (hi - lo <= 32) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_map_sum(lo, mid, f) + pairwise_map_sum(mid, hi, f);
}

/// |x|^p with an exact multiply chain for small integer p.
double abs_pow(double x, double p);

bool all_finite(const std::vector<double>& v);

}  // namespace detail

/// Quadrature of |u|^p over the torus: sum |u(x)|^p h^dim.  Requires p >= 2.
double lp_norm_pow(const ScalarField& u, double p);

/// Vector-valued version: sum |F(x)|^p h^dim with the Euclidean magnitude.
double lp_norm_pow(const VectorField& F, double p);

/// Mode-stack version: sum |g(x)|_{l2}^p h^dim.
double lp_norm_pow(const SeqField& g, double p);

/// Pointwise l2 magnitude of a mode stack: x -> (sum_k g^k(x)^2)^(1/2).
ScalarField seq_ell2_pointwise(const SeqField& g);

/// Centered difference gradient with periodic wrap, one component per axis.
VectorField grad(const ScalarField& u);

/// Divergence: sum over axes of the centered difference of comps[i] along i.
ScalarField div(const VectorField& F);

/// L2 pairing (u, v) = sum u(x) v(x) h^dim.
double inner(const ScalarField& u, const ScalarField& v);

/// Smooth compactly supported test function: exp(1 - 1/(1 - |x-c|^2/r^2))
/// inside the (torus-metric) ball of the given radius, 0 outside.
/// Requires 0 < radius < len/2 so the support fits strictly inside a period.
ScalarField bump_test_function(const GridSpec& grid, const std::vector<double>& center,
                               double radius);

// ---- element-wise helpers ------------------------------------------------

void add_scaled(ScalarField& dst, double c, const ScalarField& src);
ScalarField scaled(const ScalarField& u, double c);
double max_abs(const ScalarField& u);

/// Samples f(x) at every lattice point; f receives a dim-length coordinate
/// array (trailing entries zero).
template <class F>
ScalarField sample_field(const GridSpec& g, F&& f) {
  ScalarField out(g);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  const std::size_t total = g.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (int a = g.dim - 1; a >= 0; --a) {
      x[static_cast<std::size_t>(a)] = g.coord(static_cast<int>(rest % static_cast<std::size_t>(g.n)));
      rest /= static_cast<std::size_t>(g.n);
    }
    out.values[idx] = f(x);
  }
  return out;
}

}  // namespace spde
