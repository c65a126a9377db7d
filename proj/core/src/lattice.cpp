#include "spde/lattice.hpp"

#include <algorithm>
#include <limits>

namespace spde {

GridSpec::GridSpec(int dim_, int n_, double len_) : dim(dim_), n(n_), len(len_), h(len_ / n_) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dim must be 1, 2 or 3");
  if (n < 8 || n % 2 != 0) throw std::invalid_argument("grid n must be even and >= 8");
  if (!(len > 0.0) || !std::isfinite(len)) throw std::invalid_argument("grid len must be positive");
  size_ = 1;
  for (int a = 0; a < dim; ++a) {
    if (size_ > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(n))
      throw std::invalid_argument("grid too large");
    size_ *= static_cast<std::size_t>(n);
  }
}

ScalarField::ScalarField(const GridSpec& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != g.size()) throw std::invalid_argument("field length does not match grid");
}

VectorField::VectorField(const GridSpec& g) : grid(g) {
  comps.reserve(static_cast<std::size_t>(g.dim));
  for (int a = 0; a < g.dim; ++a) comps.emplace_back(g);
}

VectorField::VectorField(const GridSpec& g, std::vector<ScalarField> c) : grid(g), comps(std::move(c)) {
  if (comps.size() != static_cast<std::size_t>(g.dim))
    throw std::invalid_argument("vector field needs one component per axis");
  for (const auto& comp : comps)
    if (comp.grid != g) throw std::invalid_argument("grid mismatch");
}

SeqField::SeqField(const GridSpec& g, std::vector<ScalarField> m) : grid(g), modes(std::move(m)) {
  for (const auto& mode : modes)
    if (mode.grid != g) throw std::invalid_argument("grid mismatch");
}

namespace detail {

double abs_pow(double x, double p) {
  const double a = std::abs(x);
  const int ip = static_cast<int>(p);
  if (p == static_cast<double>(ip) && ip >= 0 && ip <= 8) {
    double r = 1.0;
    for (int i = 0; i < ip; ++i) r *= a;
    return r;
  }
  return std::pow(a, p);
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace detail

double lp_norm_pow(const ScalarField& u, double p) {
  if (!(p >= 2.0)) throw std::invalid_argument("p must be >= 2");
  if (!detail::all_finite(u.values)) throw std::invalid_argument("non-finite field");
  const double cell = detail::abs_pow(u.grid.h, static_cast<double>(u.grid.dim));
  const double* v = u.values.data();
  const double s =
      detail::pairwise_map_sum(0, u.size(), [v, p](std::size_t i) { return detail::abs_pow(v[i], p); });
  return s * cell;
}

namespace {

double stack_lp_pow(const GridSpec& grid, const std::vector<ScalarField>& parts, double p) {
  if (!(p >= 2.0)) throw std::invalid_argument("p must be >= 2");
  for (const auto& f : parts) {
    if (f.grid != grid) throw std::invalid_argument("grid mismatch");
    if (!detail::all_finite(f.values)) throw std::invalid_argument("non-finite field");
  }
  const double cell = detail::abs_pow(grid.h, static_cast<double>(grid.dim));
  const double s = detail::pairwise_map_sum(0, grid.size(), [&](std::size_t i) {
    double q = 0.0;
    for (const auto& f : parts) q += f.values[i] * f.values[i];
    return detail::abs_pow(std::sqrt(q), p);
  });
  return s * cell;
}

}  // namespace

double lp_norm_pow(const VectorField& F, double p) { return stack_lp_pow(F.grid, F.comps, p); }

double lp_norm_pow(const SeqField& g, double p) { return stack_lp_pow(g.grid, g.modes, p); }

ScalarField seq_ell2_pointwise(const SeqField& g) {
  ScalarField out(g.grid);
  for (const auto& mode : g.modes) {
    if (mode.grid != g.grid) throw std::invalid_argument("grid mismatch");
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += mode.values[i] * mode.values[i];
  }
  for (double& x : out.values) x = std::sqrt(x);
  return out;
}

namespace {

// Centered difference of u along one axis, scaled by 1/(2h), periodic wrap.
void axis_diff(const ScalarField& u, int axis, ScalarField& out) {
  const int n = u.grid.n;
  const int dim = u.grid.dim;
  const double inv2h = 1.0 / (2.0 * u.grid.h);
  std::ptrdiff_t stride = 1;
  for (int b = dim - 1; b > axis; --b) stride *= n;

  const std::size_t total = u.size();
  const double* v = u.values.data();
  double* o = out.values.data();
  for (std::size_t idx = 0; idx < total; ++idx) {
    const std::ptrdiff_t c =
        static_cast<std::ptrdiff_t>(idx / static_cast<std::size_t>(stride)) % n;
    const std::ptrdiff_t up = static_cast<std::ptrdiff_t>(idx) + (c + 1 < n ? stride : stride * (1 - n));
    const std::ptrdiff_t dn = static_cast<std::ptrdiff_t>(idx) - (c > 0 ? stride : stride * (1 - n));
    o[idx] = (v[up] - v[dn]) * inv2h;
  }
}

}  // namespace

VectorField grad(const ScalarField& u) {
  VectorField out(u.grid);
  for (int a = 0; a < u.grid.dim; ++a) axis_diff(u, a, out.comps[static_cast<std::size_t>(a)]);
  return out;
}

ScalarField div(const VectorField& F) {
  ScalarField out(F.grid);
  ScalarField tmp(F.grid);
  for (int a = 0; a < F.grid.dim; ++a) {
    axis_diff(F.comps[static_cast<std::size_t>(a)], a, tmp);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += tmp.values[i];
  }
  return out;
}

double inner(const ScalarField& u, const ScalarField& v) {
  if (u.grid != v.grid) throw std::invalid_argument("grid mismatch");
  const double cell = detail::abs_pow(u.grid.h, static_cast<double>(u.grid.dim));
  const double* a = u.values.data();
  const double* b = v.values.data();
  const double s = detail::pairwise_map_sum(0, u.size(), [a, b](std::size_t i) { return a[i] * b[i]; });
  return s * cell;
}

ScalarField bump_test_function(const GridSpec& grid, const std::vector<double>& center,
                               double radius) {
  if (center.size() != static_cast<std::size_t>(grid.dim))
    throw std::invalid_argument("center dimension mismatch");
  if (!(radius > 0.0) || !(radius < grid.len / 2.0))
    throw std::invalid_argument("radius out of range");
  const double len = grid.len;
  const double r2 = radius * radius;
  return sample_field(grid, [&](const std::array<double, 3>& x) {
    double d2 = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      double d = std::abs(x[static_cast<std::size_t>(a)] - center[static_cast<std::size_t>(a)]);
      d = std::min(d, len - d);
      d2 += d * d;
    }
    const double rho2 = d2 / r2;
    if (rho2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - rho2));
  });
}

void add_scaled(ScalarField& dst, double c, const ScalarField& src) {
  if (dst.grid != src.grid) throw std::invalid_argument("grid mismatch");
  for (std::size_t i = 0; i < dst.size(); ++i) dst.values[i] += c * src.values[i];
}

ScalarField scaled(const ScalarField& u, double c) {
  ScalarField out(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) out.values[i] = c * u.values[i];
  return out;
}

double max_abs(const ScalarField& u) {
  double m = 0.0;
  for (double x : u.values) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace spde
