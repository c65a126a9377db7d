#include "spde/mollify.hpp"

#include <algorithm>
#include <cmath>

namespace spde {

namespace {

double standard_bump(double rho2) {
  if (rho2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - rho2));
}

}  // namespace

MollifierKernel make_kernel(const GridSpec& grid, double eps) {
  if (!(eps >= 2.0 * grid.h) || !(eps < grid.len / 4.0))
    throw std::invalid_argument("kernel resolution error");

  const int n = grid.n;
  const double len = grid.len;
  // Sample zeta(x/eps) at lattice offsets within the support ball, using the
  // minimal-image distance from the origin.
  const int reach = static_cast<int>(std::ceil(eps / grid.h));
  std::vector<MollifierKernel::SupportPoint> pts;
  std::array<int, 3> off{0, 0, 0};
  const int lo = -reach, hi = reach;

  auto dist2 = [&](const std::array<int, 3>& o) {
    double d2 = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      double d = std::abs(o[static_cast<std::size_t>(a)] * grid.h);
      d = std::min(d, len - d);
      d2 += d * d;
    }
    return d2;
  };

  const int b1 = grid.dim >= 2 ? hi : 0;
  const int b2 = grid.dim >= 3 ? hi : 0;
  for (int i0 = lo; i0 <= hi; ++i0)
    for (int i1 = (grid.dim >= 2 ? lo : 0); i1 <= b1; ++i1)
      for (int i2 = (grid.dim >= 3 ? lo : 0); i2 <= b2; ++i2) {
        off = {i0, i1, i2};
        const double v = standard_bump(dist2(off) / (eps * eps));
        if (v > 0.0) pts.push_back({off, v});
      }

  const double raw_sum = detail::pairwise_map_sum(0, pts.size(), [&](std::size_t i) { return pts[i].w; });
  const double cell = detail::abs_pow(grid.h, static_cast<double>(grid.dim));
  const double scale = 1.0 / (raw_sum * cell);
  for (auto& p : pts) p.w *= scale;

  MollifierKernel k{grid, eps, ScalarField(grid), std::move(pts)};
  // Full-grid copy for inspection and the delta-response tests.
  for (const auto& p : k.support) {
    std::size_t idx = 0;
    for (int a = 0; a < grid.dim; ++a) {
      const int c = ((p.offset[static_cast<std::size_t>(a)] % n) + n) % n;
      idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(c);
    }
    k.weights.values[idx] = p.w;
  }
  return k;
}

ScalarField mollify(const ScalarField& u, const MollifierKernel& k) {
  if (u.grid != k.grid) throw std::invalid_argument("grid mismatch");
  const GridSpec& g = u.grid;
  const int n = g.n;
  const double cell = detail::abs_pow(g.h, static_cast<double>(g.dim));

  ScalarField out(g);
  std::array<int, 3> c{0, 0, 0};
  const std::size_t total = g.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (int a = g.dim - 1; a >= 0; --a) {
      c[static_cast<std::size_t>(a)] = static_cast<int>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
    }
    double acc = 0.0;
    for (const auto& p : k.support) {
      std::size_t src = 0;
      for (int a = 0; a < g.dim; ++a) {
        int q = c[static_cast<std::size_t>(a)] - p.offset[static_cast<std::size_t>(a)];
        q = ((q % n) + n) % n;
        src = src * static_cast<std::size_t>(n) + static_cast<std::size_t>(q);
      }
      acc += u.values[src] * p.w;
    }
    out.values[idx] = acc * cell;
  }
  return out;
}

SeqField mollify_seq(const SeqField& g, const MollifierKernel& k) {
  if (g.grid != k.grid) throw std::invalid_argument("grid mismatch");
  SeqField out(g.grid);
  out.modes.reserve(g.modes.size());
  for (const auto& mode : g.modes) out.modes.push_back(mollify(mode, k));
  return out;
}

VectorField mollify_vec(const VectorField& F, const MollifierKernel& k) {
  if (F.grid != k.grid) throw std::invalid_argument("grid mismatch");
  std::vector<ScalarField> comps;
  comps.reserve(F.comps.size());
  for (const auto& comp : F.comps) comps.push_back(mollify(comp, k));
  return VectorField(F.grid, std::move(comps));
}

}  // namespace spde
