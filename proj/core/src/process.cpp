#include "spde/process.hpp"

#include <algorithm>
#include <cmath>

namespace spde {

ProcessPath integrate(const ScalarField& u0, const CoefficientSpec& coeffs, const NoisePath& np) {
  const GridSpec& grid = u0.grid;
  const TimeGrid& tg = np.tg;
  if (coeffs.modes != np.K) throw std::invalid_argument("noise mode count does not match coefficients");
  if (coeffs.mode == CoefficientSpec::Mode::Feedback) {
    const double bound = grid.h * grid.h / (2.0 * grid.dim);
    if (tg.dt * std::max(coeffs.feedback_gain, 0.0) > bound * (1.0 + 1e-12))
      throw std::invalid_argument("feedback mode requires dt * gain <= h^2 / (2 dim)");
  }

  ProcessPath path{tg, {}, {}, {}, {}};
  path.snapshots.reserve(static_cast<std::size_t>(tg.M) + 1);
  path.f0_steps.reserve(static_cast<std::size_t>(tg.M));
  path.fvec_steps.reserve(static_cast<std::size_t>(tg.M));
  path.g_steps.reserve(static_cast<std::size_t>(tg.M));
  path.snapshots.push_back(u0);

  ScalarField u = u0;
  for (int m = 0; m < tg.M; ++m) {
    const double t = tg.time(m);
    ScalarField f0 = coeffs.f0(t, u);
    VectorField fvec = coeffs.fvec(t, u);
    SeqField g = coeffs.g(t, u);
    if (f0.grid != grid || fvec.grid != grid || g.grid != grid)
      throw std::invalid_argument("grid mismatch");
    if (g.mode_count() != np.K)
      throw std::invalid_argument("noise mode count does not match coefficients");

    ScalarField drift = div(fvec);
    add_scaled(drift, 1.0, f0);

    ScalarField next = u;
    add_scaled(next, tg.dt, drift);
    for (int k = 0; k < np.K; ++k)
      add_scaled(next, np.dW[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)],
                 g.modes[static_cast<std::size_t>(k)]);

    if (!detail::all_finite(next.values))
      throw BlowUpError(m, "blow-up at step " + std::to_string(m));

    path.f0_steps.push_back(std::move(f0));
    path.fvec_steps.push_back(std::move(fvec));
    path.g_steps.push_back(std::move(g));
    path.snapshots.push_back(next);
    u = std::move(next);
  }
  return path;
}

namespace {

// First grid index with t_m >= the boundary ("snap to the next grid time"),
// or with the monitored |w| at or above the level; M if never.
int resolve_step_time(const StepTime& st, const NoisePath& np) {
  const TimeGrid& tg = np.tg;
  switch (st.kind) {
    case StepTime::Kind::Fixed: {
      if (st.time <= 0.0) return 0;
      if (st.time >= tg.T) return tg.M;
      const int m = static_cast<int>(std::ceil(st.time / tg.dt - 1e-12));
      return std::clamp(m, 0, tg.M);
    }
    case StepTime::Kind::Hitting: {
      if (st.mode < 0 || st.mode >= np.K) throw std::out_of_range("mode index out of range");
      for (int m = 0; m <= tg.M; ++m)
        if (std::abs(brownian_value(np, st.mode, m)) >= st.level) return m;
      return tg.M;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

ProcessPath integrate_step_process(const StepProcessSpec& sp, const NoisePath& np) {
  if (sp.j < 1) throw std::invalid_argument("step process needs j >= 1");
  if (sp.taus.size() != static_cast<std::size_t>(sp.j) + 1)
    throw std::invalid_argument("step process needs j+1 interval boundaries");
  if (sp.gik.size() != static_cast<std::size_t>(sp.j))
    throw std::invalid_argument("gik table must be j x j");
  for (const auto& row : sp.gik) {
    if (row.size() != static_cast<std::size_t>(sp.j))
      throw std::invalid_argument("gik table must be j x j");
    for (const auto& f : row)
      if (f.grid != sp.grid) throw std::invalid_argument("grid mismatch");
  }
  if (np.K < sp.j) throw std::invalid_argument("noise needs at least j modes");

  const TimeGrid& tg = np.tg;
  std::vector<int> mi(static_cast<std::size_t>(sp.j) + 1);
  for (int i = 0; i <= sp.j; ++i) {
    mi[static_cast<std::size_t>(i)] = resolve_step_time(sp.taus[static_cast<std::size_t>(i)], np);
    if (i > 0)
      mi[static_cast<std::size_t>(i)] =
          std::max(mi[static_cast<std::size_t>(i)], mi[static_cast<std::size_t>(i) - 1]);
  }

  ProcessPath path{tg, {}, {}, {}, {}};
  path.snapshots.reserve(static_cast<std::size_t>(tg.M) + 1);

  // Closed form, evaluated snapshot by snapshot.
  for (int m = 0; m <= tg.M; ++m) {
    ScalarField u(sp.grid);
    for (int i = 1; i <= sp.j; ++i) {
      const int hi = std::min(m, mi[static_cast<std::size_t>(i)]);
      const int lo = std::min(m, mi[static_cast<std::size_t>(i) - 1]);
      for (int k = 0; k < sp.j; ++k) {
        const double dw = brownian_value(np, k, hi) - brownian_value(np, k, lo);
        if (dw != 0.0)
          add_scaled(u, dw, sp.gik[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>(k)]);
      }
    }
    path.snapshots.push_back(std::move(u));
  }

  // Equivalent left-endpoint coefficient caches: step m uses interval i iff
  // m_{i-1} <= m < m_i.
  for (int m = 0; m < tg.M; ++m) {
    path.f0_steps.emplace_back(sp.grid);
    path.fvec_steps.emplace_back(sp.grid);
    SeqField g(sp.grid);
    for (int k = 0; k < sp.j; ++k) {
      ScalarField mode(sp.grid);
      for (int i = 1; i <= sp.j; ++i)
        if (mi[static_cast<std::size_t>(i) - 1] <= m && m < mi[static_cast<std::size_t>(i)])
          add_scaled(mode, 1.0, sp.gik[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>(k)]);
      g.modes.push_back(std::move(mode));
    }
    path.g_steps.push_back(std::move(g));
  }
  return path;
}

double weak_form_residual(const ProcessPath& path, const NoisePath& np, const ScalarField& phi) {
  if (phi.grid != path.grid()) throw std::invalid_argument("grid mismatch");
  const TimeGrid& tg = path.tg;
  const int K = static_cast<int>(path.g_steps.empty() ? 0 : path.g_steps.front().modes.size());
  const VectorField dphi = grad(phi);

  const double base = inner(path.snapshots.front(), phi);
  double acc = 0.0;
  double worst = 0.0;
  double scale = std::max(1.0, std::abs(base));
  for (int m = 0; m <= tg.M; ++m) {
    const double pairing = inner(path.snapshots[static_cast<std::size_t>(m)], phi);
    scale = std::max(scale, std::abs(pairing));
    worst = std::max(worst, std::abs(pairing - base - acc));
    if (m == tg.M) break;

    double drift = inner(path.f0_steps[static_cast<std::size_t>(m)], phi);
    for (int a = 0; a < path.grid().dim; ++a)
      drift -= inner(path.fvec_steps[static_cast<std::size_t>(m)].comps[static_cast<std::size_t>(a)],
                     dphi.comps[static_cast<std::size_t>(a)]);
    acc += tg.dt * drift;
    for (int k = 0; k < K; ++k)
      acc += inner(path.g_steps[static_cast<std::size_t>(m)].modes[static_cast<std::size_t>(k)], phi) *
             np.dW[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)];
  }
  return worst / scale;
}

}  // namespace spde
