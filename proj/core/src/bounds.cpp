#include "spde/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "spde/parallel.hpp"

namespace spde {

namespace {

McEstimate summarize(const std::vector<double>& vals, std::uint64_t seed_base) {
  McEstimate est;
  est.replicates = static_cast<int>(vals.size());
  est.seed_base = seed_base;
  if (vals.empty()) return est;
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  est.mean = mean;
  if (vals.size() >= 2) {
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(vals.size() - 1);
    est.std_error = std::sqrt(var / static_cast<double>(vals.size()));
  }
  return est;
}

// L_r norm for any r >= 1 (the convergence lemmas are not restricted to
// r >= 2 the way the main quadrature is).
double lr_norm(const ScalarField& u, double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("r must be >= 1");
  if (!detail::all_finite(u.values)) throw std::invalid_argument("non-finite field");
  const double cell = detail::abs_pow(u.grid.h, static_cast<double>(u.grid.dim));
  const double* v = u.values.data();
  const double s =
      detail::pairwise_map_sum(0, u.size(), [v, r](std::size_t i) { return detail::abs_pow(v[i], r); });
  return std::pow(s * cell, 1.0 / r);
}

ScalarField sub(const ScalarField& a, const ScalarField& b) {
  if (a.grid != b.grid) throw std::invalid_argument("grid mismatch");
  ScalarField out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] - b.values[i];
  return out;
}

double ratio_of(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Vacuous: return "vacuous";
  }
  return "?";
}

// ---- sup estimate -----------------------------------------------------------

namespace {

struct SupStats {
  double sup_lp = 0.0;
  double u0_lp = 0.0;
  double f0_int = 0.0;
  double fvec_int = 0.0;
  double g_int = 0.0;
  double du_int = 0.0;
};

}  // namespace

BoundReport sup_estimate_check(const ScenarioSpec& spec, int replicates, std::uint64_t seed,
                               double n_cal, int threads) {
  if (replicates < 50) throw std::invalid_argument("sup estimate needs at least 50 replicates");
  ScenarioSpec local = spec;
  local.seed = seed;
  const double p = spec.p;
  const double T = spec.tg.T;

  const std::vector<SupStats> stats = run_replicates<SupStats>(replicates, threads, [&](int r) {
    const PathSample s = run_scenario(local, static_cast<std::uint64_t>(r));
    const int m_tau = resolve_stopping(s.path, p, spec.tau);
    const double dt = s.path.tg.dt;
    SupStats st;
    st.u0_lp = lp_norm_pow(s.path.snapshots.front(), p);
    for (int m = 0; m <= m_tau; ++m)
      st.sup_lp = std::max(st.sup_lp, lp_norm_pow(s.path.snapshots[static_cast<std::size_t>(m)], p));
    for (int m = 0; m < m_tau; ++m) {
      const std::size_t mm = static_cast<std::size_t>(m);
      st.f0_int += dt * lp_norm_pow(s.path.f0_steps[mm], p);
      for (const auto& comp : s.path.fvec_steps[mm].comps) st.fvec_int += dt * lp_norm_pow(comp, p);
      st.g_int += dt * lp_norm_pow(s.path.g_steps[mm], p);
      st.du_int += dt * lp_norm_pow(grad(s.path.snapshots[mm]), p);
    }
    return st;
  });

  std::vector<double> sup_vals, u0_vals, f0_vals, fvec_vals, g_vals, du_vals;
  for (const auto& st : stats) {
    sup_vals.push_back(st.sup_lp);
    u0_vals.push_back(st.u0_lp);
    f0_vals.push_back(st.f0_int);
    fvec_vals.push_back(st.fvec_int);
    g_vals.push_back(st.g_int);
    du_vals.push_back(st.du_int);
  }

  BoundReport rep;
  rep.lhs = summarize(sup_vals, seed);
  const double scale_mid = std::pow(T, (p - 2.0) / 2.0);
  rep.rhs_components = {
      {"u0_term", 2.0 * summarize(u0_vals, seed).mean},
      {"f0_term", std::pow(T, p - 1.0) * summarize(f0_vals, seed).mean},
      {"fvec_term", scale_mid * summarize(fvec_vals, seed).mean},
      {"g_term", scale_mid * summarize(g_vals, seed).mean},
      {"du_term", scale_mid * summarize(du_vals, seed).mean},
  };
  for (const auto& [name, value] : rep.rhs_components) rep.rhs_total += value;
  rep.ratio = ratio_of(rep.lhs.mean, rep.rhs_total);
  rep.implied_N = rep.ratio;
  rep.holds_with = n_cal;
  rep.violation = rep.lhs.mean - 3.0 * rep.lhs.std_error > n_cal * rep.rhs_total;
  return rep;
}

// ---- energy identity --------------------------------------------------------

EnergyReport energy_identity_check(const ScenarioSpec& spec, int replicates, std::uint64_t seed,
                                   int threads) {
  if (replicates < 2) throw std::invalid_argument("energy identity needs at least 2 replicates");
  const double p = spec.p;

  struct Pair {
    double lhs = 0.0;
    double rhs = 0.0;
  };
  auto run_at = [&](int steps) {
    ScenarioSpec local = with_steps(spec, steps);
    local.seed = seed;
    return run_replicates<Pair>(replicates, threads, [&](int r) {
      const PathSample s = run_scenario(local, static_cast<std::uint64_t>(r));
      const int m_tau = resolve_stopping(s.path, p, spec.tau);
      const double dt = s.path.tg.dt;
      Pair pr;
      pr.lhs = lp_norm_pow(s.path.snapshots.front(), p);
      for (int m = 0; m < m_tau; ++m) {
        const std::size_t mm = static_cast<std::size_t>(m);
        pr.lhs += dt * drift_bracket(s.path.snapshots[mm], s.path.f0_steps[mm],
                                     s.path.fvec_steps[mm], s.path.g_steps[mm], p)
                           .total();
      }
      pr.rhs = lp_norm_pow(s.path.snapshots[static_cast<std::size_t>(m_tau)], p);
      return pr;
    });
  };

  const std::vector<Pair> coarse = run_at(spec.tg.M);
  const std::vector<Pair> fine = run_at(2 * spec.tg.M);

  std::vector<double> lhs_vals, rhs_vals, gap_vals, gap_half_vals;
  for (const auto& pr : coarse) {
    lhs_vals.push_back(pr.lhs);
    rhs_vals.push_back(pr.rhs);
    gap_vals.push_back(pr.lhs - pr.rhs);
  }
  for (const auto& pr : fine) gap_half_vals.push_back(pr.lhs - pr.rhs);

  EnergyReport rep;
  rep.lhs = summarize(lhs_vals, seed);
  rep.rhs = summarize(rhs_vals, seed);
  rep.gap = summarize(gap_vals, seed);
  rep.gap_half = summarize(gap_half_vals, seed);
  const double scale = std::max(1.0, std::abs(rep.lhs.mean));
  rep.bias_allowance = 2.6 * std::abs(rep.gap.mean - rep.gap_half.mean) +
                       3.0 * rep.gap_half.std_error + 1e-12 * scale;
  rep.holds_equality = std::abs(rep.gap.mean) <= 3.0 * rep.gap.std_error + rep.bias_allowance;
  rep.holds_inequality = rep.gap.mean >= -(3.0 * rep.gap.std_error + rep.bias_allowance);
  return rep;
}

// ---- simple-process bounds --------------------------------------------------

BoundReport simple_g_bound_check(const StepProcessSpec& sp, const TimeGrid& tg, double p,
                                 int replicates, std::uint64_t seed, int threads) {
  if (replicates < 2) throw std::invalid_argument("bound check needs at least 2 replicates");

  struct Stats {
    double lhs = 0.0;
    double g_int = 0.0;
  };
  const std::vector<Stats> stats = run_replicates<Stats>(replicates, threads, [&](int r) {
    const NoisePath noise = sample_noise(tg, sp.j, seed, static_cast<std::uint64_t>(r));
    const ProcessPath path = integrate_step_process(sp, noise);
    ScalarField running_max(sp.grid);
    for (const auto& snap : path.snapshots)
      for (std::size_t i = 0; i < running_max.size(); ++i)
        running_max.values[i] = std::max(running_max.values[i], std::abs(snap.values[i]));
    Stats st;
    st.lhs = lp_norm_pow(running_max, p);
    for (int m = 0; m < tg.M; ++m)
      st.g_int += tg.dt * lp_norm_pow(path.g_steps[static_cast<std::size_t>(m)], p);
    return st;
  });

  std::vector<double> lhs_vals, g_vals;
  for (const auto& st : stats) {
    lhs_vals.push_back(st.lhs);
    g_vals.push_back(st.g_int);
  }

  BoundReport rep;
  rep.lhs = summarize(lhs_vals, seed);
  const double g_term = std::pow(tg.T, (p - 2.0) / 2.0) * summarize(g_vals, seed).mean;
  rep.rhs_components = {{"g_term", g_term}};
  rep.rhs_total = g_term;
  rep.ratio = ratio_of(rep.lhs.mean, rep.rhs_total);
  rep.implied_N = rep.ratio;
  return rep;
}

BoundReport drift_only_bound_check(const ScenarioSpec& spec, int replicates, std::uint64_t seed,
                                   int threads) {
  if (replicates < 2) throw std::invalid_argument("bound check needs at least 2 replicates");
  if (spec.K != 0 || spec.coeffs.mode != CoefficientSpec::Mode::Explicit)
    throw std::invalid_argument("drift-only bound needs an explicit scenario with K = 0");
  for (const auto& entry : spec.coeffs.fvec)
    if (entry.profile.kind != Profile::Kind::Zero && entry.profile.amplitude != 0.0)
      throw std::invalid_argument("drift-only bound needs f^i = 0");
  if (spec.coeffs.u0.kind != Profile::Kind::Zero && spec.coeffs.u0.amplitude != 0.0)
    throw std::invalid_argument("drift-only bound needs u_0 = 0");

  ScenarioSpec local = spec;
  local.seed = seed;
  const double p = spec.p;

  struct Stats {
    double lhs = 0.0;
    double f_int = 0.0;
  };
  const std::vector<Stats> stats = run_replicates<Stats>(replicates, threads, [&](int r) {
    const PathSample s = run_scenario(local, static_cast<std::uint64_t>(r));
    ScalarField running_max(spec.grid);
    for (const auto& snap : s.path.snapshots)
      for (std::size_t i = 0; i < running_max.size(); ++i)
        running_max.values[i] = std::max(running_max.values[i], std::abs(snap.values[i]));
    Stats st;
    st.lhs = lp_norm_pow(running_max, p);
    for (int m = 0; m < spec.tg.M; ++m)
      st.f_int += spec.tg.dt * lp_norm_pow(s.path.f0_steps[static_cast<std::size_t>(m)], p);
    return st;
  });

  std::vector<double> lhs_vals, f_vals;
  for (const auto& st : stats) {
    lhs_vals.push_back(st.lhs);
    f_vals.push_back(st.f_int);
  }

  BoundReport rep;
  rep.lhs = summarize(lhs_vals, seed);
  const double f_term = std::pow(spec.tg.T, p - 1.0) * summarize(f_vals, seed).mean;
  rep.rhs_components = {{"f_term", f_term}};
  rep.rhs_total = f_term;
  rep.ratio = ratio_of(rep.lhs.mean, rep.rhs_total);
  rep.implied_N = rep.ratio;
  return rep;
}

// ---- convergence lemmas -----------------------------------------------------

Verdict scheffe_check(const std::vector<ScalarField>& un, const ScalarField& u, double r,
                      const ConvergenceTols& tols) {
  if (un.empty()) throw std::invalid_argument("empty sequence");
  for (const auto& f : un)
    if (f.grid != u.grid) throw std::invalid_argument("grid mismatch");

  const double u_sup = std::max(1.0, max_abs(u));
  const double u_norm = lr_norm(u, r);
  const double n_scale = std::max(1.0, u_norm);

  // Hypotheses, checked on the tail of the declared schedule.
  const ScalarField& last = un.back();
  const double pw_gap = max_abs(sub(last, u));
  const double norm_gap = std::abs(lr_norm(last, r) - u_norm);
  if (pw_gap > tols.hyp_pointwise * u_sup || norm_gap > tols.hyp_norm * n_scale)
    return Verdict::Vacuous;

  double prev = std::numeric_limits<double>::infinity();
  double final_gap = 0.0;
  for (const auto& f : un) {
    const double gap = lr_norm(sub(f, u), r);
    if (gap > prev * tols.monotone_slack) return Verdict::Fail;
    prev = std::max(gap, 1e-300);
    final_gap = gap;
  }
  return final_gap <= tols.conv_final * n_scale ? Verdict::Pass : Verdict::Fail;
}

Verdict product_limit_check(const std::vector<ScalarField>& un, const ScalarField& u,
                            const std::vector<ScalarField>& vn, const ScalarField& v, double r,
                            double s, const ConvergenceTols& tols) {
  if (!(r > 1.0) || !(s > 1.0) || std::abs(1.0 / r + 1.0 / s - 1.0) > 1e-12)
    throw std::invalid_argument("conjugate exponents required: 1/r + 1/s = 1");
  if (un.empty() || un.size() != vn.size()) throw std::invalid_argument("sequence length mismatch");

  // Hypotheses per factor, as in the single-sequence check.
  auto hyp_ok = [&](const std::vector<ScalarField>& fn, const ScalarField& f, double q) {
    const double f_sup = std::max(1.0, max_abs(f));
    const double f_norm = lr_norm(f, q);
    const double pw_gap = max_abs(sub(fn.back(), f));
    const double norm_gap = std::abs(lr_norm(fn.back(), q) - f_norm);
    return pw_gap <= tols.hyp_pointwise * f_sup && norm_gap <= tols.hyp_norm * std::max(1.0, f_norm);
  };
  if (!hyp_ok(un, u, r) || !hyp_ok(vn, v, s)) return Verdict::Vacuous;

  const double cell = detail::abs_pow(u.grid.h, static_cast<double>(u.grid.dim));
  auto product_gap = [&](const ScalarField& a, const ScalarField& b) {
    return detail::pairwise_map_sum(0, u.size(),
                                    [&](std::size_t i) {
                                      return std::abs(a.values[i] * b.values[i] -
                                                      u.values[i] * v.values[i]);
                                    }) *
           cell;
  };

  const double scale = std::max(1.0, lr_norm(u, r) * lr_norm(v, s));
  double prev = std::numeric_limits<double>::infinity();
  double final_gap = 0.0;
  for (std::size_t i = 0; i < un.size(); ++i) {
    const double gap = product_gap(un[i], vn[i]);
    if (gap > prev * tols.monotone_slack) return Verdict::Fail;
    prev = std::max(gap, 1e-300);
    final_gap = gap;
  }
  return final_gap <= tols.conv_final * scale ? Verdict::Pass : Verdict::Fail;
}

// ---- analytic inequality battery ---------------------------------------------

namespace {

class DrawRng {
 public:
  explicit DrawRng(std::uint64_t key) : eng_(key) {}
  double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uni(double a, double b) { return a + (b - a) * u01(); }

 private:
  std::mt19937_64 eng_;
};

ScalarField random_field(const GridSpec& grid, DrawRng& rng, double amp) {
  ScalarField out(grid);
  for (double& x : out.values) x = rng.uni(-amp, amp);
  return out;
}

struct RowTracker {
  InequalityRow row;
  void record(bool violated, double rel, std::uint64_t draw_seed) {
    if (violated) {
      if (row.violations == 0) row.first_fail_seed = draw_seed;
      ++row.violations;
      row.max_rel_violation = std::max(row.max_rel_violation, rel);
    }
  }
};

}  // namespace

namespace {

enum InequalityRowId {
  kYoungDrift = 0,
  kYoungNoise,
  kMinkowski,
  kTriple,
  kTripleField,
  kHolder,
  kInjected,
  kRowCount,
};

const char* const kRowNames[kRowCount] = {
    "young-drift-split",   "young-noise-split", "minkowski-l2-pairing",
    "triple-product-power", "triple-product-field-split", "holder-pairing",
    "injected-negative-control"};

/// Worst relative violation per row for one draw, with every random
/// amplitude multiplied by `scale` (the shrink knob).  Negative entries mean
/// the inequality held with margin.
std::array<double, kRowCount> evaluate_inequality_draw(const GridSpec& grid,
                                                       std::uint64_t draw_seed, double scale,
                                                       bool inject) {
  const double cell = grid.h;
  const std::vector<double> p_grid = {2.0, 3.0, 4.0, 6.0};
  const std::vector<double> gamma_grid = {0.5, 1.0, 2.0};
  const int steps = 8;
  const double dt = 0.125;

  std::array<double, kRowCount> worst;
  worst.fill(-std::numeric_limits<double>::infinity());
  auto track = [&](InequalityRowId id, double lhs, double rhs) {
    worst[id] = std::max(worst[id], (lhs - rhs) / std::max(1.0, rhs));
  };

  DrawRng rng(draw_seed);
  std::vector<ScalarField> u_path, f_path;
  std::vector<SeqField> g_path;
  for (int j = 0; j < steps; ++j) {
    u_path.push_back(random_field(grid, rng, 2.0 * scale));
    f_path.push_back(random_field(grid, rng, 2.0 * scale));
    SeqField g(grid);
    g.modes.push_back(random_field(grid, rng, 1.5 * scale));
    g.modes.push_back(random_field(grid, rng, 1.5 * scale));
    g_path.push_back(std::move(g));
  }

  for (double p : p_grid) {
    // Prefix time sums, pointwise in x.
    std::vector<double> u_pow(grid.size(), 0.0), f_pow(grid.size(), 0.0), g_pow(grid.size(), 0.0),
        uf_mix(grid.size(), 0.0), ug_mix(grid.size(), 0.0);
    for (int m = 1; m <= steps; ++m) {
      const std::size_t j = static_cast<std::size_t>(m - 1);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double uu = std::abs(u_path[j].values[i]);
        const double ff = std::abs(f_path[j].values[i]);
        const double gg = std::hypot(g_path[j].modes[0].values[i], g_path[j].modes[1].values[i]);
        u_pow[i] += dt * detail::abs_pow(uu, p);
        f_pow[i] += dt * detail::abs_pow(ff, p);
        g_pow[i] += dt * detail::abs_pow(gg, p);
        uf_mix[i] += dt * detail::abs_pow(uu, p - 1.0) * ff;
        ug_mix[i] += dt * detail::abs_pow(uu, p - 2.0) * gg * gg;
      }
      if (m != 2 && m != 5 && m != steps) continue;
      const double t = m * dt;
      for (double gamma : gamma_grid) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
          track(kYoungDrift, uf_mix[i],
                std::pow(gamma, p / (p - 1.0)) / t * u_pow[i] +
                    std::pow(t, p - 1.0) / std::pow(gamma, p) * f_pow[i]);
          const double gm = p == 2.0 ? 1.0 : gamma;  // gamma forced to 1 when p = 2
          const double c1 = (p == 2.0 ? 1.0 : std::pow(gm, p / (p - 2.0))) / t;
          const double c2 = std::pow(t, (p - 2.0) / 2.0) / std::pow(gm, p / 2.0);
          track(kYoungNoise, ug_mix[i], c1 * u_pow[i] + c2 * g_pow[i]);
        }
        if (p == 2.0) break;  // gamma grid is irrelevant at p = 2 for the noise split
      }
    }

    // l2 Minkowski for the pairing.
    {
      const ScalarField& u = u_path[0];
      const SeqField& g = g_path[0];
      ScalarField upow(grid);
      for (std::size_t i = 0; i < grid.size(); ++i)
        upow.values[i] = detail::abs_pow(u.values[i], p - 1.0);
      double lhs = 0.0;
      for (const auto& mode : g.modes) {
        double pairing = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
          pairing += upow.values[i] * std::abs(mode.values[i]) * cell;
        lhs += pairing * pairing;
      }
      double rhs_root = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i)
        rhs_root +=
            upow.values[i] * std::hypot(g.modes[0].values[i], g.modes[1].values[i]) * cell;
      track(kMinkowski, lhs, rhs_root * rhs_root);
    }

    // Scalar triple-product power bound.
    for (int rep = 0; rep < 10; ++rep) {
      const double a = scale * rng.uni(0.0, 3.0);
      const double b = scale * rng.uni(0.0, 3.0);
      const double c = scale * rng.uni(0.0, 3.0);
      track(kTriple, detail::abs_pow(a, p - 2.0) * b * c,
            detail::abs_pow(a, p) + detail::abs_pow(b, p) + detail::abs_pow(c, p));
    }

    // Field split of the divergence term.
    {
      const ScalarField& u = u_path[1];
      VectorField fv(grid, {f_path[1]});
      const VectorField du = grad(u);
      const ScalarField w = power_weight(u, p);
      double lhs = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i)
        lhs += w.values[i] * fv.comps[0].values[i] * du.comps[0].values[i] * cell;
      const double u_int = lp_norm_pow(u, p);
      const double fdu_int = lp_norm_pow(fv, p) + lp_norm_pow(du, p);
      for (double bigT : gamma_grid) {
        for (double gamma : gamma_grid) {
          const double gm = p == 2.0 ? 1.0 : gamma;
          const double c1 = (p == 2.0 ? 1.0 : std::pow(gm, p / (p - 2.0))) / bigT;
          const double c2 = std::pow(bigT, (p - 2.0) / 2.0) / std::pow(gm, p / 2.0);
          track(kTripleField, lhs, c1 * u_int + c2 * fdu_int);
          if (p == 2.0) break;
        }
      }
    }

    // Pairing bound with conjugate powers of the norms.
    {
      const ScalarField& u = u_path[2];
      const ScalarField& v = f_path[2];
      double lhs = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i)
        lhs += detail::abs_pow(u.values[i], p - 1.0) * std::abs(v.values[i]) * cell;
      track(kHolder, lhs,
            std::pow(lp_norm_pow(u, p), (p - 1.0) / p) * std::pow(lp_norm_pow(v, p), 1.0 / p));
    }
  }

  if (inject) {
    // Deliberately false claim (wrong constant in the pairing bound); the
    // suite must flag it and surface this draw's seed.
    const ScalarField& u = u_path[0];
    const ScalarField& v = f_path[0];
    double lhs = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      lhs += std::abs(u.values[i]) * std::abs(v.values[i]) * cell;
    track(kInjected, lhs, 0.5 * std::sqrt(lp_norm_pow(u, 2.0) * lp_norm_pow(v, 2.0)));
  }
  return worst;
}

}  // namespace

InequalitySuiteResult inequality_suite(int draws, std::uint64_t seed, bool inject_fault) {
  if (draws < 1) throw std::invalid_argument("draws must be >= 1");
  const GridSpec grid(1, 16, 1.0);
  const double tol = 1e-10;
  const int rows = inject_fault ? kRowCount : kRowCount - 1;

  std::vector<RowTracker> trackers;
  for (int id = 0; id < rows; ++id)
    trackers.push_back(RowTracker{{kRowNames[id], draws, 0, 0.0, 0, 1.0}});

  for (int d = 0; d < draws; ++d) {
    const std::uint64_t draw_seed =
        detail::stream_key(seed, static_cast<std::uint64_t>(d), 0x1EA1ULL);
    const std::array<double, kRowCount> rel =
        evaluate_inequality_draw(grid, draw_seed, 1.0, inject_fault);
    for (int id = 0; id < rows; ++id) {
      const bool first = trackers[static_cast<std::size_t>(id)].row.violations == 0;
      const bool violated = rel[static_cast<std::size_t>(id)] > tol;
      trackers[static_cast<std::size_t>(id)].record(violated,
                                                    rel[static_cast<std::size_t>(id)], draw_seed);
      if (violated && first) {
        // Shrink the failing draw: halve the amplitudes while the row still
        // fails, and keep the smallest failing scale for the report.
        double shrunk = 1.0;
        for (double s = 0.5; s >= 1.0 / 256.0; s /= 2.0) {
          if (evaluate_inequality_draw(grid, draw_seed, s,
                                       inject_fault)[static_cast<std::size_t>(id)] <= tol)
            break;
          shrunk = s;
        }
        trackers[static_cast<std::size_t>(id)].row.shrunk_scale = shrunk;
      }
    }
  }

  InequalitySuiteResult result;
  for (const auto& tracker : trackers) result.rows.push_back(tracker.row);
  for (const auto& row : result.rows)
    if (!row.pass()) result.pass = false;
  return result;
}

// ---- mollifier invariants -----------------------------------------------------

MollifierPropertyReport mollifier_property_check(int draws, std::uint64_t seed) {
  if (draws < 1) throw std::invalid_argument("draws must be >= 1");
  const GridSpec grid(1, 64, 1.0);
  const MollifierKernel kernel = make_kernel(grid, grid.len / 8.0);
  const std::vector<double> p_grid = {2.0, 3.0, 4.0};

  MollifierPropertyReport rep;
  rep.draws = draws;
  auto record = [&](long& counter, bool violated, double rel, std::uint64_t draw_seed) {
    if (violated) {
      if (rep.first_fail_seed == 0) rep.first_fail_seed = draw_seed;
      ++counter;
      rep.max_rel_violation = std::max(rep.max_rel_violation, rel);
    }
  };

  for (int d = 0; d < draws; ++d) {
    const std::uint64_t draw_seed =
        detail::stream_key(seed, static_cast<std::uint64_t>(d), 0x3011ULL);
    DrawRng rng(draw_seed);
    const ScalarField u = random_field(grid, rng, 2.0);
    const ScalarField mu = mollify(u, kernel);
    const double p = p_grid[static_cast<std::size_t>(d) % p_grid.size()];

    {
      const double lhs = lp_norm_pow(mu, p);
      const double rhs = lp_norm_pow(u, p);
      record(rep.contraction_violations, lhs > rhs * (1.0 + 1e-12), (lhs - rhs) / rhs, draw_seed);
    }
    {
      ScalarField upow(grid);
      for (std::size_t i = 0; i < grid.size(); ++i)
        upow.values[i] = detail::abs_pow(u.values[i], p);
      const ScalarField mpow = mollify(upow, kernel);
      double worst = 0.0;
      double scale = 1.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        worst = std::max(worst, detail::abs_pow(mu.values[i], p) - mpow.values[i]);
        scale = std::max(scale, mpow.values[i]);
      }
      record(rep.pointwise_violations, worst > 1e-12 * scale, worst / scale, draw_seed);
    }
    {
      ScalarField ones(grid);
      std::fill(ones.values.begin(), ones.values.end(), 1.0);
      const double gap = std::abs(inner(mu, ones) - inner(u, ones));
      double abs_mass = 0.0;
      for (double x : u.values) abs_mass += std::abs(x) * grid.h;
      const double scale = std::max(1.0, abs_mass);
      record(rep.mass_violations, gap > 1e-12 * scale, gap / scale, draw_seed);
    }
    {
      SeqField g(grid);
      g.modes.push_back(random_field(grid, rng, 1.5));
      g.modes.push_back(random_field(grid, rng, 1.5));
      const ScalarField lhs = seq_ell2_pointwise(mollify_seq(g, kernel));
      const ScalarField rhs = mollify(seq_ell2_pointwise(g), kernel);
      double worst = 0.0;
      double scale = 1.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        worst = std::max(worst, lhs.values[i] - rhs.values[i]);
        scale = std::max(scale, rhs.values[i]);
      }
      record(rep.minkowski_violations, worst > 1e-12 * scale, worst / scale, draw_seed);
    }
  }

  // eps-halving convergence on a fixed smooth field.
  {
    const ScalarField smooth = sample_field(grid, [&](const std::array<double, 3>& x) {
      return std::sin(2.0 * std::numbers::pi * x[0]) + 0.5 * std::cos(4.0 * std::numbers::pi * x[0]);
    });
    double prev = std::numeric_limits<double>::infinity();
    rep.convergence_monotone = true;
    for (double eps : {grid.len / 8.0, grid.len / 16.0, grid.len / 32.0}) {
      const MollifierKernel k = make_kernel(grid, eps);
      const ScalarField diff = sub(mollify(smooth, k), smooth);
      const double gap = std::sqrt(lp_norm_pow(diff, 2.0));
      if (!(gap < prev)) rep.convergence_monotone = false;
      prev = gap;
    }
  }

  rep.pass = rep.contraction_violations == 0 && rep.pointwise_violations == 0 &&
             rep.mass_violations == 0 && rep.minkowski_violations == 0 && rep.convergence_monotone;
  return rep;
}

}  // namespace spde
