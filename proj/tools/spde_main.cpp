// Command-line front end: runs scenarios, Monte Carlo campaigns and property
// batteries, and emits machine-readable reports (JSON for single runs, CSV
// for campaigns).  Exit codes: 0 all checks pass, 1 check failure, 2
// usage/input error.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "spde/bounds.hpp"
#include "spde/scenario.hpp"

using nlohmann::json;
using namespace spde;

namespace {

std::string fmt(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("SPDE_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0') {
    std::cerr << "warning: ignoring malformed SPDE_SEED='" << raw << "'\n";
    return std::nullopt;
  }
  return v;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << content;
}

struct VerifyOptions {
  std::string scenario_file;
  int replicates = 1;
  std::optional<std::uint64_t> seed;
  double dt_override = 0.0;
  std::string out;
  int threads = 0;
};

int cmd_verify(const VerifyOptions& opt) {
  ScenarioSpec spec = load_scenario(opt.scenario_file);
  if (opt.seed) spec.seed = *opt.seed;
  if (opt.dt_override > 0.0) {
    const double steps = spec.tg.T / opt.dt_override;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
      throw ScenarioParseError("--dt-override must divide the horizon T");
    spec = with_steps(spec, static_cast<int>(std::round(steps)));
  }
  build(spec);  // surface recipe errors before running anything

  const bool deterministic = is_deterministic(spec);
  bool degenerate = deterministic && spec.coeffs.f0.profile.kind == Profile::Kind::Zero;
  for (const auto& e : spec.coeffs.fvec)
    if (e.profile.kind != Profile::Kind::Zero) degenerate = false;

  double weak_worst = 0.0;
  double parts_worst = 0.0;
  double residual_abs_worst = 0.0;
  double residual_rel_worst = 0.0;
  double lhs_scale = 0.0;
  bool freeze_ok = true;
  std::vector<double> residual_at_T;

  for (int r = 0; r < opt.replicates; ++r) {
    const PathSample s = run_scenario(spec, static_cast<std::uint64_t>(r));
    const ItoReport rep = ito_residual(s.path, s.noise, spec.p, spec.tau);
    residual_abs_worst = std::max(residual_abs_worst, rep.residual_max_abs);
    residual_rel_worst = std::max(residual_rel_worst, rep.residual_max_rel);
    parts_worst = std::max(parts_worst, rep.parts_sum_gap_rel);
    residual_at_T.push_back(rep.residual_at_T);
    for (double v : rep.lhs) lhs_scale = std::max(lhs_scale, v);
    for (int m = rep.m_tau; m <= spec.tg.M; ++m)
      if (rep.lhs[static_cast<std::size_t>(m)] != rep.lhs[static_cast<std::size_t>(rep.m_tau)] ||
          rep.rhs[static_cast<std::size_t>(m)] != rep.rhs[static_cast<std::size_t>(rep.m_tau)])
        freeze_ok = false;

    std::mt19937_64 eng(detail::mix64(spec.seed ^ 0xFEEDULL) + static_cast<std::uint64_t>(r));
    auto u01 = [&eng] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
    for (int t = 0; t < 3; ++t) {
      const double c = 0.25 + 0.5 * u01();
      const double rad = (0.1 + 0.25 * u01()) * spec.grid.len;
      const std::vector<double> center(static_cast<std::size_t>(spec.grid.dim),
                                       c * spec.grid.len);
      const ScalarField phi = bump_test_function(spec.grid, center, rad);
      weak_worst = std::max(weak_worst, weak_form_residual(s.path, s.noise, phi));
    }
  }

  double res_mean = 0.0;
  for (double v : residual_at_T) res_mean += v;
  res_mean /= static_cast<double>(residual_at_T.size());

  json checks = json::array();
  auto add_check = [&](const std::string& name, bool pass, double value, double tolerance) {
    checks.push_back({{"name", name}, {"pass", pass}, {"value", value}, {"tolerance", tolerance}});
    return pass;
  };
  bool ok = true;
  ok &= add_check("weak_form_residual_rel", weak_worst <= 1e-10, weak_worst, 1e-10);
  ok &= add_check("parts_sum_gap_rel", parts_worst <= 1e-13, parts_worst, 1e-13);
  ok &= add_check("stopping_freeze_exact", freeze_ok, freeze_ok ? 0.0 : 1.0, 0.0);
  if (degenerate) {
    const double tol = 1e-12 * std::max(1.0, lhs_scale);
    ok &= add_check("degenerate_residual_abs", residual_abs_worst <= tol, residual_abs_worst, tol);
  } else if (deterministic) {
    const double tol = 1e-6 * std::max(1.0, lhs_scale);
    ok &=
        add_check("deterministic_residual_abs", residual_abs_worst <= tol, residual_abs_worst, tol);
  }

  json report;
  report["scenario"] = {{"name", spec.name},     {"dim", spec.grid.dim}, {"n", spec.grid.n},
                        {"len", spec.grid.len},  {"T", spec.tg.T},       {"M", spec.tg.M},
                        {"p", spec.p},           {"K", spec.K},          {"seed", spec.seed},
                        {"deterministic", deterministic}};
  report["scenario_text"] = serialize_scenario(spec);
  report["replicates"] = opt.replicates;
  report["ito"] = {{"residual_max_abs", residual_abs_worst},
                   {"residual_max_rel", residual_rel_worst},
                   {"mean_abs_residual_at_T", res_mean},
                   {"lhs_max", lhs_scale}};
  report["checks"] = checks;

  if (!deterministic && opt.replicates >= 10) {
    const std::vector<double> dts = {spec.tg.dt, spec.tg.dt / 2.0, spec.tg.dt / 4.0};
    const ConvergenceTable table = convergence_study(make_path_factory(spec), spec.tg.T, spec.p,
                                                     spec.tau, dts, opt.replicates, opt.threads);
    json rows = json::array();
    for (const auto& row : table.rows)
      rows.push_back({{"dt", row.dt},
                      {"mean_abs_residual", row.mean_abs_residual},
                      {"std_error", row.std_error}});
    report["slope"] = {{"rows", rows}, {"slope", table.slope}, {"exact", table.exact}};
  }

  report["pass"] = ok;
  write_output(opt.out, report.dump(2) + "\n");
  if (!opt.out.empty())
    std::cout << (ok ? "PASS " : "FAIL ") << spec.name << ": residual_max_rel "
              << fmt(residual_rel_worst) << ", weak_form " << fmt(weak_worst) << "\n";
  return ok ? 0 : 1;
}

struct ConvergenceOptions {
  std::string scenario_file;
  std::vector<double> dts;
  int replicates = 20;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 0;
};

int cmd_convergence(const ConvergenceOptions& opt) {
  ScenarioSpec spec = load_scenario(opt.scenario_file);
  if (opt.seed) spec.seed = *opt.seed;
  if (opt.dts.empty()) throw ScenarioParseError("--dts must list at least one step size");

  ConvergenceTable table;
  try {
    table = convergence_study(make_path_factory(spec), spec.tg.T, spec.p, spec.tau, opt.dts,
                              opt.replicates, opt.threads);
  } catch (const std::invalid_argument& e) {
    throw ScenarioParseError(e.what());
  }

  std::string csv = "dt,mean_abs_residual,std_error,slope_so_far\n";
  for (const auto& row : table.rows) {
    csv += fmt(row.dt) + "," + fmt(row.mean_abs_residual) + "," + fmt(row.std_error) + ",";
    if (std::isfinite(row.slope_so_far)) csv += fmt(row.slope_so_far);
    csv += "\n";
  }
  write_output(opt.out, csv);
  if (!opt.out.empty())
    std::cout << "slope: " << (table.exact ? "exact" : fmt(table.slope)) << "\n";
  if (table.slope_suspect) {
    std::cerr << "check failed: fitted slope " << fmt(table.slope)
              << " is below 0.2; the residual is not shrinking\n";
    return 1;
  }
  return 0;
}

struct BoundsOptions {
  int count = 20;
  std::uint64_t master_seed = 777;
  int replicates = 64;
  std::optional<std::uint64_t> seed;
  double n_cal = 10.0;
  std::string out;
  int threads = 0;
};

int cmd_bounds(const BoundsOptions& opt) {
  const std::uint64_t seed = opt.seed.value_or(1);
  const std::vector<ScenarioSpec> catalog = randomized_catalog(opt.count, opt.master_seed);

  std::string csv =
      "scenario,lhs_mean,lhs_stderr,u0_term,f0_term,fvec_term,g_term,du_term,rhs_total,implied_N\n";
  double max_implied = 0.0;
  bool any_violation = false;
  for (const auto& spec : catalog) {
    const BoundReport rep = sup_estimate_check(spec, opt.replicates, seed, opt.n_cal, opt.threads);
    csv += spec.name + "," + fmt(rep.lhs.mean) + "," + fmt(rep.lhs.std_error);
    for (const auto& [name, value] : rep.rhs_components) csv += "," + fmt(value);
    csv += "," + fmt(rep.rhs_total) + "," + fmt(rep.implied_N) + "\n";
    if (std::isfinite(rep.implied_N)) max_implied = std::max(max_implied, rep.implied_N);
    any_violation |= rep.violation;
  }
  csv += "max,,,,,,,,," + fmt(max_implied) + "\n";
  write_output(opt.out, csv);
  if (!opt.out.empty()) std::cout << "max implied_N: " << fmt(max_implied) << "\n";
  return any_violation ? 1 : 0;
}

struct PropertiesOptions {
  int draws = 1000;
  std::uint64_t seed = 2024;
  bool inject_fault = false;
};

int cmd_properties(const PropertiesOptions& opt) {
  if (opt.draws < 100) {
    std::cerr << "error: --draws must be at least 100 for the battery to mean anything\n";
    return 2;
  }
  bool ok = true;
  auto report = [&](const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS " : "FAIL ") << name << (detail.empty() ? "" : " (" + detail + ")")
              << "\n";
    ok &= pass;
  };

  const InequalitySuiteResult ineq = inequality_suite(opt.draws, opt.seed, opt.inject_fault);
  for (const auto& row : ineq.rows) {
    std::string detail = std::to_string(row.draws) + " draws";
    if (!row.pass())
      detail = std::to_string(row.violations) + " violations, replay seed " +
               std::to_string(row.first_fail_seed) + ", shrinks to scale " +
               fmt(row.shrunk_scale);
    report("inequality/" + row.name, row.pass(), detail);
  }

  const MollifierPropertyReport mol = mollifier_property_check(opt.draws, opt.seed + 1);
  {
    std::string detail = std::to_string(mol.draws) + " draws";
    if (!mol.pass) detail = "replay seed " + std::to_string(mol.first_fail_seed);
    report("mollifier/invariants", mol.pass, detail);
  }

  // Convergence lemmas on deterministic geometric schedules.
  {
    const GridSpec grid(1, 32, 1.0);
    auto smooth = [&](double phase) {
      return sample_field(grid, [&](const std::array<double, 3>& x) {
        return std::sin(2.0 * std::numbers::pi * x[0] + phase);
      });
    };
    const ScalarField u = smooth(1.0);
    const ScalarField bump = bump_test_function(grid, {0.5}, 0.2);
    std::vector<ScalarField> un;
    double eta = 0.5;
    for (int n = 0; n < 40; ++n, eta *= 0.7) {
      ScalarField f = u;
      add_scaled(f, eta, bump);
      un.push_back(std::move(f));
    }
    const ConvergenceTols tols{1e-4, 1e-4, 1e-4, 1.0};
    report("scheffe/geometric-schedule", scheffe_check(un, u, 2.0, tols) == Verdict::Pass, "");

    std::vector<ScalarField> travelling;
    for (int n = 0; n < 8; ++n)
      travelling.push_back(bump_test_function(grid, {0.1 + 0.1 * n}, 0.04));
    report("scheffe/negative-control",
           scheffe_check(travelling, ScalarField(grid), 2.0) == Verdict::Vacuous,
           "vacuous as expected");

    const ScalarField v = smooth(2.0);
    std::vector<ScalarField> vn;
    eta = 0.4;
    for (int n = 0; n < 40; ++n, eta *= 0.7) {
      ScalarField f = v;
      add_scaled(f, eta, bump);
      vn.push_back(std::move(f));
    }
    report("product-limit/geometric-schedule",
           product_limit_check(un, u, vn, v, 4.0, 4.0 / 3.0, tols) == Verdict::Pass, "");
    bool refused = false;
    try {
      product_limit_check(un, u, vn, v, 3.0, 3.0, tols);
    } catch (const std::invalid_argument&) {
      refused = true;
    }
    report("product-limit/conjugate-exponent-control", refused, "refusal as expected");
  }

  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"divergence-form stochastic PDE simulator and verification toolkit"};
  app.require_subcommand(1);

  VerifyOptions vopt;
  CLI::App* verify = app.add_subcommand(
      "verify", "run a scenario and check the norm-power identity and weak form");
  verify->add_option("scenario", vopt.scenario_file, "scenario file")->required();
  verify->add_option("--replicates", vopt.replicates, "number of Monte Carlo replicates")
      ->check(CLI::PositiveNumber);
  std::uint64_t vseed = 0;
  CLI::Option* vseed_opt = verify->add_option("--seed", vseed, "noise seed override");
  verify->add_option("--dt-override", vopt.dt_override, "override the scenario step size");
  verify->add_option("--out", vopt.out, "write the JSON report to this path");
  verify->add_option("--threads", vopt.threads, "worker threads (0 = hardware)");

  ConvergenceOptions copt;
  CLI::App* conv =
      app.add_subcommand("convergence", "mean residual at the horizon versus step size (CSV)");
  conv->add_option("scenario", copt.scenario_file, "scenario file")->required();
  conv->add_option("--dts", copt.dts, "decreasing step sizes, each dividing T")
      ->required()
      ->delimiter(',');
  conv->add_option("--replicates", copt.replicates, "replicates per step size (>= 10)");
  std::uint64_t cseed = 0;
  CLI::Option* cseed_opt = conv->add_option("--seed", cseed, "noise seed override");
  conv->add_option("--out", copt.out, "write the CSV to this path");
  conv->add_option("--threads", copt.threads, "worker threads (0 = hardware)");

  BoundsOptions bopt;
  CLI::App* bounds =
      app.add_subcommand("bounds", "sup-norm moment bound over the randomized catalog (CSV)");
  bounds->add_option("--count", bopt.count, "catalog size")->check(CLI::PositiveNumber);
  bounds->add_option("--master-seed", bopt.master_seed, "catalog construction seed");
  bounds->add_option("--replicates", bopt.replicates, "replicates per scenario (>= 50)");
  std::uint64_t bseed = 0;
  CLI::Option* bseed_opt = bounds->add_option("--seed", bseed, "noise seed base");
  bounds->add_option("--ncal", bopt.n_cal, "calibrated constant for the violation flag");
  bounds->add_option("--out", bopt.out, "write the CSV to this path");
  bounds->add_option("--threads", bopt.threads, "worker threads (0 = hardware)");

  PropertiesOptions popt;
  CLI::App* props = app.add_subcommand(
      "properties", "analytic inequality, convergence-lemma and mollifier batteries");
  props->add_option("--draws", popt.draws, "random draws per battery (>= 100)");
  props->add_option("--seed", popt.seed, "draw seed");
  props->add_flag("--inject-fault", popt.inject_fault,
                  "add a deliberately false inequality row (testing hook)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the error message
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) {
      if (vseed_opt->count() > 0) vopt.seed = vseed;
      if (auto s = env_seed()) vopt.seed = *s;
      return cmd_verify(vopt);
    }
    if (conv->parsed()) {
      if (cseed_opt->count() > 0) copt.seed = cseed;
      if (auto s = env_seed()) copt.seed = *s;
      return cmd_convergence(copt);
    }
    if (bounds->parsed()) {
      if (bseed_opt->count() > 0) bopt.seed = bseed;
      if (auto s = env_seed()) bopt.seed = *s;
      return cmd_bounds(bopt);
    }
    if (props->parsed()) {
      if (auto s = env_seed()) popt.seed = *s;
      return cmd_properties(popt);
    }
  } catch (const ScenarioParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
