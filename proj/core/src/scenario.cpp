#include "spde/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace spde {

double TimeFactor::value(double t, double T) const {
  switch (kind) {
    case Kind::Const: return 1.0;
    case Kind::Ramp: return t / T;
    case Kind::Sine: return std::sin(2.0 * std::numbers::pi * t / T);
  }
  return 1.0;
}

namespace {

std::string fmt_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string fmt_int(long long x) { return std::to_string(x); }

struct ProfileParams {
  std::optional<double> amp;
  std::optional<double> radius;
  std::optional<double> width;
  std::optional<std::vector<double>> center;
  std::optional<std::vector<int>> freq;
};

// Fills in canonical values for every parameter, including the ones the kind
// does not use, so that parsed and programmatically built specs compare
// memberwise.
Profile normalize_profile(Profile::Kind kind, const ProfileParams& params, int dim, double len) {
  Profile prof;
  prof.kind = kind;
  prof.amplitude = kind == Profile::Kind::Zero ? 0.0 : params.amp.value_or(1.0);
  prof.center = params.center.value_or(std::vector<double>(static_cast<std::size_t>(dim), len / 2.0));
  prof.radius = params.radius.value_or(len / 4.0);
  prof.width = params.width.value_or(len / 8.0);
  prof.freq = params.freq.value_or(std::vector<int>(static_cast<std::size_t>(dim), 1));
  if (prof.center.size() != static_cast<std::size_t>(dim))
    throw ScenarioParseError("profile center needs one value per axis");
  if (prof.freq.size() != static_cast<std::size_t>(dim))
    throw ScenarioParseError("profile freq needs one value per axis");
  for (int f : prof.freq)
    if (f == 0) throw ScenarioParseError("sine frequency must be a nonzero integer");
  if (kind == Profile::Kind::Bump && !(prof.radius > 0.0 && prof.radius < len / 2.0))
    throw ScenarioParseError("bump radius out of range");
  if (kind == Profile::Kind::Gaussian && !(prof.width > 0.0))
    throw ScenarioParseError("gaussian width must be positive");
  return prof;
}

Profile make_profile(Profile::Kind kind, int dim, double len, double amp,
                     std::vector<double> center = {}, double radius = 0.0, double width = 0.0,
                     std::vector<int> freq = {}) {
  ProfileParams params;
  params.amp = amp;
  if (!center.empty()) params.center = std::move(center);
  if (radius > 0.0) params.radius = radius;
  if (width > 0.0) params.width = width;
  if (!freq.empty()) params.freq = std::move(freq);
  return normalize_profile(kind, params, dim, len);
}

}  // namespace

ScalarField sample_profile(const GridSpec& grid, const Profile& prof) {
  const double len = grid.len;
  switch (prof.kind) {
    case Profile::Kind::Zero:
      return ScalarField(grid);
    case Profile::Kind::Constant:
      return sample_field(grid, [&](const std::array<double, 3>&) { return prof.amplitude; });
    case Profile::Kind::Sine:
      return sample_field(grid, [&](const std::array<double, 3>& x) {
        double v = prof.amplitude;
        for (int a = 0; a < grid.dim; ++a)
          v *= std::sin(2.0 * std::numbers::pi * prof.freq[static_cast<std::size_t>(a)] *
                        x[static_cast<std::size_t>(a)] / len);
        return v;
      });
    case Profile::Kind::Bump: {
      ScalarField base = bump_test_function(grid, prof.center, prof.radius);
      return scaled(base, prof.amplitude);
    }
    case Profile::Kind::Gaussian:
      return sample_field(grid, [&](const std::array<double, 3>& x) {
        double d2 = 0.0;
        for (int a = 0; a < grid.dim; ++a) {
          double d = std::abs(x[static_cast<std::size_t>(a)] - prof.center[static_cast<std::size_t>(a)]);
          d = std::min(d, len - d);
          d2 += d * d;
        }
        return prof.amplitude * std::exp(-d2 / (2.0 * prof.width * prof.width));
      });
  }
  throw std::logic_error("unreachable");
}

BuiltScenario build(const ScenarioSpec& spec) {
  const GridSpec& grid = spec.grid;
  if (!(spec.p >= 2.0)) throw std::invalid_argument("p must be >= 2");
  if (spec.K < 0 || spec.coeffs.g.size() != static_cast<std::size_t>(spec.K))
    throw std::invalid_argument("g recipe count must equal K");

  CoefficientSpec cs;
  cs.mode = spec.coeffs.mode;
  cs.modes = spec.K;
  cs.feedback_gain = spec.coeffs.feedback_gain;
  const double T = spec.tg.T;

  auto f0_field = std::make_shared<const ScalarField>(sample_profile(grid, spec.coeffs.f0.profile));
  const TimeFactor f0_tmod = spec.coeffs.f0.tmod;
  cs.f0 = [f0_field, f0_tmod, T](double t, const ScalarField&) {
    return scaled(*f0_field, f0_tmod.value(t, T));
  };

  if (spec.coeffs.mode == CoefficientSpec::Mode::Feedback) {
    const double bound = grid.h * grid.h / (2.0 * grid.dim);
    if (spec.tg.dt * std::max(cs.feedback_gain, 0.0) > bound * (1.0 + 1e-12))
      throw std::invalid_argument("feedback scenario violates dt * gain <= h^2 / (2 dim)");
    if (!spec.coeffs.fvec.empty())
      throw std::invalid_argument("feedback scenarios must not carry explicit f^i recipes");
    const double gain = cs.feedback_gain;
    cs.fvec = [gain](double, const ScalarField& u) {
      VectorField d = grad(u);
      for (auto& comp : d.comps)
        for (double& x : comp.values) x *= gain;
      return d;
    };
  } else {
    if (spec.coeffs.fvec.size() != static_cast<std::size_t>(grid.dim))
      throw std::invalid_argument("explicit scenarios need one f^i recipe per axis");
    auto comps = std::make_shared<std::vector<std::pair<ScalarField, TimeFactor>>>();
    for (const auto& entry : spec.coeffs.fvec)
      comps->emplace_back(sample_profile(grid, entry.profile), entry.tmod);
    cs.fvec = [comps, grid, T](double t, const ScalarField&) {
      VectorField out(grid);
      for (std::size_t a = 0; a < comps->size(); ++a)
        out.comps[a] = scaled((*comps)[a].first, (*comps)[a].second.value(t, T));
      return out;
    };
  }

  auto g_modes = std::make_shared<std::vector<std::pair<ScalarField, TimeFactor>>>();
  for (const auto& entry : spec.coeffs.g)
    g_modes->emplace_back(sample_profile(grid, entry.profile), entry.tmod);
  cs.g = [g_modes, grid, T](double t, const ScalarField&) {
    SeqField out(grid);
    out.modes.reserve(g_modes->size());
    for (const auto& [field, tmod] : *g_modes) out.modes.push_back(scaled(field, tmod.value(t, T)));
    return out;
  };

  return BuiltScenario{sample_profile(grid, spec.coeffs.u0), std::move(cs)};
}

// ---- text format -----------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
    throw ScenarioParseError("invalid number for " + what + ": '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size())
    throw ScenarioParseError("invalid integer for " + what + ": '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size())
    throw ScenarioParseError("invalid integer for " + what + ": '" + s + "'");
  return v;
}

std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_double(tok, what));
  return out;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(static_cast<int>(parse_int(tok, what)));
  return out;
}

struct ParsedEntry {
  Profile profile;
  TimeFactor tmod;
};

ParsedEntry parse_entry(const std::string& text, int dim, double len, bool allow_tmod,
                        const std::string& what) {
  std::stringstream ss(text);
  std::string kind_tok;
  ss >> kind_tok;
  Profile::Kind kind;
  if (kind_tok == "zero") kind = Profile::Kind::Zero;
  else if (kind_tok == "constant") kind = Profile::Kind::Constant;
  else if (kind_tok == "bump") kind = Profile::Kind::Bump;
  else if (kind_tok == "sine") kind = Profile::Kind::Sine;
  else if (kind_tok == "gaussian") kind = Profile::Kind::Gaussian;
  else throw ScenarioParseError("unknown profile '" + kind_tok + "' for " + what);

  ProfileParams params;
  TimeFactor tmod;
  std::string tok;
  while (ss >> tok) {
    const std::size_t eq = tok.find('=');
    if (eq == std::string::npos)
      throw ScenarioParseError("malformed profile parameter '" + tok + "' for " + what);
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "amp") params.amp = parse_double(val, what + ".amp");
    else if (key == "center") params.center = parse_double_list(val, what + ".center");
    else if (key == "radius") params.radius = parse_double(val, what + ".radius");
    else if (key == "width") params.width = parse_double(val, what + ".width");
    else if (key == "freq") params.freq = parse_int_list(val, what + ".freq");
    else if (key == "tmod") {
      if (!allow_tmod) throw ScenarioParseError("tmod is not allowed for " + what);
      if (val == "const") tmod.kind = TimeFactor::Kind::Const;
      else if (val == "ramp") tmod.kind = TimeFactor::Kind::Ramp;
      else if (val == "sine") tmod.kind = TimeFactor::Kind::Sine;
      else throw ScenarioParseError("unknown tmod '" + val + "' for " + what);
    } else {
      throw ScenarioParseError("unknown profile parameter '" + key + "' for " + what);
    }
  }
  return ParsedEntry{normalize_profile(kind, params, dim, len), tmod};
}

std::string serialize_profile(const Profile& prof, const TimeFactor* tmod) {
  std::string out;
  auto list_d = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_double(v[i]);
    return s;
  };
  auto list_i = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_int(v[i]);
    return s;
  };
  switch (prof.kind) {
    case Profile::Kind::Zero: out = "zero"; break;
    case Profile::Kind::Constant: out = "constant amp=" + fmt_double(prof.amplitude); break;
    case Profile::Kind::Sine:
      out = "sine amp=" + fmt_double(prof.amplitude) + " freq=" + list_i(prof.freq);
      break;
    case Profile::Kind::Bump:
      out = "bump amp=" + fmt_double(prof.amplitude) + " center=" + list_d(prof.center) +
            " radius=" + fmt_double(prof.radius);
      break;
    case Profile::Kind::Gaussian:
      out = "gaussian amp=" + fmt_double(prof.amplitude) + " center=" + list_d(prof.center) +
            " width=" + fmt_double(prof.width);
      break;
  }
  if (tmod != nullptr && tmod->kind != TimeFactor::Kind::Const)
    out += std::string(" tmod=") + (tmod->kind == TimeFactor::Kind::Ramp ? "ramp" : "sine");
  return out;
}

using Section = std::map<std::string, std::string>;

}  // namespace

ScenarioSpec parse_scenario(const std::string& text) {
  static const std::vector<std::string> known_sections = {"",     "grid",  "time",
                                                          "coefficients", "noise", "stopping"};
  std::map<std::string, Section> sections;
  for (const auto& name : known_sections) sections[name];

  std::string current = "";
  std::stringstream ss(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(ss, raw)) {
    ++lineno;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ScenarioParseError("malformed section header on line " + std::to_string(lineno));
      current = trim(line.substr(1, line.size() - 2));
      if (std::find(known_sections.begin(), known_sections.end(), current) == known_sections.end())
        throw ScenarioParseError("unknown section [" + current + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ScenarioParseError("expected 'key = value' on line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ScenarioParseError("empty key on line " + std::to_string(lineno));
    if (!sections[current].emplace(key, val).second)
      throw ScenarioParseError("duplicate key '" + key + "' in [" + current + "]");
  }

  auto need = [&](const std::string& sec, const std::string& key) {
    auto& s = sections[sec];
    auto it = s.find(key);
    if (it == s.end())
      throw ScenarioParseError("missing key '" + key + "' in " +
                               (sec.empty() ? "header" : "[" + sec + "]"));
    std::string v = it->second;
    s.erase(it);
    return v;
  };
  auto take = [&](const std::string& sec, const std::string& key) -> std::optional<std::string> {
    auto& s = sections[sec];
    auto it = s.find(key);
    if (it == s.end()) return std::nullopt;
    std::string v = it->second;
    s.erase(it);
    return v;
  };

  const std::string name = need("", "name");
  const double p = parse_double(need("", "p"), "p");
  if (!(p >= 2.0)) throw ScenarioParseError("p must be >= 2");
  const std::uint64_t seed = parse_uint(need("", "seed"), "seed");

  const int dim = static_cast<int>(parse_int(need("grid", "dim"), "dim"));
  const int n = static_cast<int>(parse_int(need("grid", "n"), "n"));
  const double len = parse_double(need("grid", "len"), "len");
  GridSpec grid = [&] {
    try {
      return GridSpec(dim, n, len);
    } catch (const std::invalid_argument& e) {
      throw ScenarioParseError(e.what());
    }
  }();

  const double T = parse_double(need("time", "T"), "T");
  const int M = static_cast<int>(parse_int(need("time", "M"), "M"));
  TimeGrid tg = [&] {
    try {
      return TimeGrid(T, M);
    } catch (const std::invalid_argument& e) {
      throw ScenarioParseError(e.what());
    }
  }();

  const int K = static_cast<int>(parse_int(need("noise", "K"), "K"));
  if (K < 0) throw ScenarioParseError("K must be >= 0");

  CoefficientsRecipe recipe;
  const std::string mode = need("coefficients", "mode");
  if (mode == "explicit") recipe.mode = CoefficientSpec::Mode::Explicit;
  else if (mode == "feedback") recipe.mode = CoefficientSpec::Mode::Feedback;
  else throw ScenarioParseError("mode must be 'explicit' or 'feedback'");

  recipe.u0 = parse_entry(need("coefficients", "u0"), dim, len, false, "u0").profile;
  {
    const ParsedEntry e = parse_entry(need("coefficients", "f0"), dim, len, true, "f0");
    recipe.f0 = CoefficientEntry{e.profile, e.tmod};
  }
  if (recipe.mode == CoefficientSpec::Mode::Explicit) {
    for (int a = 1; a <= dim; ++a) {
      const std::string key = "f" + std::to_string(a);
      const ParsedEntry e = parse_entry(need("coefficients", key), dim, len, true, key);
      recipe.fvec.push_back(CoefficientEntry{e.profile, e.tmod});
    }
  } else {
    recipe.feedback_gain = parse_double(need("coefficients", "gain"), "gain");
    const double bound = grid.h * grid.h / (2.0 * grid.dim);
    if (tg.dt * std::max(recipe.feedback_gain, 0.0) > bound * (1.0 + 1e-12))
      throw ScenarioParseError("feedback scenario violates dt * gain <= h^2 / (2 dim)");
  }
  for (int k = 1; k <= K; ++k) {
    const std::string key = "g" + std::to_string(k);
    const ParsedEntry e = parse_entry(need("coefficients", key), dim, len, true, key);
    recipe.g.push_back(CoefficientEntry{e.profile, e.tmod});
  }

  StoppingRule tau;
  const std::string kind = need("stopping", "kind");
  if (kind == "horizon") {
    tau = StoppingRule::horizon();
  } else if (kind == "hitting") {
    const std::string functional = need("stopping", "functional");
    StoppingRule::Functional f;
    if (functional == "lp") f = StoppingRule::Functional::LpNormP;
    else if (functional == "xi") f = StoppingRule::Functional::XiQuadraticVariation;
    else throw ScenarioParseError("functional must be 'lp' or 'xi'");
    tau = StoppingRule::hitting(f, parse_double(need("stopping", "level"), "level"));
  } else {
    throw ScenarioParseError("stopping kind must be 'horizon' or 'hitting'");
  }

  for (const auto& [sec, kv] : sections)
    if (!kv.empty())
      throw ScenarioParseError("unknown key '" + kv.begin()->first + "' in " +
                               (sec.empty() ? "header" : "[" + sec + "]"));
  (void)take;

  return ScenarioSpec{name, grid, tg, p, K, seed, std::move(recipe), tau};
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioParseError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize_scenario(const ScenarioSpec& spec) {
  std::string out;
  out += "name = " + spec.name + "\n";
  out += "p = " + fmt_double(spec.p) + "\n";
  out += "seed = " + std::to_string(spec.seed) + "\n";
  out += "\n[grid]\n";
  out += "dim = " + fmt_int(spec.grid.dim) + "\n";
  out += "n = " + fmt_int(spec.grid.n) + "\n";
  out += "len = " + fmt_double(spec.grid.len) + "\n";
  out += "\n[time]\n";
  out += "T = " + fmt_double(spec.tg.T) + "\n";
  out += "M = " + fmt_int(spec.tg.M) + "\n";
  out += "\n[coefficients]\n";
  const bool feedback = spec.coeffs.mode == CoefficientSpec::Mode::Feedback;
  out += std::string("mode = ") + (feedback ? "feedback" : "explicit") + "\n";
  out += "u0 = " + serialize_profile(spec.coeffs.u0, nullptr) + "\n";
  out += "f0 = " + serialize_profile(spec.coeffs.f0.profile, &spec.coeffs.f0.tmod) + "\n";
  if (feedback) {
    out += "gain = " + fmt_double(spec.coeffs.feedback_gain) + "\n";
  } else {
    for (std::size_t a = 0; a < spec.coeffs.fvec.size(); ++a)
      out += "f" + std::to_string(a + 1) + " = " +
             serialize_profile(spec.coeffs.fvec[a].profile, &spec.coeffs.fvec[a].tmod) + "\n";
  }
  for (std::size_t k = 0; k < spec.coeffs.g.size(); ++k)
    out += "g" + std::to_string(k + 1) + " = " +
           serialize_profile(spec.coeffs.g[k].profile, &spec.coeffs.g[k].tmod) + "\n";
  out += "\n[noise]\n";
  out += "K = " + fmt_int(spec.K) + "\n";
  out += "\n[stopping]\n";
  if (spec.tau.kind == StoppingRule::Kind::Horizon) {
    out += "kind = horizon\n";
  } else {
    out += "kind = hitting\n";
    out += std::string("functional = ") +
           (spec.tau.functional == StoppingRule::Functional::LpNormP ? "lp" : "xi") + "\n";
    out += "level = " + fmt_double(spec.tau.level) + "\n";
  }
  return out;
}

// ---- shipped catalog --------------------------------------------------------

std::vector<std::string> reference_names() {
  return {"zero", "const-noise-p4", "det-chain-rule-p4", "heat-feedback", "mix-2d"};
}

ScenarioSpec reference_scenario(const std::string& name) {
  using PK = Profile::Kind;
  if (name == "zero") {
    GridSpec grid(1, 16, 1.0);
    CoefficientsRecipe recipe;
    recipe.u0 = make_profile(PK::Zero, 1, 1.0, 0.0);
    recipe.f0 = {make_profile(PK::Zero, 1, 1.0, 0.0), {}};
    recipe.fvec = {{make_profile(PK::Zero, 1, 1.0, 0.0), {}}};
    return ScenarioSpec{name, grid, TimeGrid(1.0, 64), 2.0, 0, 1, std::move(recipe), {}};
  }
  if (name == "const-noise-p4") {
    GridSpec grid(1, 32, 1.0);
    CoefficientsRecipe recipe;
    recipe.u0 = make_profile(PK::Zero, 1, 1.0, 0.0);
    recipe.f0 = {make_profile(PK::Zero, 1, 1.0, 0.0), {}};
    recipe.fvec = {{make_profile(PK::Zero, 1, 1.0, 0.0), {}}};
    recipe.g = {{make_profile(PK::Constant, 1, 1.0, 1.0), {}}};
    return ScenarioSpec{name, grid, TimeGrid(1.0, 1024), 4.0, 1, 42, std::move(recipe), {}};
  }
  if (name == "det-chain-rule-p4") {
    GridSpec grid(1, 64, 1.0);
    CoefficientsRecipe recipe;
    recipe.u0 = make_profile(PK::Zero, 1, 1.0, 0.0);
    recipe.f0 = {make_profile(PK::Bump, 1, 1.0, 0.1, {0.5}, 0.2), {}};
    recipe.fvec = {{make_profile(PK::Zero, 1, 1.0, 0.0), {}}};
    return ScenarioSpec{name, grid, TimeGrid(1.0, 1024), 4.0, 0, 7, std::move(recipe), {}};
  }
  if (name == "heat-feedback") {
    GridSpec grid(1, 16, 1.0);
    CoefficientsRecipe recipe;
    recipe.mode = CoefficientSpec::Mode::Feedback;
    recipe.feedback_gain = 1.0;
    recipe.u0 = make_profile(PK::Sine, 1, 1.0, 0.5);
    recipe.f0 = {make_profile(PK::Zero, 1, 1.0, 0.0), {}};
    recipe.g = {{make_profile(PK::Bump, 1, 1.0, 0.05, {0.5}, 0.2), {}}};
    return ScenarioSpec{name, grid, TimeGrid(0.5, 512), 2.0, 1, 11, std::move(recipe), {}};
  }
  if (name == "mix-2d") {
    GridSpec grid(2, 16, 1.0);
    CoefficientsRecipe recipe;
    recipe.u0 = make_profile(PK::Gaussian, 2, 1.0, 1.0, {0.5, 0.5}, 0.0, 0.125);
    recipe.f0 = {make_profile(PK::Sine, 2, 1.0, 0.3), {TimeFactor::Kind::Sine}};
    recipe.fvec = {{make_profile(PK::Sine, 2, 1.0, 0.4), {}},
                   {make_profile(PK::Gaussian, 2, 1.0, 0.3, {0.5, 0.5}, 0.0, 0.125), {}}};
    recipe.g = {{make_profile(PK::Constant, 2, 1.0, 0.5), {}},
                {make_profile(PK::Sine, 2, 1.0, 0.4, {}, 0.0, 0.0, {2, 1}), {}}};
    return ScenarioSpec{name, grid, TimeGrid(0.5, 128), 3.0, 2, 21, std::move(recipe), {}};
  }
  throw std::invalid_argument("unknown reference scenario: " + name);
}

std::vector<ScenarioSpec> randomized_catalog(int count, std::uint64_t master_seed) {
  if (count < 1) throw std::invalid_argument("catalog count must be >= 1");
  using PK = Profile::Kind;
  std::vector<ScenarioSpec> out;
  out.reserve(static_cast<std::size_t>(count));

  for (int i = 0; i < count; ++i) {
    std::mt19937_64 eng(detail::stream_key(master_seed, static_cast<std::uint64_t>(i), 0x5CE7A210ULL));
    auto u01 = [&] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
    auto uni = [&](double a, double b) { return a + (b - a) * u01(); };
    auto pick = [&](int k) { return static_cast<int>(eng() % static_cast<std::uint64_t>(k)); };
    auto amp = [&] { return uni(0.1, 2.0); };

    const bool feedback = (i % 4 == 3);
    const int dim = (!feedback && i % 5 == 4) ? 2 : 1;
    const int n = (dim == 2 || feedback) ? 16 : 32;
    const double len = 1.0;
    const double p = static_cast<double>(2 + pick(3));
    const int K = (i % 7 == 6) ? 0 : 1 + pick(3);
    const double T = 0.5;
    const int M = feedback ? 512 : 128;

    auto rnd_center = [&] {
      std::vector<double> c;
      for (int a = 0; a < dim; ++a) c.push_back(uni(0.4, 0.6));
      return c;
    };
    auto rnd_freq = [&] {
      std::vector<int> f;
      for (int a = 0; a < dim; ++a) f.push_back(1 + pick(2));
      return f;
    };
    // Profile scales stay several cells wide so spatial discretization error
    // is subdominant to the Monte Carlo noise in every shipped check.
    const double hh = len / n;
    auto rnd_profile = [&](std::initializer_list<PK> kinds) {
      std::vector<PK> ks(kinds);
      const PK k = ks[static_cast<std::size_t>(pick(static_cast<int>(ks.size())))];
      switch (k) {
        case PK::Zero: return make_profile(PK::Zero, dim, len, 0.0);
        case PK::Constant: return make_profile(PK::Constant, dim, len, amp());
        case PK::Sine: return make_profile(PK::Sine, dim, len, amp(), {}, 0.0, 0.0, rnd_freq());
        case PK::Bump:
          return make_profile(PK::Bump, dim, len, amp(), rnd_center(),
                              std::max(uni(0.18, 0.3), 6.0 * hh));
        case PK::Gaussian:
          return make_profile(PK::Gaussian, dim, len, amp(), rnd_center(), 0.0,
                              std::max(uni(0.1, 0.16), 4.0 * hh));
      }
      throw std::logic_error("unreachable");
    };
    auto rnd_tmod = [&] {
      const int k = pick(3);
      TimeFactor t;
      t.kind = k == 0 ? TimeFactor::Kind::Const : (k == 1 ? TimeFactor::Kind::Ramp : TimeFactor::Kind::Sine);
      return t;
    };

    CoefficientsRecipe recipe;
    recipe.u0 = rnd_profile({PK::Zero, PK::Sine, PK::Bump, PK::Gaussian});
    recipe.f0 = {rnd_profile({PK::Zero, PK::Sine, PK::Bump}), rnd_tmod()};
    if (feedback) {
      recipe.mode = CoefficientSpec::Mode::Feedback;
      recipe.feedback_gain = uni(0.1, 1.0);
    } else {
      for (int a = 0; a < dim; ++a)
        recipe.fvec.push_back({rnd_profile({PK::Zero, PK::Sine, PK::Gaussian}), rnd_tmod()});
    }
    for (int k = 0; k < K; ++k)
      recipe.g.push_back({rnd_profile({PK::Constant, PK::Sine, PK::Bump}), rnd_tmod()});

    StoppingRule tau;
    if (i % 5 == 2)
      tau = StoppingRule::hitting(StoppingRule::Functional::LpNormP, uni(0.5, 4.0));

    char buf[16];
    std::snprintf(buf, sizeof(buf), "rnd-%03d", i);
    out.push_back(ScenarioSpec{buf, GridSpec(dim, n, len), TimeGrid(T, M), p, K, eng(),
                               std::move(recipe), tau});
  }
  return out;
}

ScenarioSpec scaled_scenario(ScenarioSpec spec, double c) {
  spec.coeffs.u0.amplitude *= c;
  spec.coeffs.f0.profile.amplitude *= c;
  for (auto& entry : spec.coeffs.fvec) entry.profile.amplitude *= c;
  for (auto& entry : spec.coeffs.g) entry.profile.amplitude *= c;
  return spec;
}

ScenarioSpec with_steps(ScenarioSpec spec, int steps) {
  spec.tg = TimeGrid(spec.tg.T, steps);
  return spec;
}

PathSample run_scenario(const ScenarioSpec& spec, std::uint64_t replicate) {
  BuiltScenario built = build(spec);
  NoisePath noise = sample_noise(spec.tg, spec.K, spec.seed, replicate);
  ProcessPath path = integrate(built.u0, built.coeffs, noise);
  return PathSample{std::move(path), std::move(noise)};
}

PathFactory make_path_factory(const ScenarioSpec& spec) {
  return [spec](int steps, std::uint64_t replicate) {
    return run_scenario(with_steps(spec, steps), replicate);
  };
}

bool is_deterministic(const ScenarioSpec& spec) {
  if (spec.K == 0) return true;
  for (const auto& entry : spec.coeffs.g)
    if (entry.profile.kind != Profile::Kind::Zero && entry.profile.amplitude != 0.0) return false;
  return true;
}

}  // namespace spde
