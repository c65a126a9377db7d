#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spde/ito.hpp"
#include "spde/process.hpp"

namespace spde {

/// Named analytic field profile.  Every scenario is reproducible from text,
/// so fields are recipes, never raw arrays.  Parameters irrelevant to a kind
/// are normalized to canonical values so specs compare memberwise.
struct Profile {
  enum class Kind { Zero, Constant, Bump, Sine, Gaussian };

  Kind kind = Kind::Zero;
  double amplitude = 0.0;
  std::vector<double> center;  // bump / gaussian
  double radius = 0.0;         // bump
  double width = 0.0;          // gaussian
  std::vector<int> freq;       // sine, one integer per axis

  bool operator==(const Profile&) const = default;
};

/// Multiplicative time modulation of a coefficient field.
struct TimeFactor {
  enum class Kind { Const, Ramp, Sine };
  Kind kind = Kind::Const;

  double value(double t, double T) const;

  bool operator==(const TimeFactor&) const = default;
};

struct CoefficientEntry {
  Profile profile;
  TimeFactor tmod;

  bool operator==(const CoefficientEntry&) const = default;
};

struct CoefficientsRecipe {
  CoefficientSpec::Mode mode = CoefficientSpec::Mode::Explicit;
  Profile u0;
  CoefficientEntry f0;
  std::vector<CoefficientEntry> fvec;  // dim entries in Explicit mode, empty in Feedback
  std::vector<CoefficientEntry> g;     // K entries
  double feedback_gain = 0.0;          // Feedback mode only

  bool operator==(const CoefficientsRecipe&) const = default;
};

/// One fully reproducible experiment description.
struct ScenarioSpec {
  std::string name;
  GridSpec grid;
  TimeGrid tg;
  double p = 2.0;
  int K = 0;
  std::uint64_t seed = 0;
  CoefficientsRecipe coeffs;
  StoppingRule tau;

  bool operator==(const ScenarioSpec&) const = default;
};

/// Concrete objects ready for the integrator and the verification passes.
struct BuiltScenario {
  ScalarField u0;
  CoefficientSpec coeffs;
};

ScalarField sample_profile(const GridSpec& grid, const Profile& prof);

/// Materializes recipes; validates the feedback stability bound.
BuiltScenario build(const ScenarioSpec& spec);

class ScenarioParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the scenario text format (sections [grid], [time], [coefficients],
/// [noise], [stopping]).  Unknown keys or sections are errors; there are no
/// silent defaults for required keys.
ScenarioSpec parse_scenario(const std::string& text);
ScenarioSpec load_scenario(const std::string& path);
std::string serialize_scenario(const ScenarioSpec& spec);

/// Shipped reference scenarios (also available as files under scenarios/).
std::vector<std::string> reference_names();
ScenarioSpec reference_scenario(const std::string& name);

/// Deterministic list of randomized-but-tame scenarios; coefficient
/// amplitudes are drawn in [0.1, 2] and every spec integrates without
/// blow-up at its declared resolution.
std::vector<ScenarioSpec> randomized_catalog(int count, std::uint64_t master_seed);

/// Multiplies every coefficient amplitude (u0, f0, f^i, g) by c.  The
/// feedback gain is untouched: that term is already linear in u.
ScenarioSpec scaled_scenario(ScenarioSpec spec, double c);

/// Same scenario at a different time resolution.
ScenarioSpec with_steps(ScenarioSpec spec, int steps);

/// Builds, samples noise for the replicate, integrates.
PathSample run_scenario(const ScenarioSpec& spec, std::uint64_t replicate);

/// Factory for convergence studies: run at a given step count.
PathFactory make_path_factory(const ScenarioSpec& spec);

/// True when the scenario has no stochastic term (K = 0 or all g zero).
bool is_deterministic(const ScenarioSpec& spec);

}  // namespace spde
