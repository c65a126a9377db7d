#pragma once

#include <functional>
#include <string>

#include "spde/lattice.hpp"
#include "spde/noise.hpp"

namespace spde {

/// Coefficient evaluators for du = (div f + f0) dt + g^k dw^k.
///
/// In Explicit mode the evaluators ignore the current state; Feedback mode is
/// the heat-type case fvec = gain * grad(u), where the integrator enforces
/// the diffusion stability bound dt * gain <= h^2 / (2 dim).
struct CoefficientSpec {
  enum class Mode { Explicit, Feedback };

  Mode mode = Mode::Explicit;
  int modes = 0;               // K, must match the noise path
  double feedback_gain = 0.0;  // Feedback mode only

  std::function<ScalarField(double t, const ScalarField& u)> f0;
  std::function<VectorField(double t, const ScalarField& u)> fvec;
  std::function<SeqField(double t, const ScalarField& u)> g;
};

/// A discrete path u_{t_0..t_M} plus the left-endpoint coefficient fields
/// that each step actually consumed (needed by every verification pass).
struct ProcessPath {
  TimeGrid tg;
  std::vector<ScalarField> snapshots;   // M + 1
  std::vector<ScalarField> f0_steps;    // M
  std::vector<VectorField> fvec_steps;  // M
  std::vector<SeqField> g_steps;        // M

  const GridSpec& grid() const { return snapshots.front().grid; }
};

/// Thrown when a snapshot stops being finite mid-integration.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(int step, std::string msg) : std::runtime_error(std::move(msg)), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// Explicit Euler-Maruyama with left-endpoint coefficients:
///   u_{m+1} = u_m + dt (div fvec_m + f0_m) + sum_k g^k_m dW[k][m].
ProcessPath integrate(const ScalarField& u0, const CoefficientSpec& coeffs, const NoisePath& np);

/// Interval boundary for a step process: either a fixed time or the first
/// time |w^mode| reaches the level.  Either way the boundary snaps to the
/// next grid time.
struct StepTime {
  enum class Kind { Fixed, Hitting };
  Kind kind = Kind::Fixed;
  double time = 0.0;   // Fixed
  int mode = 0;        // Hitting: monitored Brownian mode
  double level = 0.0;  // Hitting: |w| threshold
};

/// Piecewise-constant-in-time mode stack
///   g^k_t = sum_i gik[i][k] * 1_{(tau_{i-1}, tau_i]}(t),  i, k = 1..j,
/// whose integral has the closed form
///   u_t = sum_{i,k} gik[i][k] (w^k_{t ^ tau_i} - w^k_{t ^ tau_{i-1}}).
struct StepProcessSpec {
  GridSpec grid;
  int j;                                      // intervals = modes
  std::vector<std::vector<ScalarField>> gik;  // j x j (interval, mode)
  std::vector<StepTime> taus;                 // j + 1 boundaries tau_0 <= ... <= tau_j
};

/// Builds the path from the closed-form sum (not by stepping) and fills the
/// coefficient caches with the equivalent piecewise-constant stack so the
/// result plugs into the same verification passes as integrate().
ProcessPath integrate_step_process(const StepProcessSpec& sp, const NoisePath& np);

/// Maximum over m of the discrete weak-form defect
///   (u_m, phi) - (u_0, phi)
///     - sum_{j<m} dt [ (f0_j, phi) - sum_i (fvec_j^i, D_i phi) ]
///     - sum_{j<m} sum_k (g^k_j, phi) dW[k][j],
/// relative to max(1, max_m |(u_m, phi)|).  For any path produced by
/// integrate() this is a floating-accumulation residual only, since the
/// centered difference is exactly skew-adjoint on the periodic lattice.
double weak_form_residual(const ProcessPath& path, const NoisePath& np, const ScalarField& phi);

}  // namespace spde
