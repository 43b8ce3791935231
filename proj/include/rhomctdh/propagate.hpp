#pragma once

// Time stepping. The real-time scheme is a Strang splitting
//
//   K(tau/2) P(tau) K(tau/2),
//
// where K applies exp(-i tau T) to every SPF in Fourier space (B is left
// alone, which is exact for a one-body operator) and P is one classical RK4
// step of the coupled variational system with T removed from h. Integrals are
// refreshed at every RK4 stage.
//
// Ground states come from imaginary-time relaxation of the pure-state
// equations, followed by renormalization and re-orthonormalization.

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <limits>
#include <vector>

#include "rhomctdh/mctdh.hpp"

namespace rhomctdh {

struct PropagationConfig {
  double tau = 2.5e-3;
  double t_final = 0.0;
  int record_every = 20;
  double eps_reg = default_eps_reg;
  /// Drift of max |<phi_j|phi_k> - delta_jk| that triggers re-orthonormalization.
  double orthonormality_tolerance = 1e-8;
};

struct TrajectoryRecord {
  double t = 0.0;
  Eigen::VectorXd probabilities;
  double energy = 0.0;
  double trace = 0.0;
  double sigma_min = 0.0;
  RealGridFunction density;
  double hermiticity = 0.0;
  double orthonormality = 0.0;
};

/// Lowest eigenvalue seen and whether regularization was active during a step.
struct StepInfo {
  double sigma_min = std::numeric_limits<double>::infinity();
  bool regularized = false;

  void merge(double sigma, bool reg) {
    sigma_min = std::min(sigma_min, sigma);
    regularized = regularized || reg;
  }
};

/// phi_j <- exp(-i dt T) phi_j. Pass tau / 2 for the split scheme.
void kinetic_half_step(const GridSpec& grid, SpfSet& spfs, double dt);
McState kinetic_half_step(const GridSpec& grid, McState state, double dt);

/// One RK4 step of the coupled system with h = V (no kinetic energy).
McState potential_step(const McSystem& sys, const McState& state, double tau, double eps = default_eps_reg,
                       StepInfo* info = nullptr);
McState split_step(const McSystem& sys, const McState& state, double tau, double eps = default_eps_reg,
                   StepInfo* info = nullptr);
/// Unsplit RK4 with the full h, used for cross-checks.
McState rk4_step(const McSystem& sys, const McState& state, double tau, double eps = default_eps_reg,
                 StepInfo* info = nullptr);

PureMcState pure_potential_step(const McSystem& sys, const PureMcState& state, double tau,
                                double eps = default_eps_reg);
PureMcState pure_split_step(const McSystem& sys, const PureMcState& state, double tau,
                            double eps = default_eps_reg);
/// One RK4 step of the pure-state equations with the full h.
PureMcState pure_rk4_step(const McSystem& sys, const PureMcState& state, double dt, TimeMode mode,
                          double eps = default_eps_reg);

/// Modified Gram-Schmidt in the dx-weighted inner product. Returns R with
/// phi_old = phi_new R (upper triangular).
Eigen::MatrixXcd orthonormalize(const GridSpec& grid, SpfSet& spfs);
/// Re-orthonormalizes the SPFs and applies the congruent map to B.
void reorthonormalize(const FockBasis& basis, const GridSpec& grid, McState& state);
void reorthonormalize(const FockBasis& basis, const GridSpec& grid, PureMcState& state);

struct RelaxConfig {
  double ds = 0.01;
  int max_steps = 200000;
  /// Stop when |E(s + ds) - E(s)| / ds drops below this ...
  double tolerance = 1e-10;
  /// ... and the imaginary-time derivatives of C and phi are below this in norm.
  double residual_tolerance = 1e-8;
  double eps_reg = 1e-6;
};

struct RelaxResult {
  PureMcState state;
  double energy = 0.0;
  int steps = 0;
};

/// Imaginary-time relaxation without the absorber. Throws ConvergenceFailure.
RelaxResult relax_imaginary(const McSystem& sys, PureMcState initial, const RelaxConfig& config);

TrajectoryRecord make_record(const McSystem& sys, const McState& state);

using PropagationObserver = std::function<void(const McState&, const TrajectoryRecord&)>;

/// Repeated split steps from state.t to state.t + t_final; a record every
/// `record_every` steps and at the end. Throws NumericalBlowup.
std::vector<TrajectoryRecord> propagate(const McSystem& sys, McState& state, const PropagationConfig& config,
                                        const PropagationObserver& observer = {});

}  // namespace rhomctdh
