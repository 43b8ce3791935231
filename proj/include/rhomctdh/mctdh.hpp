#pragma once

// Variational equations of motion for a density operator of the form
//
//   rho = sum_JK |Phi_J> B_JK <Phi_K|,
//
// with the determinants Phi_J built from L orthonormal SPFs and the gauge
// <phi_j|dphi_k/dt> = 0. The coefficient matrix obeys the Lindblad equation
// with SPF-dependent Galerkin operators; the SPFs obey
//
//   i sum_k dphi_k/dt S_jk = Q [ sum_k (h - i Gamma) phi_k S_jk
//                               + sum_klm U_km phi_l S2_jklm ],
//
// with S_jk = tr(c_j^dag c_k B^2) and S2_jklm = tr(c_j^dag c_k^dag c_m c_l B^2).
// S is inverted through an eigenvalue regularization.
//
// The pure-state specialization (B = |C><C| on one block) is provided for
// imaginary-time relaxation and as an independent propagation path.

#include <Eigen/Dense>

#include <memory>

#include "rhomctdh/fock.hpp"
#include "rhomctdh/grid.hpp"
#include "rhomctdh/liouville.hpp"

namespace rhomctdh {

inline constexpr double default_eps_reg = 1e-8;

struct McSystem {
  Model model;
  std::shared_ptr<const FockBasis> basis;

  const GridSpec& grid() const noexcept { return model.grid; }
};

/// Manifold element rho(phi, B) at time t.
struct McState {
  SpfSet spfs;
  BlockMatrix b;
  double t = 0.0;
};

/// One-body matrix (S or the density matrix, depending on the power) and the
/// matching two-body tensor.
struct ReducedDensities {
  Eigen::MatrixXcd one;
  Tensor4 two;
};

/// Sum_n tr(c_j^dag c_k (B^power)_n) for power 1 or 2.
Eigen::MatrixXcd reduced_one_body(const FockBasis& basis, const BlockMatrix& b, int power = 2);
/// tr(c_j^dag c_k^dag c_m c_l B^power), symmetrized so S2_jklm = S2_kjml bitwise.
Tensor4 reduced_two_body(const FockBasis& basis, const BlockMatrix& b, int power = 2);
ReducedDensities reduced_densities(const FockBasis& basis, const BlockMatrix& b, int power = 2);

/// SPF-dependent coefficients evaluated at one instant.
struct Integrals {
  OneBodyCoeffs h;            // T + V, or V alone inside the potential step
  OneBodyCoeffs gamma;        // absorber
  TwoBodyCoeffs u;
  Eigen::MatrixXcd fields;    // mean fields, column k * L + m holds U_km
  Eigen::MatrixXcd h_phi;     // (h - i Gamma) phi_k as columns
  bool include_kinetic = true;
  bool include_cap = true;
  bool interacting = true;
};

Integrals compute_integrals(const Model& model, const SpfSet& spfs, bool include_kinetic, bool include_cap = true);

/// Galerkin H, G and Gamma_jk for the current integrals.
LindbladOperators galerkin_operators(const FockBasis& basis, const Integrals& ints);

/// Coefficient-matrix derivative. Throws InvalidArgument on stale integrals.
BlockMatrix b_rhs(const FockBasis& basis, const BlockMatrix& b, const Integrals& ints);

enum class TimeMode { real, imaginary };

/// Result of applying S_reg^{-1}.
struct RegularizedSolve {
  Eigen::MatrixXcd solution;
  double sigma_min = 0.0;
  bool regularized = false;  // sigma_min < 100 eps
};

/// Solves S_reg X = rhs with S_reg = S + eps exp(-S / eps) in the eigenbasis of S.
RegularizedSolve regularized_solve(const Eigen::MatrixXcd& s, const Eigen::MatrixXcd& rhs,
                                   double eps = default_eps_reg);

double min_eig_S(const Eigen::MatrixXcd& s);

struct SpfDerivative {
  Eigen::MatrixXcd derivative;  // n_points x L
  double sigma_min = 0.0;
  bool regularized = false;
};

/// SPF time derivatives. Real time: dphi = -i Q R S_reg^{-T}; imaginary time
/// (t = -i s): dphi/ds = -Q R S_reg^{-T}.
SpfDerivative spf_rhs(const GridSpec& grid, const SpfSet& spfs, const ReducedDensities& dens,
                      const Integrals& ints, double eps = default_eps_reg, TimeMode mode = TimeMode::real);

struct McDerivative {
  Eigen::MatrixXcd spfs;
  BlockMatrix b;
  double sigma_min = 0.0;
  bool regularized = false;
};

/// Coupled (phi, B) derivative with coefficients refreshed from state.spfs.
McDerivative mc_rhs(const McSystem& sys, const McState& state, bool include_kinetic,
                    double eps = default_eps_reg);

/// tr(H rho) with the Hermitian H (kinetic included, absorber excluded).
/// Throws ConsistencyError if the imaginary part exceeds 1e-8.
double energy(const McSystem& sys, const McState& state);
/// p_n = Re tr(B_n).
Eigen::VectorXd block_probabilities(const BlockMatrix& b);
/// n(x) = sum_jk conj(phi_j(x)) phi_k(x) D_jk with the first-power density matrix D.
RealGridFunction density(const FockBasis& basis, const McState& state);

// Pure-state specialization.

struct PureMcState {
  SpfSet spfs;
  Eigen::VectorXcd coeffs;  // over block `particles`
  int particles = 0;
  double t = 0.0;
};

struct PureDerivative {
  Eigen::MatrixXcd spfs;
  Eigen::VectorXcd coeffs;
  double sigma_min = 0.0;
  bool regularized = false;
};

/// Real time: i dC = (H - i G) C. Imaginary time: dC/ds = -(H - E) C with
/// E = <C|H|C> / <C|C>, absorber ignored. S and S2 are the usual reduced
/// density matrices <C|c^dag c|C> and <C|c^dag c^dag c c|C>.
PureDerivative pure_rhs(const McSystem& sys, const PureMcState& state, bool include_kinetic,
                        TimeMode mode, double eps = default_eps_reg);

/// <C|H|C> / <C|C> with the Hermitian H.
double pure_energy(const McSystem& sys, const PureMcState& state);

/// B_n = |C><C| for the state's block, zeros elsewhere.
McState to_density_state(const FockBasis& basis, const PureMcState& state);

}  // namespace rhomctdh
