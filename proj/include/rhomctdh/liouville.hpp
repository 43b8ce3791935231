#pragma once

// Fixed-basis (full-CI) Lindblad dynamics of a block-diagonal density matrix
// in a truncated Fock space, with annihilators as jump operators weighted by
// the absorber coefficients Gamma_jk:
//
//   dB_n/dt = -i[H, B_n] - {G, B_n} + 2 sum_jk Gamma_jk c_k B_{n+1} c_j^dagger,
//
// with B_{N+1} = 0. The same right-hand side drives the coefficient matrix
// of the variational method, where H, G and Gamma change with the orbitals.

#include <Eigen/Dense>

#include <functional>

#include "rhomctdh/fock.hpp"

namespace rhomctdh {

/// Block-diagonal operators and CAP coefficients for one fixed basis.
struct LindbladOperators {
  BlockMatrix hamiltonian;  // Galerkin H (one- plus two-body)
  BlockMatrix cap;          // Galerkin G of the absorber
  Eigen::MatrixXcd cap_coeffs;  // Gamma_jk
};

BlockMatrix lindblad_rhs(const FockBasis& basis, const BlockMatrix& b, const BlockMatrix& hamiltonian,
                         const BlockMatrix& cap, const Eigen::MatrixXcd& cap_coeffs);

inline BlockMatrix lindblad_rhs(const FockBasis& basis, const BlockMatrix& b, const LindbladOperators& ops) {
  return lindblad_rhs(basis, b, ops.hamiltonian, ops.cap, ops.cap_coeffs);
}

/// psi' = -i (H - i G) psi on one particle-number block.
Eigen::VectorXcd nh_schrodinger_rhs(const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& hamiltonian,
                                    const Eigen::MatrixXcd& cap);

using OracleObserver = std::function<void(double t, const BlockMatrix& b)>;

/// Classical RK4 with fixed step tau from t = 0 to t_final. The last step is
/// shortened when t_final is not a multiple of tau. The observer, if given,
/// sees the initial state and every step. Throws NumericalBlowup.
BlockMatrix oracle_propagate(const FockBasis& basis, BlockMatrix b0, const LindbladOperators& ops,
                             double t_final, double tau, const OracleObserver& observer = {});

/// B_N = |psi><psi| placed in the top block, all lower blocks zero.
BlockMatrix pure_density(const FockBasis& basis, int n, const Eigen::VectorXcd& psi);

/// Block-wise a + s * b.
BlockMatrix axpy(const BlockMatrix& a, std::complex<double> s, const BlockMatrix& b);
bool all_finite(const BlockMatrix& b);

}  // namespace rhomctdh
