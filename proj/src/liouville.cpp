#include "rhomctdh/liouville.hpp"

#include <cmath>

#include "rhomctdh/errors.hpp"

namespace rhomctdh {

namespace {

void check_blocks(const FockBasis& basis, const BlockMatrix& m, const char* what) {
  if (static_cast<int>(m.size()) != basis.block_count())
    throw InvalidArgument(std::string(what) + ": block count does not match the basis");
  for (int n = 0; n < basis.block_count(); ++n)
    if (m[n].rows() != basis.block_dim(n) || m[n].cols() != basis.block_dim(n))
      throw InvalidArgument(std::string(what) + ": block shape does not match the basis");
}

}  // namespace

BlockMatrix lindblad_rhs(const FockBasis& basis, const BlockMatrix& b, const BlockMatrix& hamiltonian,
                         const BlockMatrix& cap, const Eigen::MatrixXcd& cap_coeffs) {
  check_blocks(basis, b, "density");
  check_blocks(basis, hamiltonian, "hamiltonian");
  check_blocks(basis, cap, "cap");
  const int L = basis.modes();
  if (cap_coeffs.rows() != L || cap_coeffs.cols() != L)
    throw InvalidArgument("cap coefficients do not match the basis");

  const std::complex<double> minus_i{0.0, -1.0};
  const bool absorbing = cap_coeffs.cwiseAbs().maxCoeff() > 0.0;
  BlockMatrix out(b.size());
  for (int n = 0; n < basis.block_count(); ++n) {
    const Eigen::MatrixXcd hb = hamiltonian[n] * b[n];
    out[n] = minus_i * (hb - hb.adjoint());
    if (!absorbing) continue;
    const Eigen::MatrixXcd gb = cap[n] * b[n];
    out[n] -= gb + gb.adjoint();
    if (n + 1 >= basis.block_count()) continue;
    // 2 sum_j X_j c_j^dagger with X_j = sum_k Gamma_jk c_k B_{n+1}
    std::vector<Eigen::MatrixXcd> cb(L);
    for (int k = 0; k < L; ++k) cb[k] = basis.annihilator_complex(k, n + 1) * b[n + 1];
    for (int j = 0; j < L; ++j) {
      Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(basis.block_dim(n), basis.block_dim(n + 1));
      for (int k = 0; k < L; ++k)
        if (cap_coeffs(j, k) != 0.0) x += cap_coeffs(j, k) * cb[k];
      out[n] += 2.0 * (x * basis.annihilator_complex(j, n + 1).adjoint());
    }
  }
  return out;
}

Eigen::VectorXcd nh_schrodinger_rhs(const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& hamiltonian,
                                    const Eigen::MatrixXcd& cap) {
  if (hamiltonian.rows() != psi.size() || cap.rows() != psi.size())
    throw InvalidArgument("operator block does not match the state");
  const std::complex<double> minus_i{0.0, -1.0};
  return minus_i * (hamiltonian * psi) - cap * psi;
}

BlockMatrix axpy(const BlockMatrix& a, std::complex<double> s, const BlockMatrix& b) {
  BlockMatrix out(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) out[n] = a[n] + s * b[n];
  return out;
}

bool all_finite(const BlockMatrix& b) {
  for (const auto& m : b)
    if (!m.allFinite()) return false;
  return true;
}

BlockMatrix oracle_propagate(const FockBasis& basis, BlockMatrix b0, const LindbladOperators& ops,
                             double t_final, double tau, const OracleObserver& observer) {
  if (!(tau > 0.0)) throw InvalidArgument("time step must be positive");
  if (t_final < 0.0) throw InvalidArgument("final time must be non-negative");
  BlockMatrix b = std::move(b0);
  auto rhs = [&](const BlockMatrix& x) { return lindblad_rhs(basis, x, ops); };
  const long steps = static_cast<long>(std::ceil(t_final / tau - 1e-9));
  if (observer) observer(0.0, b);
  for (long s = 0; s < steps; ++s) {
    const double t0 = s * tau;
    const double h = std::min(tau, t_final - t0);
    const BlockMatrix k1 = rhs(b);
    const BlockMatrix k2 = rhs(axpy(b, 0.5 * h, k1));
    const BlockMatrix k3 = rhs(axpy(b, 0.5 * h, k2));
    const BlockMatrix k4 = rhs(axpy(b, h, k3));
    for (std::size_t n = 0; n < b.size(); ++n) b[n] += (h / 6.0) * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
    if (!all_finite(b)) throw NumericalBlowup("non-finite density matrix in oracle propagation", t0 + h);
    if (observer) observer(t0 + h, b);
  }
  return b;
}

BlockMatrix pure_density(const FockBasis& basis, int n, const Eigen::VectorXcd& psi) {
  if (n < 0 || n >= basis.block_count() || psi.size() != basis.block_dim(n))
    throw InvalidArgument("pure state does not fit the requested block");
  BlockMatrix b = basis.zero_blocks();
  b[n] = psi * psi.adjoint();
  return b;
}

}  // namespace rhomctdh
