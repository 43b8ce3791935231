#include "rhomctdh/mctdh.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "rhomctdh/errors.hpp"

namespace rhomctdh {

namespace {

const cplx kI{0.0, 1.0};

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

Eigen::MatrixXcd block_power(const Eigen::MatrixXcd& b, int power) {
  if (power == 1) return b;
  if (power == 2) return b * b;
  throw InvalidArgument("reduced density power must be 1 or 2");
}

void check_state(const FockBasis& basis, const SpfSet& spfs) {
  if (spfs.count() != basis.modes()) throw InvalidArgument("SPF count does not match the Fock basis");
}

}  // namespace

Eigen::MatrixXcd reduced_one_body(const FockBasis& basis, const BlockMatrix& b, int power) {
  const int L = basis.modes();
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(L, L);
  for (int n = 1; n < basis.block_count(); ++n) {
    const Eigen::MatrixXcd x = block_power(b.at(n), power);
    for (const auto& t : basis.one_body_terms(n)) s(t.j, t.k) += t.amplitude * x(t.col, t.row);
  }
  return hermitian_part(s);
}

Tensor4 reduced_two_body(const FockBasis& basis, const BlockMatrix& b, int power) {
  const int L = basis.modes();
  Tensor4 raw(L);
  for (int n = 2; n < basis.block_count(); ++n) {
    const Eigen::MatrixXcd x = block_power(b.at(n), power);
    for (const auto& t : basis.two_body_terms(n)) raw(t.j, t.k, t.l, t.m) += t.amplitude * x(t.col, t.row);
  }
  Tensor4 out(L);
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < L; ++k)
      for (int l = 0; l < L; ++l)
        for (int m = 0; m < L; ++m) out(j, k, l, m) = 0.5 * (raw(j, k, l, m) + raw(k, j, m, l));
  return out;
}

ReducedDensities reduced_densities(const FockBasis& basis, const BlockMatrix& b, int power) {
  return {reduced_one_body(basis, b, power), reduced_two_body(basis, b, power)};
}

Integrals compute_integrals(const Model& model, const SpfSet& spfs, bool include_kinetic, bool include_cap) {
  const GridSpec& grid = model.grid;
  const int L = spfs.count();
  const double dx = grid.spacing();
  Integrals ints;
  ints.include_kinetic = include_kinetic;
  ints.include_cap = include_cap && model.absorbing;
  ints.interacting = model.interacting;

  const OneBodyOperator hop = include_kinetic ? OneBodyOperator::hamiltonian(model.potential)
                                              : OneBodyOperator::local_potential(model.potential);
  ints.h_phi = apply_one_body(grid, hop, spfs.functions);
  ints.h = {hermitian_part(dx * (spfs.functions.adjoint() * ints.h_phi)), OneBodyLabel::hamiltonian};

  if (ints.include_cap) {
    const Eigen::MatrixXcd g_phi = model.cap.cast<cplx>().asDiagonal() * spfs.functions;
    ints.gamma = {hermitian_part(dx * (spfs.functions.adjoint() * g_phi)), OneBodyLabel::cap};
    ints.h_phi -= kI * g_phi;
  } else {
    ints.gamma = {Eigen::MatrixXcd::Zero(L, L), OneBodyLabel::cap};
  }

  if (ints.interacting) {
    ints.fields = mean_fields(grid, spfs, model.pair);
    ints.u = two_body_from_mean_fields(grid, spfs, ints.fields);
  } else {
    ints.u = TwoBodyCoeffs(L);
  }
  return ints;
}

LindbladOperators galerkin_operators(const FockBasis& basis, const Integrals& ints) {
  LindbladOperators ops;
  ops.hamiltonian = galerkin_one_body(basis, ints.h.matrix);
  if (ints.interacting) {
    const BlockMatrix h2 = galerkin_two_body(basis, ints.u);
    for (int n = 2; n < basis.block_count(); ++n) ops.hamiltonian[n] += h2[n];
  }
  ops.cap = galerkin_one_body(basis, ints.gamma.matrix);
  ops.cap_coeffs = ints.gamma.matrix;
  return ops;
}

BlockMatrix b_rhs(const FockBasis& basis, const BlockMatrix& b, const Integrals& ints) {
  const int L = basis.modes();
  if (ints.h.matrix.rows() != L || ints.gamma.matrix.rows() != L || ints.u.modes() != L)
    throw InvalidArgument("integrals do not match the Fock basis");
  return lindblad_rhs(basis, b, galerkin_operators(basis, ints));
}

RegularizedSolve regularized_solve(const Eigen::MatrixXcd& s, const Eigen::MatrixXcd& rhs, double eps) {
  if (s.rows() != s.cols() || s.rows() != rhs.rows()) throw InvalidArgument("regularized solve: shape mismatch");
  if (!(eps > 0.0)) throw InvalidArgument("regularization parameter must be positive");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s);
  const Eigen::VectorXd& sigma = es.eigenvalues();
  const Eigen::VectorXd inv = sigma.unaryExpr([eps](double v) { return 1.0 / (v + eps * std::exp(-v / eps)); });
  RegularizedSolve out;
  out.solution = es.eigenvectors() * (inv.cast<cplx>().asDiagonal() * (es.eigenvectors().adjoint() * rhs));
  out.sigma_min = sigma.size() > 0 ? sigma[0] : 0.0;
  out.regularized = out.sigma_min < 100.0 * eps;
  return out;
}

double min_eig_S(const Eigen::MatrixXcd& s) {
  if (s.size() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(s, Eigen::EigenvaluesOnly).eigenvalues()[0];
}

SpfDerivative spf_rhs(const GridSpec& grid, const SpfSet& spfs, const ReducedDensities& dens,
                      const Integrals& ints, double eps, TimeMode mode) {
  const int L = spfs.count();
  const Eigen::Index npts = spfs.functions.rows();
  if (dens.one.rows() != L || ints.h_phi.cols() != L) throw InvalidArgument("SPF right-hand side: stale inputs");

  // R_j = sum_k (h - i Gamma) phi_k S_jk + sum_klm U_km phi_l S2_jklm
  Eigen::MatrixXcd r = ints.h_phi * dens.one.transpose();
  if (ints.interacting && ints.fields.cols() == L * L) {
    const int L3 = L * L * L;
    Eigen::MatrixXcd y(npts, L3);
    Eigen::MatrixXcd m(L3, L);
    for (int k = 0; k < L; ++k)
      for (int mm = 0; mm < L; ++mm)
        for (int l = 0; l < L; ++l) {
          const int col = (k * L + mm) * L + l;
          y.col(col) = ints.fields.col(k * L + mm).cwiseProduct(spfs.functions.col(l));
          for (int j = 0; j < L; ++j) m(col, j) = dens.two(j, k, l, mm);
        }
    r.noalias() += y * m;
  }

  const RegularizedSolve sol = regularized_solve(dens.one, r.transpose(), eps);
  const cplx factor = mode == TimeMode::real ? -kI : cplx{-1.0, 0.0};
  SpfDerivative out;
  out.derivative = project_complement(grid, spfs, Eigen::MatrixXcd(factor * sol.solution.transpose()));
  out.sigma_min = sol.sigma_min;
  out.regularized = sol.regularized;
  return out;
}

McDerivative mc_rhs(const McSystem& sys, const McState& state, bool include_kinetic, double eps) {
  check_state(*sys.basis, state.spfs);
  const Integrals ints = compute_integrals(sys.model, state.spfs, include_kinetic);
  const ReducedDensities dens = reduced_densities(*sys.basis, state.b, 2);
  SpfDerivative spf = spf_rhs(sys.grid(), state.spfs, dens, ints, eps, TimeMode::real);
  McDerivative out;
  out.spfs = std::move(spf.derivative);
  out.b = b_rhs(*sys.basis, state.b, ints);
  out.sigma_min = spf.sigma_min;
  out.regularized = spf.regularized;
  return out;
}

double energy(const McSystem& sys, const McState& state) {
  check_state(*sys.basis, state.spfs);
  const Integrals ints = compute_integrals(sys.model, state.spfs, true, false);
  const LindbladOperators ops = galerkin_operators(*sys.basis, ints);
  cplx e{};
  for (int n = 0; n < sys.basis->block_count(); ++n) e += (ops.hamiltonian[n] * state.b.at(n)).trace();
  if (std::abs(e.imag()) > 1e-8) throw ConsistencyError("energy has an imaginary part of " + std::to_string(e.imag()));
  return e.real();
}

Eigen::VectorXd block_probabilities(const BlockMatrix& b) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(b.size()));
  for (std::size_t n = 0; n < b.size(); ++n) p[static_cast<Eigen::Index>(n)] = b[n].trace().real();
  return p;
}

RealGridFunction density(const FockBasis& basis, const McState& state) {
  check_state(basis, state.spfs);
  const Eigen::MatrixXcd d = reduced_one_body(basis, state.b, 1);
  const Eigen::MatrixXcd& phi = state.spfs.functions;
  return phi.conjugate().cwiseProduct(phi * d.transpose()).rowwise().sum().real();
}

McState to_density_state(const FockBasis& basis, const PureMcState& state) {
  return {state.spfs, pure_density(basis, state.particles, state.coeffs), state.t};
}

PureDerivative pure_rhs(const McSystem& sys, const PureMcState& state, bool include_kinetic, TimeMode mode,
                        double eps) {
  const FockBasis& basis = *sys.basis;
  check_state(basis, state.spfs);
  const int n = state.particles;
  const bool with_cap = mode == TimeMode::real;
  const Integrals ints = compute_integrals(sys.model, state.spfs, include_kinetic, with_cap);
  const LindbladOperators ops = galerkin_operators(basis, ints);
  const Eigen::MatrixXcd& h = ops.hamiltonian.at(n);
  const Eigen::VectorXcd hc = h * state.coeffs;

  PureDerivative out;
  if (mode == TimeMode::real) {
    out.coeffs = -kI * hc - ops.cap.at(n) * state.coeffs;
  } else {
    const double e = state.coeffs.dot(hc).real() / state.coeffs.squaredNorm();
    out.coeffs = -(hc - e * state.coeffs);
  }

  const BlockMatrix b = pure_density(basis, n, state.coeffs);
  const ReducedDensities dens = reduced_densities(basis, b, 1);
  SpfDerivative spf = spf_rhs(sys.grid(), state.spfs, dens, ints, eps, mode);
  out.spfs = std::move(spf.derivative);
  out.sigma_min = spf.sigma_min;
  out.regularized = spf.regularized;
  return out;
}

double pure_energy(const McSystem& sys, const PureMcState& state) {
  check_state(*sys.basis, state.spfs);
  const Integrals ints = compute_integrals(sys.model, state.spfs, true, false);
  const LindbladOperators ops = galerkin_operators(*sys.basis, ints);
  const Eigen::VectorXcd& c = state.coeffs;
  return c.dot(ops.hamiltonian.at(state.particles) * c).real() / c.squaredNorm();
}

}  // namespace rhomctdh
