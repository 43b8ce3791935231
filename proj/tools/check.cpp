#include "check.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "rhomctdh/propagate.hpp"

using namespace rhomctdh;

namespace {

bool report(const char* name, double value, double tol) {
  const bool ok = value <= tol;
  std::printf("%-4s %-44s %.3e (tol %.0e)\n", ok ? "ok" : "FAIL", name, value, tol);
  return ok;
}

double anticommutator_error(int L, int N, Statistics stats) {
  const FockBasis basis(L, N, stats);
  const double sign = stats == Statistics::fermion ? 1.0 : -1.0;
  double worst = 0.0;
  for (int n = 0; n + 1 <= N; ++n)
    for (int j = 0; j < L; ++j)
      for (int k = 0; k < L; ++k) {
        // on block n: c_j c_k^dag (via n + 1) and c_k^dag c_j (via n - 1)
        const Eigen::MatrixXd a = basis.annihilator(j, n + 1) * Eigen::MatrixXd(basis.annihilator(k, n + 1)).transpose();
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(basis.block_dim(n), basis.block_dim(n));
        if (n > 0) b = Eigen::MatrixXd(basis.annihilator(k, n)).transpose() * basis.annihilator(j, n);
        Eigen::MatrixXd r = a + sign * b;
        if (j == k) r -= Eigen::MatrixXd::Identity(r.rows(), r.cols());
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
      }
  return worst;
}

}  // namespace

bool run_checks(int seed_basis) {
  bool ok = true;
  double fermion = 0.0, boson = 0.0;
  for (int L = 1; L <= 4; ++L)
    for (int N = 0; N <= L; ++N) {
      if (N < L) fermion = std::max(fermion, anticommutator_error(L, N, Statistics::fermion));
      boson = std::max(boson, anticommutator_error(L, N, Statistics::boson));
    }
  ok &= report("fermion anticommutators, L <= 4", fermion, 0.0);
  ok &= report("boson commutators, L <= 4", boson, 1e-12);

  // Complete SPF set on a small grid: the variational flow must reproduce the
  // fixed-basis Lindblad flow in the grid-point basis.
  const int L = seed_basis;
  const int N = std::min(2, L);
  GridSpec grid = make_grid(4.0, L);
  Model model(grid, eval_trap(grid), eval_cap(grid, 2.0), PairPotential::smoothed_coulomb(grid));
  auto basis = std::make_shared<const FockBasis>(L, N, Statistics::fermion);
  McSystem sys{model, basis};

  std::mt19937 rng(7);
  std::normal_distribution<double> gauss;
  McState state;
  state.spfs = one_body_spectrum(grid, model.potential, L).orbitals;
  state.b = basis->zero_blocks();
  for (int n = 0; n <= N; ++n) {
    Eigen::MatrixXcd a(basis->block_dim(n), basis->block_dim(n));
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = {gauss(rng), gauss(rng)};
    state.b[n] = a * a.adjoint();
  }
  const double tr = block_trace(state.b).real();
  for (auto& m : state.b) m /= tr;

  SpfSet delta{Eigen::MatrixXcd::Identity(L, L) / std::sqrt(grid.spacing())};
  const Integrals fixed = compute_integrals(model, delta, true);
  const LindbladOperators ops = galerkin_operators(*basis, fixed);
  auto to_grid = [&](const McState& s) {
    return congruence(basis_transform(*basis, *basis, std::sqrt(grid.spacing()) * s.spfs.functions), s.b);
  };

  const double tau = 1e-3, t_final = 0.2;
  const BlockMatrix oracle = oracle_propagate(*basis, to_grid(state), ops, t_final, tau);
  double worst_trace = 0.0, worst_herm = 0.0;
  for (int s = 0; s < static_cast<int>(std::lround(t_final / tau)); ++s) {
    state = split_step(sys, state, tau);
    worst_trace = std::max(worst_trace, std::abs(block_trace(state.b).real() - 1.0));
    worst_herm = std::max(worst_herm, hermiticity_residual(state.b));
  }
  ok &= report("complete-basis flow vs fixed-basis oracle", max_abs_difference(to_grid(state), oracle), 1e-6);
  ok &= report("trace drift", worst_trace, 1e-10);
  ok &= report("Hermiticity residual", worst_herm, 1e-12);
  ok &= report("SPF orthonormality", orthonormality_error(grid, state.spfs), 1e-10);
  std::printf("%s\n", ok ? "all checks passed" : "some checks failed");
  return ok;
}
