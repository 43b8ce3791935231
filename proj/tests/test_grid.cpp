#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rhomctdh/errors.hpp"
#include "rhomctdh/grid.hpp"

using namespace rhomctdh;

TEST_CASE("grid nodes, spacing and wavenumbers") {
  const GridSpec g(20.0, 128);
  CHECK(g.spacing() == doctest::Approx(0.3125));
  CHECK(g.nodes()[0] == -20.0);
  CHECK(g.nodes()[127] == doctest::Approx(20.0 - 0.3125));
  CHECK(g.wavenumbers()[1] == doctest::Approx(std::numbers::pi / 20.0));
  CHECK(g.wavenumbers()[64] == doctest::Approx(-64 * std::numbers::pi / 20.0));
  CHECK_THROWS_AS(GridSpec(0.0, 16), InvalidArgument);
  CHECK_THROWS_AS(make_grid(1.0, 1), InvalidArgument);
}

TEST_CASE("trap and absorber values") {
  const GridSpec g(20.0, 128);
  const RealGridFunction v = eval_trap(g);
  const RealGridFunction gam = eval_cap(g, 16.0);
  for (int i = 0; i < g.size(); ++i) {
    const double x = g.nodes()[i];
    CHECK(v[i] == doctest::Approx(-8.0 * std::exp(-1.25 * x * x)));
    const double expect = std::abs(x) > 16.0 ? (std::abs(x) - 16.0) * (std::abs(x) - 16.0) : 0.0;
    CHECK(gam[i] == doctest::Approx(expect));
  }
  CHECK(v[64] == -8.0);
  CHECK(gam[0] == doctest::Approx(16.0));
  CHECK_THROWS_AS(eval_cap(g, 20.0), InvalidArgument);
  CHECK_THROWS_AS(eval_cap(g, 0.0), InvalidArgument);
}

TEST_CASE("kinetic energy matches the explicit Fourier-sum matrix") {
  const GridSpec g(3.0, 12);
  const Eigen::MatrixXcd t = oracle::kinetic_matrix(g);
  std::mt19937 rng(1);
  const Eigen::MatrixXcd f = oracle::random_matrix(rng, g.size(), 3);
  CHECK((kinetic_apply(g, f) - t * f).cwiseAbs().maxCoeff() < 1e-12);
  const GridFunction col = f.col(0);
  CHECK((kinetic_apply(g, col) - t * col).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kinetic energy on plane waves and constants") {
  const GridSpec g(5.0, 32);
  const double k = 3 * std::numbers::pi / 5.0;
  GridFunction wave(g.size());
  for (int i = 0; i < g.size(); ++i) wave[i] = std::polar(1.0, k * g.nodes()[i]);
  CHECK((kinetic_apply(g, wave) - 0.5 * k * k * wave).cwiseAbs().maxCoeff() < 1e-12);
  const GridFunction one = GridFunction::Ones(g.size());
  CHECK(kinetic_apply(g, one).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kinetic operator is Hermitian in the grid inner product") {
  const GridSpec g(20.0, 128);
  std::mt19937 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const GridFunction f = oracle::random_matrix(rng, g.size(), 1);
    const GridFunction h = oracle::random_matrix(rng, g.size(), 1);
    const cplx lhs = g.inner(f, kinetic_apply(g, h));
    const cplx rhs = g.inner(kinetic_apply(g, f), h);
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("one-body integrals") {
  const GridSpec g(4.0, 16);
  std::mt19937 rng(3);
  const SpfSet spfs = oracle::random_spfs(rng, g, 3);
  CHECK(orthonormality_error(g, spfs) < 1e-12);
  const RealGridFunction v = eval_trap(g);
  const OneBodyCoeffs h = one_body_integrals(g, spfs, OneBodyOperator::hamiltonian(v));
  const Eigen::MatrixXcd dense = oracle::kinetic_matrix(g) + Eigen::MatrixXcd(v.cast<cplx>().asDiagonal());
  const Eigen::MatrixXcd expect = g.spacing() * spfs.functions.adjoint() * dense * spfs.functions;
  CHECK((h.matrix - expect).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((h.matrix - h.matrix.adjoint()).cwiseAbs().maxCoeff() == 0.0);

  const OneBodyCoeffs one = one_body_integrals(g, spfs, OneBodyOperator::local_potential(RealGridFunction::Ones(g.size())));
  CHECK((one.matrix - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(one_body_integrals(g, spfs, OneBodyOperator::cap(v)).label == OneBodyLabel::cap);
}

TEST_CASE("two-body integrals against the direct double loop") {
  const GridSpec g(3.0, 10);
  std::mt19937 rng(4);
  const SpfSet spfs = oracle::random_spfs(rng, g, 3);
  const PairPotential u = PairPotential::smoothed_coulomb(g);
  const Tensor4 w = two_body_integrals(g, spfs, u);
  const auto& phi = spfs.functions;
  double err = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l)
        for (int m = 0; m < 3; ++m) {
          cplx sum = 0.0;
          for (int a = 0; a < g.size(); ++a)
            for (int b = 0; b < g.size(); ++b)
              sum += std::conj(phi(a, j)) * std::conj(phi(b, k)) * u.table(a, b) * phi(a, l) * phi(b, m);
          sum *= g.spacing() * g.spacing();
          err = std::max(err, std::abs(sum - w(j, k, l, m)));
          CHECK(w(j, k, l, m) == w(k, j, m, l));
        }
  CHECK(err < 1e-12);
}

TEST_CASE("two-body integrals of a box function") {
  const GridSpec g(2.0, 8);
  SpfSet box{Eigen::MatrixXcd::Zero(8, 1)};
  for (int a = 2; a < 6; ++a) box.functions(a, 0) = 1.0;
  box.functions /= g.norm(box.functions.col(0));
  const PairPotential u = PairPotential::smoothed_coulomb(g, 2.0, 0.1);
  double sum = 0.0;
  for (int a = 2; a < 6; ++a)
    for (int b = 2; b < 6; ++b) {
      const double d = g.nodes()[a] - g.nodes()[b];
      sum += 2.0 / std::sqrt(d * d + 0.01);
    }
  sum *= std::pow(g.spacing() * std::norm(box.functions(2, 0)), 2);
  CHECK(std::abs(two_body_integrals(g, box, u)(0, 0, 0, 0) - sum) < 1e-12);
}

TEST_CASE("constant pair potential") {
  const GridSpec g(3.0, 12);
  std::mt19937 rng(5);
  const SpfSet spfs = oracle::random_spfs(rng, g, 3);
  const PairPotential c = PairPotential::constant(g, 1.7);
  const Tensor4 w = two_body_integrals(g, spfs, c);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l)
        for (int m = 0; m < 3; ++m)
          CHECK(std::abs(w(j, k, l, m) - 1.7 * double(j == l) * double(k == m)) < 1e-12);
  for (int k = 0; k < 3; ++k)
    for (int m = 0; m < 3; ++m) {
      const GridFunction f = mean_field(g, spfs, k, m, c);
      CHECK((f - GridFunction::Constant(g.size(), 1.7 * double(k == m))).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("mean fields are consistent with two-body integrals") {
  const GridSpec g(4.0, 16);
  std::mt19937 rng(6);
  const SpfSet spfs = oracle::random_spfs(rng, g, 3);
  const PairPotential u = PairPotential::smoothed_coulomb(g);
  const Tensor4 w = two_body_integrals(g, spfs, u);
  const Eigen::MatrixXcd all = mean_fields(g, spfs, u);
  for (int k = 0; k < 3; ++k)
    for (int m = 0; m < 3; ++m) {
      const GridFunction f = mean_field(g, spfs, k, m, u);
      CHECK((f - all.col(k * 3 + m)).cwiseAbs().maxCoeff() < 1e-13);
      CHECK((f.conjugate() - mean_field(g, spfs, m, k, u)).cwiseAbs().maxCoeff() < 1e-13);
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
          const cplx v = g.inner(spfs[j], f.cwiseProduct(spfs[l]));
          CHECK(std::abs(v - w(k, j, m, l)) < 1e-12);
        }
    }
}

TEST_CASE("complement projector") {
  const GridSpec g(4.0, 16);
  std::mt19937 rng(7);
  const SpfSet spfs = oracle::random_spfs(rng, g, 3);
  CHECK(project_complement(g, spfs, GridFunction(spfs[0])).cwiseAbs().maxCoeff() < 1e-12);
  const GridFunction v = oracle::random_matrix(rng, g.size(), 1);
  const GridFunction qv = project_complement(g, spfs, v);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(g.inner(spfs[j], qv)) < 1e-12);
  CHECK((project_complement(g, spfs, qv) - qv).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::MatrixXcd many = oracle::random_matrix(rng, g.size(), 2);
  const Eigen::MatrixXcd qm = project_complement(g, spfs, many);
  CHECK((qm.col(1) - project_complement(g, spfs, GridFunction(many.col(1)))).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("one-body spectrum matches dense diagonalization") {
  const GridSpec g(6.0, 24);
  const RealGridFunction v = eval_trap(g);
  const OneBodySpectrum sp = one_body_spectrum(g, v, 3);
  const Eigen::MatrixXcd dense = oracle::kinetic_matrix(g) + Eigen::MatrixXcd(v.cast<cplx>().asDiagonal());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
  for (int j = 0; j < 3; ++j) CHECK(sp.energies[j] == doctest::Approx(es.eigenvalues()[j]).epsilon(1e-10));
  CHECK(orthonormality_error(g, sp.orbitals) < 1e-12);
  CHECK_THROWS_AS(one_body_spectrum(g, v, 25), InvalidArgument);
}

TEST_CASE("one-body spectrum of the experiment trap") {
  const GridSpec g(20.0, 128);
  const OneBodySpectrum sp = one_body_spectrum(g, eval_trap(g), 5);
  CHECK(sp.energies[0] == doctest::Approx(-5.99995).epsilon(1e-5));
  CHECK(sp.energies[1] == doctest::Approx(-2.54719).epsilon(1e-5));
  CHECK(sp.energies[2] == doctest::Approx(-0.37291).epsilon(1e-4));
  CHECK(sp.energies[3] > 0.0);
}
