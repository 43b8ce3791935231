#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rhomctdh/errors.hpp"
#include "rhomctdh/fock.hpp"

using namespace rhomctdh;

namespace {

FockState fermions(std::vector<int> occ) { return {Statistics::fermion, std::move(occ)}; }
FockState bosons(std::vector<int> occ) { return {Statistics::boson, std::move(occ)}; }

Eigen::MatrixXcd dense(const FockBasis::SparseMap& m) { return Eigen::MatrixXd(m).cast<cplx>(); }

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("basis dimensions") {
  CHECK(enumerate_basis(5, 3, Statistics::fermion).total_dim() == 26);
  CHECK(enumerate_basis(2, 2, Statistics::boson).total_dim() == 6);
  for (int L = 1; L <= 6; ++L)
    for (int N = 0; N <= L; ++N) {
      const FockBasis f(L, N, Statistics::fermion);
      const FockBasis b(L, N, Statistics::boson);
      for (int n = 0; n <= N; ++n) {
        CHECK(f.block_dim(n) == binomial(L, n));
        CHECK(b.block_dim(n) == binomial(L + n - 1, n));
      }
    }
  const FockBasis one(1, 1, Statistics::fermion);
  CHECK(one.state(0, 0) == fermions({0}));
  CHECK(one.state(1, 0) == fermions({1}));
  CHECK_THROWS_AS(enumerate_basis(2, 3, Statistics::fermion), InvalidArgument);
  CHECK_THROWS_AS(enumerate_basis(0, 0, Statistics::boson), InvalidArgument);
  CHECK_THROWS_AS(enumerate_basis(2, -1, Statistics::boson), InvalidArgument);
}

TEST_CASE("basis ordering and lookup") {
  const FockBasis f(4, 2, Statistics::fermion);
  for (int n = 0; n <= 2; ++n)
    for (int i = 0; i < f.block_dim(n); ++i) {
      CHECK(f.state(n, i).particle_count() == n);
      CHECK(f.index_of(f.state(n, i)) == i);
      if (i > 0) {
        auto code = [](const FockState& s) {
          int c = 0;
          for (std::size_t j = 0; j < s.occupations.size(); ++j) c |= s.occupations[j] << j;
          return c;
        };
        CHECK(code(f.state(n, i - 1)) < code(f.state(n, i)));
      }
    }
  const FockBasis b(3, 2, Statistics::boson);
  for (int i = 1; i < b.block_dim(2); ++i) CHECK(b.state(2, i - 1).occupations > b.state(2, i).occupations);
  CHECK(b.state(2, 0) == bosons({2, 0, 0}));
  CHECK_FALSE(f.index_of(fermions({1, 1, 1, 0})).has_value());
}

TEST_CASE("single annihilator and creator actions") {
  auto a = annihilate(fermions({1, 1}), 0);
  REQUIRE(a);
  CHECK(a->amplitude == 1.0);
  CHECK(a->state == fermions({0, 1}));
  a = annihilate(fermions({1, 1}), 1);
  REQUIRE(a);
  CHECK(a->amplitude == -1.0);
  CHECK(a->state == fermions({1, 0}));
  CHECK_FALSE(annihilate(fermions({0, 1}), 0));

  auto c = create(fermions({1, 0}), 1, 2);
  REQUIRE(c);
  CHECK(c->amplitude == -1.0);
  CHECK(c->state == fermions({1, 1}));
  CHECK_FALSE(create(fermions({1, 0}), 0, 2));

  auto b = annihilate(bosons({2}), 0);
  REQUIRE(b);
  CHECK(b->amplitude == doctest::Approx(std::sqrt(2.0)));
  CHECK(b->state == bosons({1}));
  CHECK_FALSE(annihilate(bosons({0, 3}), 0));
  CHECK_FALSE(create(bosons({3}), 0, 3));
  auto bc = create(bosons({1, 1}), 0, 3);
  REQUIRE(bc);
  CHECK(bc->amplitude == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("annihilator matrices") {
  const FockBasis one(1, 1, Statistics::fermion);
  const auto c = annihilator_matrix(one, 0);
  CHECK(dense(c[1]).isApprox(Eigen::MatrixXcd::Ones(1, 1)));
  const oracle::DenseFock full(one);
  Eigen::MatrixXcd expect(2, 2);
  expect << 0, 1, 0, 0;
  CHECK(full.c[0] == expect);

  for (int L = 1; L <= 4; ++L)
    for (int N = 0; N <= L; ++N)
      for (auto stat : {Statistics::fermion, Statistics::boson}) {
        const FockBasis basis(L, N, stat);
        const oracle::DenseFock ref(basis);
        for (int j = 0; j < L; ++j) {
          for (int n = 1; n <= N; ++n) {
            const Eigen::MatrixXcd m = dense(basis.annihilator(j, n));
            CHECK(m == ref.c[j].block(basis.offset(n - 1), basis.offset(n), basis.block_dim(n - 1),
                                      basis.block_dim(n)));
            CHECK(Eigen::MatrixXcd(basis.annihilator_complex(j, n)) == m);
            if (stat == Statistics::fermion)
              for (int col = 0; col < m.cols(); ++col) {
                int nonzero = 0;
                for (int row = 0; row < m.rows(); ++row)
                  if (m(row, col) != 0.0) {
                    ++nonzero;
                    CHECK(std::abs(m(row, col)) == 1.0);
                  }
                CHECK(nonzero <= 1);
              }
          }
        }
      }
}

TEST_CASE("canonical anticommutators and commutators below the cap") {
  for (int L = 1; L <= 4; ++L)
    for (int N = 1; N <= L; ++N)
      for (auto stat : {Statistics::fermion, Statistics::boson}) {
        const FockBasis basis(L, N, stat);
        const oracle::DenseFock ref(basis);
        const int below = basis.offset(N);  // blocks 0..N-1
        const double sign = stat == Statistics::fermion ? 1.0 : -1.0;
        for (int j = 0; j < L; ++j)
          for (int k = 0; k < L; ++k) {
            const Eigen::MatrixXcd anti = ref.c[j] * ref.cd(k) + sign * ref.cd(k) * ref.c[j];
            const Eigen::MatrixXcd expect = double(j == k) * Eigen::MatrixXcd::Identity(below, below);
            const double err = (anti.topLeftCorner(below, below) - expect).cwiseAbs().maxCoeff();
            if (stat == Statistics::fermion) CHECK(err == 0.0);
            else CHECK(err < 1e-12);
          }
      }
}

TEST_CASE("one-body Galerkin matrices") {
  const FockBasis single(2, 1, Statistics::fermion);
  std::mt19937 rng(10);
  const Eigen::MatrixXcd m2 = oracle::random_hermitian(rng, 2);
  const BlockMatrix g1 = galerkin_one_body(single, m2);
  CHECK(g1[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK((g1[1] - m2).cwiseAbs().maxCoeff() < 1e-15);

  const FockBasis basis(4, 3, Statistics::fermion);
  const BlockMatrix number = galerkin_one_body(basis, Eigen::MatrixXcd::Identity(4, 4));
  for (int n = 0; n <= 3; ++n)
    CHECK((number[n] - double(n) * Eigen::MatrixXcd::Identity(basis.block_dim(n), basis.block_dim(n)))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  CHECK_THROWS_AS(galerkin_one_body(basis, Eigen::MatrixXcd::Identity(3, 3)), InvalidArgument);

  for (auto stat : {Statistics::fermion, Statistics::boson})
    for (int L = 1; L <= 4; ++L)
      for (int N = 0; N <= L; ++N) {
        const FockBasis b(L, N, stat);
        const oracle::DenseFock ref(b);
        const Eigen::MatrixXcd m = oracle::random_matrix(rng, L, L);
        const BlockMatrix g = galerkin_one_body(b, m);
        const Eigen::MatrixXcd full = ref.one_body(m);
        CHECK(max_abs_difference(g, ref.split(full)) < 1e-12);
        CHECK((ref.assemble(g) - full).cwiseAbs().maxCoeff() < 1e-12);
      }
}

TEST_CASE("two-body Galerkin matrices") {
  std::mt19937 rng(11);
  const FockBasis pair(2, 2, Statistics::fermion);
  const Tensor4 u2 = oracle::random_two_body(rng, 2);
  const BlockMatrix g2 = galerkin_two_body(pair, u2);
  CHECK(std::abs(g2[2](0, 0) - (u2(0, 1, 0, 1) - u2(0, 1, 1, 0))) < 1e-14);
  CHECK(g2[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(g2[1].cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(galerkin_two_body(pair, Tensor4(3)), InvalidArgument);

  for (auto stat : {Statistics::fermion, Statistics::boson})
    for (int L = 1; L <= 4; ++L)
      for (int N = 0; N <= L; ++N) {
        const FockBasis b(L, N, stat);
        const oracle::DenseFock ref(b);
        const Tensor4 u = oracle::random_two_body(rng, L);
        const BlockMatrix g = galerkin_two_body(b, u);
        CHECK(max_abs_difference(g, ref.split(ref.two_body(u))) < 1e-12);
        CHECK(hermiticity_residual(g) < 1e-12);
      }
}

TEST_CASE("basis transforms") {
  std::mt19937 rng(12);
  for (auto stat : {Statistics::fermion, Statistics::boson}) {
    const FockBasis b(3, 2, stat);
    const oracle::DenseFock ref(b);
    const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(3, 3);
    const BlockMatrix t_id = basis_transform(b, b, identity);
    for (int n = 0; n <= 2; ++n) CHECK(t_id[n].isApprox(Eigen::MatrixXcd::Identity(b.block_dim(n), b.block_dim(n))));

    // unitary G: c^dagger(phi_j) = sum_k G_kj c_k^dagger, so T maps one-body
    // operators as T (sum M c^dag c) T^dag = sum (G M G^dag) c^dag c
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(oracle::random_matrix(rng, 3, 3));
    const Eigen::MatrixXcd g = qr.householderQ();
    const BlockMatrix t = basis_transform(b, b, g);
    const Eigen::MatrixXcd m = oracle::random_hermitian(rng, 3);
    const BlockMatrix lhs = congruence(t, galerkin_one_body(b, m));
    const BlockMatrix rhs = galerkin_one_body(b, g * m * g.adjoint());
    CHECK(max_abs_difference(lhs, rhs) < 1e-12);
    for (int n = 0; n <= 2; ++n)
      CHECK((t[n].adjoint() * t[n]).isApprox(Eigen::MatrixXcd::Identity(b.block_dim(n), b.block_dim(n)), 1e-12));
  }
  const FockBasis small(2, 2, Statistics::fermion);
  const FockBasis big(3, 2, Statistics::fermion);
  Eigen::MatrixXcd embed = Eigen::MatrixXcd::Zero(3, 2);
  embed(0, 0) = embed(1, 1) = 1.0;
  const BlockMatrix t = basis_transform(small, big, embed);
  CHECK(t[2].rows() == 3);
  CHECK(t[2].cols() == 1);
  CHECK(std::abs(t[2](0, 0) - 1.0) < 1e-15);
  CHECK_THROWS_AS(basis_transform(big, FockBasis(2, 1, Statistics::fermion), embed.transpose()), InvalidArgument);
  CHECK_THROWS_AS(basis_transform(small, big, embed.transpose()), InvalidArgument);
}

TEST_CASE("block algebra helpers") {
  BlockMatrix a{Eigen::MatrixXcd::Identity(1, 1), Eigen::MatrixXcd::Identity(2, 2)};
  CHECK(block_trace(a) == cplx(3.0));
  CHECK(hermiticity_residual(a) == 0.0);
  BlockMatrix b = a;
  b[1](0, 1) = cplx(0, 1);
  CHECK(hermiticity_residual(b) == 1.0);
  CHECK(max_abs_difference(a, b) == 1.0);
  CHECK_THROWS_AS(max_abs_difference(a, BlockMatrix{a[0]}), InvalidArgument);
}
