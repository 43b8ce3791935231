#pragma once

// Brute-force reference constructions for the tests. Operators are built as
// dense matrices on the whole truncated Fock space directly from occupation
// vectors, without going through the library's annihilator tables.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "rhomctdh/fock.hpp"
#include "rhomctdh/grid.hpp"

namespace oracle {

using Eigen::MatrixXcd;
using rhomctdh::cplx;

inline int global_index(const rhomctdh::FockBasis& basis, int n, int i) { return basis.offset(n) + i; }

/// Dense c_j on the full truncated space, in the library's state order.
inline MatrixXcd dense_annihilator(const rhomctdh::FockBasis& basis, int j) {
  const int dim = basis.total_dim();
  MatrixXcd c = MatrixXcd::Zero(dim, dim);
  for (int n = 1; n <= basis.max_particles(); ++n)
    for (int col = 0; col < basis.block_dim(n); ++col) {
      std::vector<int> occ = basis.state(n, col).occupations;
      if (occ[j] == 0) continue;
      double amp;
      if (basis.statistics() == rhomctdh::Statistics::fermion) {
        int parity = 0;
        for (int i = 0; i < j; ++i) parity ^= occ[i];
        amp = parity ? -1.0 : 1.0;
      } else {
        amp = std::sqrt(double(occ[j]));
      }
      occ[j] -= 1;
      for (int row = 0; row < basis.block_dim(n - 1); ++row)
        if (basis.state(n - 1, row).occupations == occ)
          c(global_index(basis, n - 1, row), global_index(basis, n, col)) = amp;
    }
  return c;
}

struct DenseFock {
  const rhomctdh::FockBasis* basis;
  std::vector<MatrixXcd> c;

  explicit DenseFock(const rhomctdh::FockBasis& b) : basis(&b) {
    for (int j = 0; j < b.modes(); ++j) c.push_back(dense_annihilator(b, j));
  }
  int dim() const { return basis->total_dim(); }
  MatrixXcd cd(int j) const { return c[j].adjoint(); }

  MatrixXcd one_body(const MatrixXcd& m) const {
    MatrixXcd out = MatrixXcd::Zero(dim(), dim());
    for (int j = 0; j < basis->modes(); ++j)
      for (int k = 0; k < basis->modes(); ++k) out += m(j, k) * cd(j) * c[k];
    return out;
  }

  MatrixXcd two_body(const rhomctdh::Tensor4& u) const {
    const int L = basis->modes();
    MatrixXcd out = MatrixXcd::Zero(dim(), dim());
    for (int j = 0; j < L; ++j)
      for (int k = 0; k < L; ++k)
        for (int l = 0; l < L; ++l)
          for (int m = 0; m < L; ++m) out += 0.5 * u(j, k, l, m) * cd(j) * cd(k) * c[m] * c[l];
    return out;
  }

  MatrixXcd assemble(const rhomctdh::BlockMatrix& b) const {
    MatrixXcd out = MatrixXcd::Zero(dim(), dim());
    for (int n = 0; n < basis->block_count(); ++n)
      out.block(basis->offset(n), basis->offset(n), basis->block_dim(n), basis->block_dim(n)) = b[n];
    return out;
  }

  MatrixXcd block(const MatrixXcd& full, int n) const {
    return full.block(basis->offset(n), basis->offset(n), basis->block_dim(n), basis->block_dim(n));
  }

  rhomctdh::BlockMatrix split(const MatrixXcd& full) const {
    rhomctdh::BlockMatrix out;
    for (int n = 0; n < basis->block_count(); ++n) out.push_back(block(full, n));
    return out;
  }

  /// Lindblad derivative with dense operators; truncation is implicit because
  /// the dense c_j never leave the space.
  MatrixXcd lindblad(const MatrixXcd& rho, const MatrixXcd& h, const MatrixXcd& gamma) const {
    const cplx i{0, 1};
    const MatrixXcd g = one_body(gamma);
    MatrixXcd out = -i * (h * rho - rho * h) - (g * rho + rho * g);
    for (int j = 0; j < basis->modes(); ++j)
      for (int k = 0; k < basis->modes(); ++k) out += 2.0 * gamma(j, k) * c[k] * rho * cd(j);
    return out;
  }

  MatrixXcd reduced_one(const MatrixXcd& op) const {
    const int L = basis->modes();
    MatrixXcd s(L, L);
    for (int j = 0; j < L; ++j)
      for (int k = 0; k < L; ++k) s(j, k) = (cd(j) * c[k] * op).trace();
    return s;
  }

  rhomctdh::Tensor4 reduced_two(const MatrixXcd& op) const {
    const int L = basis->modes();
    rhomctdh::Tensor4 s(L);
    for (int j = 0; j < L; ++j)
      for (int k = 0; k < L; ++k)
        for (int l = 0; l < L; ++l)
          for (int m = 0; m < L; ++m) s(j, k, l, m) = (cd(j) * cd(k) * c[m] * c[l] * op).trace();
    return s;
  }
};

inline MatrixXcd random_matrix(std::mt19937& rng, int rows, int cols) {
  std::normal_distribution<double> d;
  MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = cplx(d(rng), d(rng));
  return m;
}

inline MatrixXcd random_hermitian(std::mt19937& rng, int n) {
  const MatrixXcd a = random_matrix(rng, n, n);
  return 0.5 * (a + a.adjoint());
}

/// Random positive semidefinite blocks with unit total trace.
inline rhomctdh::BlockMatrix random_density(std::mt19937& rng, const rhomctdh::FockBasis& basis) {
  rhomctdh::BlockMatrix b;
  double tr = 0.0;
  for (int n = 0; n < basis.block_count(); ++n) {
    const MatrixXcd a = random_matrix(rng, basis.block_dim(n), basis.block_dim(n));
    b.push_back(a * a.adjoint());
    tr += b.back().trace().real();
  }
  for (auto& m : b) m /= tr;
  return b;
}

/// Random two-body coefficients with the symmetries of a real pair potential:
/// u_jklm = u_kjml and conj(u_jklm) = u_lmjk.
inline rhomctdh::Tensor4 random_two_body(std::mt19937& rng, int L) {
  const rhomctdh::Tensor4 a = [&] {
    rhomctdh::Tensor4 t(L);
    std::normal_distribution<double> d;
    for (auto& v : t.data()) v = cplx(d(rng), d(rng));
    return t;
  }();
  rhomctdh::Tensor4 u(L);
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < L; ++k)
      for (int l = 0; l < L; ++l)
        for (int m = 0; m < L; ++m)
          u(j, k, l, m) = 0.25 * (a(j, k, l, m) + a(k, j, m, l) + std::conj(a(l, m, j, k)) +
                                  std::conj(a(m, l, k, j)));
  return u;
}

/// L orthonormal grid functions (dx-weighted) from a QR of random columns.
inline rhomctdh::SpfSet random_spfs(std::mt19937& rng, const rhomctdh::GridSpec& grid, int L) {
  const MatrixXcd a = random_matrix(rng, grid.size(), L);
  Eigen::HouseholderQR<MatrixXcd> qr(a);
  const MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(grid.size(), L);
  return {q / std::sqrt(grid.spacing())};
}

/// Periodic spectral kinetic matrix by explicit Fourier sums.
inline MatrixXcd kinetic_matrix(const rhomctdh::GridSpec& grid) {
  const int n = grid.size();
  const double two_pi = 2.0 * std::acos(-1.0);
  MatrixXcd t = MatrixXcd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      cplx sum = 0.0;
      for (int q = 0; q < n; ++q) {
        const int f = q < (n + 1) / 2 ? q : q - n;
        const double k = two_pi * f / (2.0 * grid.half_width());
        sum += 0.5 * k * k * std::polar(1.0, k * (grid.nodes()[a] - grid.nodes()[b]));
      }
      t(a, b) = sum / double(n);
    }
  return t;
}

}  // namespace oracle
