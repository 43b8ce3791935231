#pragma once

// Truncated Fock space over L modes with at most N particles, fermionic or
// bosonic. States are grouped in particle-number blocks n = 0..N. Within a
// block, fermion states are ordered by ascending bit encoding (mode j <->
// bit j) and boson states by descending lexicographic occupation vector,
// which is the same rule expressed on occupations.
//
// Everything here is independent of the single-particle functions: the
// matrices of c_j in this basis do not change when the SPFs do.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rhomctdh/grid.hpp"

namespace rhomctdh {

enum class Statistics { fermion, boson };

/// Per-block dense matrices; index n is the n-particle block.
using BlockMatrix = std::vector<Eigen::MatrixXcd>;

struct FockState {
  Statistics statistics = Statistics::fermion;
  std::vector<int> occupations;

  int particle_count() const;
  friend bool operator==(const FockState&, const FockState&) = default;
};

struct FockAction {
  double amplitude;
  FockState state;
};

/// c_j |state>. Fermions: sign (-1)^(occupied modes below j); bosons: sqrt(n_j).
std::optional<FockAction> annihilate(const FockState& state, int mode);
/// c_j^dagger |state>. Bosonic states beyond `cap` particles are truncated away.
std::optional<FockAction> create(const FockState& state, int mode, int cap);

/// <row| c_j^dagger c_k |col> = amplitude, within one block.
struct OneBodyTerm {
  int row, col;
  int j, k;
  double amplitude;
};

/// <row| c_j^dagger c_k^dagger c_m c_l |col> = amplitude, within one block.
struct TwoBodyTerm {
  int row, col;
  int j, k, l, m;
  double amplitude;
};

class FockBasis {
 public:
  using SparseMap = Eigen::SparseMatrix<double>;
  using ComplexSparseMap = Eigen::SparseMatrix<std::complex<double>>;

  FockBasis(int modes, int max_particles, Statistics statistics);

  int modes() const noexcept { return modes_; }
  int max_particles() const noexcept { return max_particles_; }
  Statistics statistics() const noexcept { return statistics_; }

  int block_count() const noexcept { return max_particles_ + 1; }
  int block_dim(int n) const { return static_cast<int>(blocks_.at(n).size()); }
  int total_dim() const;
  /// Offset of block n in the concatenated basis ordering.
  int offset(int n) const;

  const FockState& state(int n, int index) const { return blocks_.at(n).at(index); }
  const std::vector<FockState>& block(int n) const { return blocks_.at(n); }
  /// Index of a state within its particle-number block.
  std::optional<int> index_of(const FockState& state) const;

  /// Matrix of c_j from block n to block n - 1 (n >= 1); dim(n-1) x dim(n).
  const SparseMap& annihilator(int mode, int n) const;
  /// Same matrix with complex scalar type, for products with density blocks.
  const ComplexSparseMap& annihilator_complex(int mode, int n) const;

  const std::vector<OneBodyTerm>& one_body_terms(int n) const { return one_body_.at(n); }
  const std::vector<TwoBodyTerm>& two_body_terms(int n) const { return two_body_.at(n); }

  BlockMatrix zero_blocks() const;

 private:
  std::uint64_t key(const FockState& s) const;

  int modes_;
  int max_particles_;
  Statistics statistics_;
  std::vector<std::vector<FockState>> blocks_;
  std::unordered_map<std::uint64_t, int> lookup_;
  // annihilators_[mode][n], entry for n = 0 is an empty 0 x 1 map
  std::vector<std::vector<SparseMap>> annihilators_;
  std::vector<std::vector<ComplexSparseMap>> annihilators_complex_;
  std::vector<std::vector<OneBodyTerm>> one_body_;
  std::vector<std::vector<TwoBodyTerm>> two_body_;
};

/// Throws InvalidArgument for L < 1, N < 0, or fermions with N > L.
FockBasis enumerate_basis(int modes, int max_particles, Statistics statistics);

/// Annihilator c_j as a map V_n -> V_{n-1} for every block (index n; n = 0 is empty).
std::vector<FockBasis::SparseMap> annihilator_matrix(const FockBasis& basis, int mode);

/// sum_jk M_jk c_j^dagger c_k as dense blocks.
BlockMatrix galerkin_one_body(const FockBasis& basis, const Eigen::MatrixXcd& coeffs);

inline BlockMatrix galerkin_one_body(const FockBasis& basis, const OneBodyCoeffs& coeffs) {
  return galerkin_one_body(basis, coeffs.matrix);
}

/// 1/2 sum_jklm u_jklm c_j^dagger c_k^dagger c_m c_l as dense blocks.
BlockMatrix galerkin_two_body(const FockBasis& basis, const TwoBodyCoeffs& coeffs);

/// Many-body transformation induced by phi_j = sum_k chi_k G_kj, where phi are
/// the modes of `from` and chi those of `to`. Returns per block the matrix
/// T_n with Phi_J = sum_K (T_n)_KJ X_K, so operators map as B' = T B T^dagger.
/// G need not be square or unitary. `to` must hold at least as many particles.
BlockMatrix basis_transform(const FockBasis& from, const FockBasis& to, const Eigen::MatrixXcd& g);

// Block algebra helpers.
std::complex<double> block_trace(const BlockMatrix& b);
double hermiticity_residual(const BlockMatrix& b);
double max_abs_difference(const BlockMatrix& a, const BlockMatrix& b);
BlockMatrix congruence(const BlockMatrix& t, const BlockMatrix& b);

}  // namespace rhomctdh
