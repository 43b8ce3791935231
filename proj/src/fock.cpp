#include "rhomctdh/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rhomctdh/errors.hpp"

namespace rhomctdh {

int FockState::particle_count() const { return std::accumulate(occupations.begin(), occupations.end(), 0); }

std::optional<FockAction> annihilate(const FockState& state, int mode) {
  const int occ = state.occupations.at(mode);
  if (occ == 0) return std::nullopt;
  FockAction out{1.0, state};
  out.state.occupations[mode] -= 1;
  if (state.statistics == Statistics::fermion) {
    const int below = std::accumulate(state.occupations.begin(), state.occupations.begin() + mode, 0);
    out.amplitude = (below % 2 == 0) ? 1.0 : -1.0;
  } else {
    out.amplitude = std::sqrt(static_cast<double>(occ));
  }
  return out;
}

std::optional<FockAction> create(const FockState& state, int mode, int cap) {
  const int occ = state.occupations.at(mode);
  if (state.particle_count() + 1 > cap) return std::nullopt;
  FockAction out{1.0, state};
  out.state.occupations[mode] += 1;
  if (state.statistics == Statistics::fermion) {
    if (occ != 0) return std::nullopt;
    const int below = std::accumulate(state.occupations.begin(), state.occupations.begin() + mode, 0);
    out.amplitude = (below % 2 == 0) ? 1.0 : -1.0;
  } else {
    out.amplitude = std::sqrt(static_cast<double>(occ + 1));
  }
  return out;
}

namespace {

std::vector<FockState> fermion_block(int modes, int n) {
  std::vector<FockState> out;
  auto push = [&](std::uint64_t bits) {
    FockState s{Statistics::fermion, std::vector<int>(modes, 0)};
    for (int j = 0; j < modes; ++j) s.occupations[j] = static_cast<int>((bits >> j) & 1u);
    out.push_back(std::move(s));
  };
  if (n == 0) {
    push(0);
    return out;
  }
  // Gosper's hack: masks with popcount n in ascending order
  const std::uint64_t limit = std::uint64_t{1} << modes;
  for (std::uint64_t bits = (std::uint64_t{1} << n) - 1; bits < limit;) {
    push(bits);
    const std::uint64_t c = bits & (~bits + 1);
    const std::uint64_t r = bits + c;
    bits = (((r ^ bits) >> 2) / c) | r;
  }
  return out;
}

// Occupation vectors summing to n, descending lexicographic.
void boson_fill(int mode, int remaining, std::vector<int>& occ, std::vector<FockState>& out) {
  const int modes = static_cast<int>(occ.size());
  if (mode == modes - 1) {
    occ[mode] = remaining;
    out.push_back({Statistics::boson, occ});
    return;
  }
  for (int take = remaining; take >= 0; --take) {
    occ[mode] = take;
    boson_fill(mode + 1, remaining - take, occ, out);
  }
  occ[mode] = 0;
}

}  // namespace

FockBasis::FockBasis(int modes, int max_particles, Statistics statistics)
    : modes_(modes), max_particles_(max_particles), statistics_(statistics) {
  if (modes < 1) throw InvalidArgument("Fock basis needs at least one mode");
  if (max_particles < 0) throw InvalidArgument("particle cap must be non-negative");
  if (statistics == Statistics::fermion && max_particles > modes)
    throw InvalidArgument("fermion particle cap exceeds the number of modes");
  if (statistics == Statistics::fermion && modes > 62) throw InvalidArgument("too many fermion modes");
  if (statistics == Statistics::boson &&
      modes * std::log2(static_cast<double>(max_particles) + 1.0) > 62.0)
    throw InvalidArgument("boson basis too large to index");

  for (int n = 0; n <= max_particles; ++n) {
    if (statistics == Statistics::fermion) {
      blocks_.push_back(fermion_block(modes, n));
    } else {
      std::vector<FockState> block;
      std::vector<int> occ(modes, 0);
      boson_fill(0, n, occ, block);
      blocks_.push_back(std::move(block));
    }
    for (int i = 0; i < block_dim(n); ++i) lookup_.emplace(key(blocks_[n][i]), i);
  }

  annihilators_.assign(modes, {});
  annihilators_complex_.assign(modes, {});
  for (int j = 0; j < modes; ++j) {
    annihilators_[j].emplace_back(0, block_dim(0));
    for (int n = 1; n <= max_particles; ++n) {
      std::vector<Eigen::Triplet<double>> triplets;
      for (int col = 0; col < block_dim(n); ++col) {
        if (auto r = annihilate(blocks_[n][col], j))
          triplets.emplace_back(*index_of(r->state), col, r->amplitude);
      }
      SparseMap m(block_dim(n - 1), block_dim(n));
      m.setFromTriplets(triplets.begin(), triplets.end());
      annihilators_[j].push_back(std::move(m));
    }
    for (const auto& m : annihilators_[j]) annihilators_complex_[j].push_back(m.cast<std::complex<double>>());
  }

  one_body_.resize(block_count());
  two_body_.resize(block_count());
  const int cap = max_particles;
  for (int n = 0; n <= max_particles; ++n) {
    for (int col = 0; col < block_dim(n); ++col) {
      const FockState& ket = blocks_[n][col];
      for (int k = 0; k < modes; ++k) {
        auto a1 = annihilate(ket, k);
        if (!a1) continue;
        for (int j = 0; j < modes; ++j) {
          auto a2 = create(a1->state, j, cap);
          if (!a2) continue;
          one_body_[n].push_back({*index_of(a2->state), col, j, k, a1->amplitude * a2->amplitude});
        }
      }
      // c_j^dagger c_k^dagger c_m c_l: c_l acts first
      for (int l = 0; l < modes; ++l) {
        auto s1 = annihilate(ket, l);
        if (!s1) continue;
        for (int m = 0; m < modes; ++m) {
          auto s2 = annihilate(s1->state, m);
          if (!s2) continue;
          for (int k = 0; k < modes; ++k) {
            auto s3 = create(s2->state, k, cap);
            if (!s3) continue;
            for (int j = 0; j < modes; ++j) {
              auto s4 = create(s3->state, j, cap);
              if (!s4) continue;
              const double amp = s1->amplitude * s2->amplitude * s3->amplitude * s4->amplitude;
              two_body_[n].push_back({*index_of(s4->state), col, j, k, l, m, amp});
            }
          }
        }
      }
    }
  }
}

std::uint64_t FockBasis::key(const FockState& s) const {
  std::uint64_t k = 0;
  const std::uint64_t base = static_cast<std::uint64_t>(max_particles_) + 1;
  for (int j = modes_ - 1; j >= 0; --j) k = k * base + static_cast<std::uint64_t>(s.occupations[j]);
  return k;
}

int FockBasis::total_dim() const {
  int d = 0;
  for (const auto& b : blocks_) d += static_cast<int>(b.size());
  return d;
}

int FockBasis::offset(int n) const {
  int d = 0;
  for (int m = 0; m < n; ++m) d += block_dim(m);
  return d;
}

std::optional<int> FockBasis::index_of(const FockState& state) const {
  if (static_cast<int>(state.occupations.size()) != modes_ || state.statistics != statistics_)
    return std::nullopt;
  const int n = state.particle_count();
  if (n > max_particles_) return std::nullopt;
  for (int occ : state.occupations)
    if (occ < 0 || (statistics_ == Statistics::fermion && occ > 1)) return std::nullopt;
  auto it = lookup_.find(key(state));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

const FockBasis::SparseMap& FockBasis::annihilator(int mode, int n) const {
  if (n < 1 || n > max_particles_) throw InvalidArgument("annihilator block index out of range");
  return annihilators_.at(mode).at(n);
}

const FockBasis::ComplexSparseMap& FockBasis::annihilator_complex(int mode, int n) const {
  if (n < 1 || n > max_particles_) throw InvalidArgument("annihilator block index out of range");
  return annihilators_complex_.at(mode).at(n);
}

BlockMatrix FockBasis::zero_blocks() const {
  BlockMatrix out;
  for (int n = 0; n < block_count(); ++n) out.push_back(Eigen::MatrixXcd::Zero(block_dim(n), block_dim(n)));
  return out;
}

FockBasis enumerate_basis(int modes, int max_particles, Statistics statistics) {
  return FockBasis(modes, max_particles, statistics);
}

std::vector<FockBasis::SparseMap> annihilator_matrix(const FockBasis& basis, int mode) {
  if (mode < 0 || mode >= basis.modes()) throw InvalidArgument("mode index out of range");
  std::vector<FockBasis::SparseMap> out;
  out.emplace_back(0, basis.block_dim(0));
  for (int n = 1; n < basis.block_count(); ++n) out.push_back(basis.annihilator(mode, n));
  return out;
}

BlockMatrix galerkin_one_body(const FockBasis& basis, const Eigen::MatrixXcd& coeffs) {
  if (coeffs.rows() != basis.modes() || coeffs.cols() != basis.modes())
    throw InvalidArgument("one-body coefficient size does not match the basis");
  BlockMatrix out = basis.zero_blocks();
  for (int n = 0; n < basis.block_count(); ++n)
    for (const auto& t : basis.one_body_terms(n)) out[n](t.row, t.col) += coeffs(t.j, t.k) * t.amplitude;
  return out;
}

BlockMatrix galerkin_two_body(const FockBasis& basis, const TwoBodyCoeffs& coeffs) {
  if (coeffs.modes() != basis.modes()) throw InvalidArgument("two-body coefficient size does not match the basis");
  BlockMatrix out = basis.zero_blocks();
  for (int n = 2; n < basis.block_count(); ++n)
    for (const auto& t : basis.two_body_terms(n))
      out[n](t.row, t.col) += 0.5 * t.amplitude * coeffs(t.j, t.k, t.l, t.m);
  return out;
}

BlockMatrix basis_transform(const FockBasis& from, const FockBasis& to, const Eigen::MatrixXcd& g) {
  if (g.rows() != to.modes() || g.cols() != from.modes())
    throw InvalidArgument("transformation matrix must be (target modes) x (source modes)");
  if (from.statistics() != to.statistics()) throw InvalidArgument("statistics mismatch");
  if (to.max_particles() < from.max_particles()) throw InvalidArgument("target basis holds too few particles");

  // v in block m of `to` -> c^dagger(g_j) v in block m + 1
  auto create_rotated = [&](const Eigen::VectorXcd& v, int m, int j) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(to.block_dim(m + 1));
    for (int k = 0; k < to.modes(); ++k) {
      const std::complex<double> gk = g(k, j);
      if (gk == 0.0) continue;
      const auto& a = to.annihilator(k, m + 1);
      for (int col = 0; col < a.outerSize(); ++col)
        for (FockBasis::SparseMap::InnerIterator it(a, col); it; ++it) out[col] += gk * it.value() * v[it.row()];
    }
    return out;
  };

  BlockMatrix out;
  for (int n = 0; n < from.block_count(); ++n) {
    Eigen::MatrixXcd t(to.block_dim(n), from.block_dim(n));
    for (int col = 0; col < from.block_dim(n); ++col) {
      const FockState& s = from.state(n, col);
      std::vector<int> orbitals;
      double norm = 1.0;
      for (int j = 0; j < from.modes(); ++j) {
        for (int c = 0; c < s.occupations[j]; ++c) orbitals.push_back(j);
        norm *= std::tgamma(s.occupations[j] + 1.0);
      }
      Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
      // Phi_J = c_{j1}^dagger ... c_{jn}^dagger |vac>: rightmost creator first
      int m = 0;
      for (auto it = orbitals.rbegin(); it != orbitals.rend(); ++it, ++m) v = create_rotated(v, m, *it);
      t.col(col) = v / std::sqrt(norm);
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::complex<double> block_trace(const BlockMatrix& b) {
  std::complex<double> tr = 0.0;
  for (const auto& m : b) tr += m.trace();
  return tr;
}

double hermiticity_residual(const BlockMatrix& b) {
  double r = 0.0;
  for (const auto& m : b)
    if (m.size() > 0) r = std::max(r, (m - m.adjoint()).cwiseAbs().maxCoeff());
  return r;
}

double max_abs_difference(const BlockMatrix& a, const BlockMatrix& b) {
  if (a.size() != b.size()) throw InvalidArgument("block count mismatch");
  double r = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (a[n].rows() != b[n].rows() || a[n].cols() != b[n].cols()) throw InvalidArgument("block shape mismatch");
    if (a[n].size() > 0) r = std::max(r, (a[n] - b[n]).cwiseAbs().maxCoeff());
  }
  return r;
}

BlockMatrix congruence(const BlockMatrix& t, const BlockMatrix& b) {
  if (t.size() != b.size()) throw InvalidArgument("block count mismatch");
  BlockMatrix out;
  for (std::size_t n = 0; n < b.size(); ++n) out.push_back(t[n] * b[n] * t[n].adjoint());
  return out;
}

}  // namespace rhomctdh
