#pragma once

// Single-particle discretization: a uniform periodic grid with FFT-based
// kinetic energy, local potentials, one- and two-body integrals over a set
// of single-particle functions (SPFs), mean fields and the projector onto
// the orthogonal complement of the SPF span.
//
// Mode indices are zero-based throughout the library.

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <vector>

namespace rhomctdh {

using cplx = std::complex<double>;
using GridFunction = Eigen::VectorXcd;
using RealGridFunction = Eigen::VectorXd;

namespace detail {
class FftPlan;
}

/// Uniform periodic grid on [-R, R): x_i = -R + i dx, dx = 2R / n.
/// Copies share the FFT plans; a GridSpec is immutable after construction.
class GridSpec {
 public:
  GridSpec(double half_width, int n_points);

  double half_width() const noexcept { return half_width_; }
  int size() const noexcept { return static_cast<int>(nodes_.size()); }
  double spacing() const noexcept { return spacing_; }
  const Eigen::VectorXd& nodes() const noexcept { return nodes_; }
  /// Angular wavenumbers in standard FFT ordering (0, 1, ..., n/2-1, -n/2, ..., -1) * 2pi/(2R).
  const Eigen::VectorXd& wavenumbers() const noexcept { return wavenumbers_; }

  /// In-place unnormalized forward DFT.
  void forward(cplx* data) const;
  /// In-place inverse DFT including the 1/n normalization.
  void backward(cplx* data) const;

  /// Delta-x weighted inner product <f|g>.
  cplx inner(const GridFunction& f, const GridFunction& g) const { return spacing_ * f.dot(g); }
  double norm(const GridFunction& f) const { return std::sqrt(spacing_) * f.norm(); }

 private:
  double half_width_;
  double spacing_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd wavenumbers_;
  std::shared_ptr<const detail::FftPlan> fft_;
};

/// Throws InvalidArgument for R <= 0 or n_points < 2.
GridSpec make_grid(double half_width, int n_points);

/// L orthonormal single-particle functions stored as the columns of an
/// n_points x L matrix.
struct SpfSet {
  Eigen::MatrixXcd functions;

  int count() const noexcept { return static_cast<int>(functions.cols()); }
  auto operator[](int j) const { return functions.col(j); }
  auto operator[](int j) { return functions.col(j); }
};

/// Overlap matrix <phi_j|phi_k>.
Eigen::MatrixXcd overlap(const GridSpec& grid, const SpfSet& spfs);
/// max_jk |<phi_j|phi_k> - delta_jk|.
double orthonormality_error(const GridSpec& grid, const SpfSet& spfs);

/// Gaussian trap V(x) = -depth * exp(-width * x^2).
RealGridFunction eval_trap(const GridSpec& grid, double depth = 8.0, double width = 1.25);

/// Power-law absorber Gamma(x) = (|x| - R')^2 for |x| > R', zero inside.
/// Throws InvalidArgument unless 0 < R' < R.
RealGridFunction eval_cap(const GridSpec& grid, double cap_start);

/// T f = -f''/2 evaluated spectrally.
GridFunction kinetic_apply(const GridSpec& grid, const GridFunction& f);
/// Kinetic operator applied to every column.
Eigen::MatrixXcd kinetic_apply(const GridSpec& grid, const Eigen::MatrixXcd& f);

enum class OneBodyLabel { hamiltonian, cap };

/// A one-body operator: optional kinetic energy plus a local real potential.
struct OneBodyOperator {
  bool include_kinetic = false;
  RealGridFunction local;
  OneBodyLabel label = OneBodyLabel::hamiltonian;

  static OneBodyOperator hamiltonian(RealGridFunction potential) {
    return {true, std::move(potential), OneBodyLabel::hamiltonian};
  }
  static OneBodyOperator local_potential(RealGridFunction potential) {
    return {false, std::move(potential), OneBodyLabel::hamiltonian};
  }
  static OneBodyOperator cap(RealGridFunction absorber) {
    return {false, std::move(absorber), OneBodyLabel::cap};
  }
};

Eigen::MatrixXcd apply_one_body(const GridSpec& grid, const OneBodyOperator& op,
                                const Eigen::MatrixXcd& f);

struct OneBodyCoeffs {
  Eigen::MatrixXcd matrix;
  OneBodyLabel label = OneBodyLabel::hamiltonian;
};

/// Dense complex tensor with four mode indices, row-major in (j, k, l, m).
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int modes)
      : modes_(modes), data_(static_cast<std::size_t>(modes) * modes * modes * modes, cplx{}) {}

  int modes() const noexcept { return modes_; }
  cplx& operator()(int j, int k, int l, int m) { return data_[index(j, k, l, m)]; }
  cplx operator()(int j, int k, int l, int m) const { return data_[index(j, k, l, m)]; }
  const std::vector<cplx>& data() const noexcept { return data_; }
  std::vector<cplx>& data() noexcept { return data_; }

 private:
  std::size_t index(int j, int k, int l, int m) const {
    return ((static_cast<std::size_t>(j) * modes_ + k) * modes_ + l) * modes_ + m;
  }
  int modes_ = 0;
  std::vector<cplx> data_;
};

/// Two-body coefficients u_{jklm} = <phi_j phi_k|u|phi_l phi_m> (not antisymmetrized).
using TwoBodyCoeffs = Tensor4;

/// Real symmetric pair potential u(x_a, x_b) tabulated on the grid.
struct PairPotential {
  Eigen::MatrixXd table;

  /// u(x, y) = strength / sqrt((x - y)^2 + smoothing^2).
  static PairPotential smoothed_coulomb(const GridSpec& grid, double strength = 2.0,
                                        double smoothing = 0.1);
  static PairPotential constant(const GridSpec& grid, double value);
};

/// M_jk = <phi_j|op|phi_k>, Hermitian-symmetrized.
OneBodyCoeffs one_body_integrals(const GridSpec& grid, const SpfSet& spfs, const OneBodyOperator& op);

/// Two-body integrals by quadrature over both coordinates. Pair symmetry
/// u_{jklm} = u_{kjml} holds bitwise.
TwoBodyCoeffs two_body_integrals(const GridSpec& grid, const SpfSet& spfs, const PairPotential& u);

/// U_km(x_a) = dx sum_b conj(phi_k(x_b)) u(x_a, x_b) phi_m(x_b).
GridFunction mean_field(const GridSpec& grid, const SpfSet& spfs, int k, int m, const PairPotential& u);

/// All L^2 mean fields; column k * L + m holds U_km.
Eigen::MatrixXcd mean_fields(const GridSpec& grid, const SpfSet& spfs, const PairPotential& u);

/// Two-body integrals from precomputed mean fields: u_{jklm} = <phi_j|U_km|phi_l>.
TwoBodyCoeffs two_body_from_mean_fields(const GridSpec& grid, const SpfSet& spfs,
                                        const Eigen::MatrixXcd& fields);

/// Q v = v - sum_k phi_k <phi_k|v>.
GridFunction project_complement(const GridSpec& grid, const SpfSet& spfs, const GridFunction& v);
Eigen::MatrixXcd project_complement(const GridSpec& grid, const SpfSet& spfs, const Eigen::MatrixXcd& v);

/// Lowest `count` eigenpairs of the discretized h = T + V as grid functions
/// normalized in the dx-weighted inner product.
struct OneBodySpectrum {
  Eigen::VectorXd energies;
  SpfSet orbitals;
};
OneBodySpectrum one_body_spectrum(const GridSpec& grid, const RealGridFunction& potential, int count);

/// Dense matrix of T + V in the grid-point basis.
Eigen::MatrixXcd one_body_matrix(const GridSpec& grid, const RealGridFunction& potential);

/// The single-particle model: trap, absorber and pair interaction.
struct Model {
  GridSpec grid;
  RealGridFunction potential;
  RealGridFunction cap;
  PairPotential pair;
  bool interacting = true;
  bool absorbing = true;

  Model(GridSpec g, RealGridFunction v, RealGridFunction gamma, PairPotential u)
      : grid(std::move(g)), potential(std::move(v)), cap(std::move(gamma)), pair(std::move(u)) {
    interacting = pair.table.size() > 0 && pair.table.cwiseAbs().maxCoeff() > 0.0;
    absorbing = cap.size() > 0 && cap.cwiseAbs().maxCoeff() > 0.0;
  }
};

}  // namespace rhomctdh
