#include "rhomctdh/grid.hpp"

#include <fftw3.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

#include "rhomctdh/errors.hpp"

namespace rhomctdh {

namespace detail {

// Owns a pair of in-place FFTW plans. Plans are created with FFTW_ESTIMATE so
// that the algorithm choice, and therefore the rounding, is reproducible.
class FftPlan {
 public:
  explicit FftPlan(int n) : n_(n) {
    fftw_complex* buffer = fftw_alloc_complex(static_cast<std::size_t>(n));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_1d(n, buffer, buffer, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_1d(n, buffer, buffer, FFTW_BACKWARD, flags);
    fftw_free(buffer);
  }
  ~FftPlan() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void forward(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(forward_, p, p);
  }
  void backward(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(backward_, p, p);
    const double scale = 1.0 / n_;
    for (int i = 0; i < n_; ++i) data[i] *= scale;
  }

 private:
  int n_;
  fftw_plan forward_;
  fftw_plan backward_;
};

}  // namespace detail

GridSpec::GridSpec(double half_width, int n_points) : half_width_(half_width) {
  if (!(half_width > 0.0)) throw InvalidArgument("grid half-width must be positive");
  if (n_points < 2) throw InvalidArgument("grid needs at least 2 points");
  spacing_ = 2.0 * half_width / n_points;
  nodes_.resize(n_points);
  wavenumbers_.resize(n_points);
  const double dk = 2.0 * std::numbers::pi / (2.0 * half_width);
  for (int i = 0; i < n_points; ++i) {
    nodes_[i] = -half_width + i * spacing_;
    const int freq = i < (n_points + 1) / 2 ? i : i - n_points;
    wavenumbers_[i] = dk * freq;
  }
  fft_ = std::make_shared<const detail::FftPlan>(n_points);
}

void GridSpec::forward(cplx* data) const { fft_->forward(data); }
void GridSpec::backward(cplx* data) const { fft_->backward(data); }

GridSpec make_grid(double half_width, int n_points) { return GridSpec(half_width, n_points); }

Eigen::MatrixXcd overlap(const GridSpec& grid, const SpfSet& spfs) {
  return grid.spacing() * (spfs.functions.adjoint() * spfs.functions);
}

double orthonormality_error(const GridSpec& grid, const SpfSet& spfs) {
  const Eigen::MatrixXcd s = overlap(grid, spfs);
  return (s - Eigen::MatrixXcd::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
}

RealGridFunction eval_trap(const GridSpec& grid, double depth, double width) {
  return grid.nodes().unaryExpr([&](double x) { return -depth * std::exp(-width * x * x); });
}

RealGridFunction eval_cap(const GridSpec& grid, double cap_start) {
  if (!(cap_start > 0.0) || !(cap_start < grid.half_width()))
    throw InvalidArgument("absorber onset R' must satisfy 0 < R' < R");
  return grid.nodes().unaryExpr([&](double x) {
    const double d = std::abs(x) - cap_start;
    return d > 0.0 ? d * d : 0.0;
  });
}

GridFunction kinetic_apply(const GridSpec& grid, const GridFunction& f) {
  GridFunction out = f;
  grid.forward(out.data());
  out.array() *= 0.5 * grid.wavenumbers().array().square();
  grid.backward(out.data());
  return out;
}

Eigen::MatrixXcd kinetic_apply(const GridSpec& grid, const Eigen::MatrixXcd& f) {
  Eigen::MatrixXcd out = f;
  const Eigen::ArrayXd half_k2 = 0.5 * grid.wavenumbers().array().square();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    cplx* col = out.col(j).data();
    grid.forward(col);
    out.col(j).array() *= half_k2;
    grid.backward(col);
  }
  return out;
}

Eigen::MatrixXcd apply_one_body(const GridSpec& grid, const OneBodyOperator& op,
                                const Eigen::MatrixXcd& f) {
  Eigen::MatrixXcd out = op.include_kinetic ? kinetic_apply(grid, f)
                                            : Eigen::MatrixXcd::Zero(f.rows(), f.cols());
  if (op.local.size() > 0) out += op.local.asDiagonal() * f;
  return out;
}

OneBodyCoeffs one_body_integrals(const GridSpec& grid, const SpfSet& spfs, const OneBodyOperator& op) {
  const Eigen::MatrixXcd applied = apply_one_body(grid, op, spfs.functions);
  Eigen::MatrixXcd m = grid.spacing() * (spfs.functions.adjoint() * applied);
  const Eigen::MatrixXcd hermitian = 0.5 * (m + m.adjoint());
  return {hermitian, op.label};
}

namespace {

// P(a, j * L + l) = conj(phi_j(x_a)) phi_l(x_a)
Eigen::MatrixXcd pair_densities(const SpfSet& spfs) {
  const int L = spfs.count();
  const Eigen::Index n = spfs.functions.rows();
  Eigen::MatrixXcd p(n, L * L);
  for (int j = 0; j < L; ++j)
    for (int l = 0; l < L; ++l)
      p.col(j * L + l) = spfs.functions.col(j).conjugate().cwiseProduct(spfs.functions.col(l));
  return p;
}

}  // namespace

Eigen::MatrixXcd mean_fields(const GridSpec& grid, const SpfSet& spfs, const PairPotential& u) {
  const Eigen::MatrixXcd p = pair_densities(spfs);
  const Eigen::MatrixXd re = u.table * p.real();
  const Eigen::MatrixXd im = u.table * p.imag();
  Eigen::MatrixXcd out(re.rows(), re.cols());
  out.real() = grid.spacing() * re;
  out.imag() = grid.spacing() * im;
  return out;
}

GridFunction mean_field(const GridSpec& grid, const SpfSet& spfs, int k, int m, const PairPotential& u) {
  const GridFunction density = spfs.functions.col(k).conjugate().cwiseProduct(spfs.functions.col(m));
  GridFunction out(density.size());
  out.real() = grid.spacing() * (u.table * density.real());
  out.imag() = grid.spacing() * (u.table * density.imag());
  return out;
}

TwoBodyCoeffs two_body_from_mean_fields(const GridSpec& grid, const SpfSet& spfs,
                                        const Eigen::MatrixXcd& fields) {
  const int L = spfs.count();
  const Eigen::MatrixXcd p = pair_densities(spfs);
  // w(j * L + l, k * L + m) = <phi_j|U_km|phi_l> = u_{jklm}
  const Eigen::MatrixXcd w = grid.spacing() * (p.transpose() * fields);
  TwoBodyCoeffs u(L);
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < L; ++k)
      for (int l = 0; l < L; ++l)
        for (int m = 0; m < L; ++m) {
          // u_{jklm} and u_{kjml} are the same quadrature sum; average the two
          // roundings so the pair symmetry is exact.
          const cplx a = w(j * L + l, k * L + m);
          const cplx b = w(k * L + m, j * L + l);
          u(j, k, l, m) = 0.5 * (a + b);
        }
  return u;
}

TwoBodyCoeffs two_body_integrals(const GridSpec& grid, const SpfSet& spfs, const PairPotential& u) {
  return two_body_from_mean_fields(grid, spfs, mean_fields(grid, spfs, u));
}

PairPotential PairPotential::smoothed_coulomb(const GridSpec& grid, double strength, double smoothing) {
  const auto& x = grid.nodes();
  const Eigen::Index n = x.size();
  PairPotential u;
  u.table.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const double d = x[a] - x[b];
      u.table(a, b) = strength / std::sqrt(d * d + smoothing * smoothing);
    }
  return u;
}

PairPotential PairPotential::constant(const GridSpec& grid, double value) {
  return {Eigen::MatrixXd::Constant(grid.size(), grid.size(), value)};
}

GridFunction project_complement(const GridSpec& grid, const SpfSet& spfs, const GridFunction& v) {
  const Eigen::VectorXcd c = grid.spacing() * (spfs.functions.adjoint() * v);
  return v - spfs.functions * c;
}

Eigen::MatrixXcd project_complement(const GridSpec& grid, const SpfSet& spfs, const Eigen::MatrixXcd& v) {
  const Eigen::MatrixXcd c = grid.spacing() * (spfs.functions.adjoint() * v);
  return v - spfs.functions * c;
}

Eigen::MatrixXcd one_body_matrix(const GridSpec& grid, const RealGridFunction& potential) {
  const int n = grid.size();
  Eigen::MatrixXcd h = kinetic_apply(grid, Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(n, n)));
  h = 0.5 * (h + h.adjoint()).eval();
  if (potential.size() > 0) h.diagonal().array() += potential.array();
  return h;
}

OneBodySpectrum one_body_spectrum(const GridSpec& grid, const RealGridFunction& potential, int count) {
  const int n = grid.size();
  if (count < 0 || count > n) throw InvalidArgument("requested more eigenpairs than grid points");
  // T is real symmetric; the FFT-built imaginary part is rounding noise
  const Eigen::MatrixXcd h = one_body_matrix(grid, potential);
  OneBodySpectrum out;
  out.energies.resize(count);
  out.orbitals.functions.resize(n, count);
  const double scale = 1.0 / std::sqrt(grid.spacing());
  if (h.imag().cwiseAbs().maxCoeff() < 1e-12) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
    for (int j = 0; j < count; ++j) {
      Eigen::VectorXd v = es.eigenvectors().col(j);
      Eigen::Index imax;
      v.cwiseAbs().maxCoeff(&imax);
      if (v[imax] < 0) v = -v;
      out.energies[j] = es.eigenvalues()[j];
      out.orbitals.functions.col(j) = (scale * v).cast<cplx>();
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    for (int j = 0; j < count; ++j) {
      Eigen::VectorXcd v = es.eigenvectors().col(j);
      Eigen::Index imax;
      v.cwiseAbs().maxCoeff(&imax);
      v *= std::abs(v[imax]) / v[imax];
      out.energies[j] = es.eigenvalues()[j];
      out.orbitals.functions.col(j) = scale * v;
    }
  }
  return out;
}

}  // namespace rhomctdh
