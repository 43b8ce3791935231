#include "rhomctdh/propagate.hpp"

#include <cmath>
#include <sstream>

#include "rhomctdh/errors.hpp"
#include "rhomctdh/log.hpp"

namespace rhomctdh {

namespace {

McState advance(const McState& s, const McDerivative& d, double h) {
  return {SpfSet{s.spfs.functions + h * d.spfs}, axpy(s.b, h, d.b), s.t};
}

PureMcState advance(const PureMcState& s, const PureDerivative& d, double h) {
  return {SpfSet{s.spfs.functions + h * d.spfs}, s.coeffs + h * d.coeffs, s.particles, s.t};
}

McState rk4(const McSystem& sys, const McState& s, double h, bool kinetic, double eps, StepInfo* info) {
  auto rhs = [&](const McState& x) {
    McDerivative d = mc_rhs(sys, x, kinetic, eps);
    if (info) info->merge(d.sigma_min, d.regularized);
    return d;
  };
  const McDerivative k1 = rhs(s);
  const McDerivative k2 = rhs(advance(s, k1, 0.5 * h));
  const McDerivative k3 = rhs(advance(s, k2, 0.5 * h));
  const McDerivative k4 = rhs(advance(s, k3, h));
  McState out = s;
  out.spfs.functions += (h / 6.0) * (k1.spfs + 2.0 * k2.spfs + 2.0 * k3.spfs + k4.spfs);
  for (std::size_t n = 0; n < out.b.size(); ++n)
    out.b[n] += (h / 6.0) * (k1.b[n] + 2.0 * k2.b[n] + 2.0 * k3.b[n] + k4.b[n]);
  out.t = s.t + h;
  return out;
}

PureMcState pure_rk4(const McSystem& sys, const PureMcState& s, double h, bool kinetic, TimeMode mode,
                     double eps) {
  auto rhs = [&](const PureMcState& x) { return pure_rhs(sys, x, kinetic, mode, eps); };
  const PureDerivative k1 = rhs(s);
  const PureDerivative k2 = rhs(advance(s, k1, 0.5 * h));
  const PureDerivative k3 = rhs(advance(s, k2, 0.5 * h));
  const PureDerivative k4 = rhs(advance(s, k3, h));
  PureMcState out = s;
  out.spfs.functions += (h / 6.0) * (k1.spfs + 2.0 * k2.spfs + 2.0 * k3.spfs + k4.spfs);
  out.coeffs += (h / 6.0) * (k1.coeffs + 2.0 * k2.coeffs + 2.0 * k3.coeffs + k4.coeffs);
  out.t = s.t + h;
  return out;
}

bool finite(const McState& s) { return s.spfs.functions.allFinite() && all_finite(s.b); }

}  // namespace

void kinetic_half_step(const GridSpec& grid, SpfSet& spfs, double dt) {
  const Eigen::ArrayXcd phase =
      (grid.wavenumbers().array().square() * (-0.5 * dt)).unaryExpr([](double a) { return std::polar(1.0, a); });
  for (int j = 0; j < spfs.count(); ++j) {
    cplx* col = spfs.functions.col(j).data();
    grid.forward(col);
    spfs.functions.col(j).array() *= phase;
    grid.backward(col);
  }
}

McState kinetic_half_step(const GridSpec& grid, McState state, double dt) {
  kinetic_half_step(grid, state.spfs, dt);
  return state;
}

McState potential_step(const McSystem& sys, const McState& state, double tau, double eps, StepInfo* info) {
  McState out = rk4(sys, state, tau, false, eps, info);
  if (!finite(out)) throw NumericalBlowup("non-finite state in potential step", out.t);
  return out;
}

McState split_step(const McSystem& sys, const McState& state, double tau, double eps, StepInfo* info) {
  McState s = kinetic_half_step(sys.grid(), state, 0.5 * tau);
  s = potential_step(sys, s, tau, eps, info);
  kinetic_half_step(sys.grid(), s.spfs, 0.5 * tau);
  return s;
}

McState rk4_step(const McSystem& sys, const McState& state, double tau, double eps, StepInfo* info) {
  McState out = rk4(sys, state, tau, true, eps, info);
  if (!finite(out)) throw NumericalBlowup("non-finite state in RK4 step", out.t);
  return out;
}

PureMcState pure_potential_step(const McSystem& sys, const PureMcState& state, double tau, double eps) {
  PureMcState out = pure_rk4(sys, state, tau, false, TimeMode::real, eps);
  if (!out.spfs.functions.allFinite() || !out.coeffs.allFinite())
    throw NumericalBlowup("non-finite state in potential step", out.t);
  return out;
}

PureMcState pure_split_step(const McSystem& sys, const PureMcState& state, double tau, double eps) {
  PureMcState s = state;
  kinetic_half_step(sys.grid(), s.spfs, 0.5 * tau);
  s = pure_potential_step(sys, s, tau, eps);
  kinetic_half_step(sys.grid(), s.spfs, 0.5 * tau);
  return s;
}

PureMcState pure_rk4_step(const McSystem& sys, const PureMcState& state, double dt, TimeMode mode, double eps) {
  PureMcState out = pure_rk4(sys, state, dt, true, mode, eps);
  if (!out.spfs.functions.allFinite() || !out.coeffs.allFinite())
    throw NumericalBlowup("non-finite state in RK4 step", out.t);
  return out;
}

Eigen::MatrixXcd orthonormalize(const GridSpec& grid, SpfSet& spfs) {
  const int L = spfs.count();
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(L, L);
  for (int j = 0; j < L; ++j) {
    const double before = grid.norm(spfs.functions.col(j));
    for (int i = 0; i < j; ++i) {
      r(i, j) = grid.inner(spfs.functions.col(i), spfs.functions.col(j));
      spfs.functions.col(j) -= r(i, j) * spfs.functions.col(i);
    }
    const double norm = grid.norm(spfs.functions.col(j));
    if (!(norm > 1e-10 * before)) throw ConsistencyError("SPFs became linearly dependent");
    r(j, j) = norm;
    spfs.functions.col(j) /= norm;
  }
  return r;
}

void reorthonormalize(const FockBasis& basis, const GridSpec& grid, McState& state) {
  const Eigen::MatrixXcd r = orthonormalize(grid, state.spfs);
  state.b = congruence(basis_transform(basis, basis, r), state.b);
}

void reorthonormalize(const FockBasis& basis, const GridSpec& grid, PureMcState& state) {
  const Eigen::MatrixXcd r = orthonormalize(grid, state.spfs);
  state.coeffs = basis_transform(basis, basis, r).at(state.particles) * state.coeffs;
}

RelaxResult relax_imaginary(const McSystem& sys, PureMcState initial, const RelaxConfig& config) {
  if (!(config.ds > 0.0)) throw InvalidArgument("relaxation step must be positive");
  RelaxResult res{std::move(initial), 0.0, 0};
  PureMcState& s = res.state;
  reorthonormalize(*sys.basis, sys.grid(), s);
  s.coeffs.normalize();
  double e = pure_energy(sys, s);
  for (int step = 1; step <= config.max_steps; ++step) {
    s = pure_rk4_step(sys, s, config.ds, TimeMode::imaginary, config.eps_reg);
    s.coeffs.normalize();
    reorthonormalize(*sys.basis, sys.grid(), s);
    const double e_new = pure_energy(sys, s);
    if (!std::isfinite(e_new)) throw NumericalBlowup("non-finite energy in relaxation", s.t);
    const double rate = std::abs(e_new - e) / config.ds;
    e = e_new;
    if (rate >= config.tolerance) continue;
    const PureDerivative d = pure_rhs(sys, s, true, TimeMode::imaginary, config.eps_reg);
    const double residual = std::max(d.coeffs.norm(), std::sqrt(sys.grid().spacing()) * d.spfs.norm());
    if (residual < config.residual_tolerance) {
      res.energy = e;
      res.steps = step;
      s.t = 0.0;
      std::ostringstream msg;
      msg.precision(12);
      msg << "relaxation converged after " << step << " steps, E = " << e;
      log_info(msg.str());
      return res;
    }
  }
  throw ConvergenceFailure("imaginary-time relaxation did not converge", e);
}

TrajectoryRecord make_record(const McSystem& sys, const McState& state) {
  TrajectoryRecord r;
  r.t = state.t;
  r.probabilities = block_probabilities(state.b);
  r.trace = r.probabilities.sum();
  r.energy = energy(sys, state);
  r.sigma_min = min_eig_S(reduced_one_body(*sys.basis, state.b, 2));
  r.density = density(*sys.basis, state);
  r.hermiticity = hermiticity_residual(state.b);
  r.orthonormality = orthonormality_error(sys.grid(), state.spfs);
  return r;
}

std::vector<TrajectoryRecord> propagate(const McSystem& sys, McState& state, const PropagationConfig& config,
                                        const PropagationObserver& observer) {
  if (!(config.tau > 0.0)) throw InvalidArgument("time step must be positive");
  if (config.t_final < 0.0) throw InvalidArgument("final time must be non-negative");
  if (config.record_every < 1) throw InvalidArgument("record_every must be at least 1");

  std::vector<TrajectoryRecord> records;
  auto record = [&] {
    records.push_back(make_record(sys, state));
    if (observer) observer(state, records.back());
  };

  const double t0 = state.t;
  const long steps = static_cast<long>(std::ceil(config.t_final / config.tau - 1e-9));
  bool regularization_logged = false;
  long reorthonormalizations = 0;
  record();
  for (long s = 1; s <= steps; ++s) {
    const double t_prev = state.t;
    const double t_next = s == steps ? t0 + config.t_final : t0 + s * config.tau;
    StepInfo info;
    state = split_step(sys, state, t_next - t_prev, config.eps_reg, &info);
    state.t = t_next;

    if (info.regularized && !regularization_logged) {
      std::ostringstream msg;
      msg << "S regularization active at t = " << t_next << " (sigma_min = " << info.sigma_min << ")";
      log_warning(msg.str());
      regularization_logged = true;
    }
    const double drift = orthonormality_error(sys.grid(), state.spfs);
    if (drift > config.orthonormality_tolerance) {
      std::ostringstream msg;
      msg << "SPF orthonormality drift " << drift << " at t = " << t_next << "; re-orthonormalizing";
      log_warning(msg.str());
      reorthonormalize(*sys.basis, sys.grid(), state);
      ++reorthonormalizations;
    }
    if (s % config.record_every == 0 || s == steps) record();
  }
  if (reorthonormalizations > 0)
    log_info("re-orthonormalized " + std::to_string(reorthonormalizations) + " times");
  return records;
}

}  // namespace rhomctdh
