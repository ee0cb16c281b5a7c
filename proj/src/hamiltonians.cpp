#include "qdgate/hamiltonians.hpp"

#include <cmath>
#include <string>

#include "qdgate/error.hpp"

namespace qdgate {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::invalid_argument, what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

PulseSchedule PulseSchedule::gaussian_chirped(double omega0, double tau_omega, double delta_inf,
                                              double tau_delta, double t_start, double t_end) {
  PulseSchedule s;
  s.shape = PulseShape::gaussian_chirped;
  s.omega0 = omega0;
  s.tau_omega = tau_omega;
  s.delta_inf = delta_inf;
  s.tau_delta = tau_delta;
  s.t_start = t_start;
  s.t_end = t_end;
  s.validate();
  return s;
}

PulseSchedule PulseSchedule::gaussian_chirped(double omega0, double tau_omega, double delta_inf,
                                              double tau_delta, double window_widths) {
  return gaussian_chirped(omega0, tau_omega, delta_inf, tau_delta, -window_widths * tau_omega,
                          window_widths * tau_omega);
}

PulseSchedule PulseSchedule::constant(double omega, double delta, double t_start, double t_end) {
  PulseSchedule s;
  s.shape = PulseShape::constant;
  s.omega0 = omega;
  s.delta_inf = delta;
  s.t_start = t_start;
  s.t_end = t_end;
  s.validate();
  return s;
}

PulseSchedule PulseSchedule::linear_sweep(double omega, double rate, double t_start,
                                          double t_end) {
  PulseSchedule s;
  s.shape = PulseShape::linear_sweep;
  s.omega0 = omega;
  s.sweep_rate = rate;
  s.t_start = t_start;
  s.t_end = t_end;
  s.validate();
  return s;
}

void PulseSchedule::validate() const {
  require(finite(omega0) && omega0 >= 0.0, "omega0 must be finite and >= 0");
  require(finite(tau_omega) && tau_omega > 0.0, "tau_omega must be > 0");
  require(finite(tau_delta) && tau_delta > 0.0, "tau_delta must be > 0");
  require(finite(delta_inf), "delta_inf must be finite");
  require(finite(sweep_rate), "sweep_rate must be finite");
  require(finite(t_start) && finite(t_end) && t_start < t_end, "t_start < t_end required");
}

PulseSample pulse_at(const PulseSchedule& s, double t) {
  require(!std::isnan(t), "pulse_at: t is NaN");
  switch (s.shape) {
    case PulseShape::gaussian_chirped: {
      const double x = t / s.tau_omega;
      const double y = t / s.tau_delta;
      return {s.omega0 * std::exp(-x * x), s.delta_inf * (1.0 - std::exp(-y * y))};
    }
    case PulseShape::constant:
      return {s.omega0, s.delta_inf};
    case PulseShape::linear_sweep:
      return {s.omega0, s.sweep_rate * t};
  }
  return {0.0, 0.0};
}

void DotModel::validate() const {
  require(finite(epsilon) && epsilon >= 0.0 && epsilon <= 1.0, "epsilon must lie in [0, 1]");
  require(finite(delta), "delta must be finite");
  require(finite(delta_e_ab) && delta_e_ab >= 0.0, "delta_e_ab must be >= 0");
}

HermitianOperator::HermitianOperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw Error(ErrorCode::dimension_mismatch, "operator not square");
  if (hermiticity_defect(m_) > 1e-12) {
    throw Error(ErrorCode::invalid_argument, "operator is not Hermitian");
  }
}

double HermitianOperator::hermiticity_defect(const Matrix& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

void fill_single_dot(const DotModel& model, double omega, double detuning, Matrix& h) {
  h.setZero(3, 3);
  h(level_one, level_one) = model.delta;
  h(level_trion, level_trion) = -detuning;
  h(level_trion, level_one) = h(level_one, level_trion) = 0.5 * omega;
  h(level_trion, level_zero) = h(level_zero, level_trion) = 0.5 * model.epsilon * omega;
}

void fill_two_dot(const DotModel& model, double omega, double detuning, Matrix& h) {
  Matrix single;
  fill_single_dot(model, omega, detuning, single);
  h.setZero(9, 9);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int k = 0; k < 3; ++k) {
        h(two_dot_index(a, b), two_dot_index(k, b)) += single(a, k);
        h(two_dot_index(a, b), two_dot_index(a, k)) += single(b, k);
      }
    }
  }
  const int xx = two_dot_index(level_trion, level_trion);
  h(xx, xx) += model.delta_e_ab;
}

HermitianOperator build_single_dot(const DotModel& model, double omega, double detuning) {
  require(finite(omega) && finite(detuning), "non-finite drive");
  Matrix h;
  fill_single_dot(model, omega, detuning, h);
  return HermitianOperator(std::move(h));
}

HermitianOperator build_two_dot(const DotModel& model, double omega, double detuning) {
  require(finite(omega) && finite(detuning), "non-finite drive");
  Matrix h;
  fill_two_dot(model, omega, detuning, h);
  return HermitianOperator(std::move(h));
}

DressedState dressed(double omega, double detuning) {
  require(finite(omega) && finite(detuning) && omega >= 0.0, "dressed: omega must be >= 0");
  if (omega == 0.0 && detuning == 0.0) {
    throw Error(ErrorCode::degenerate_dressing, "mixing angle undefined at omega = delta = 0");
  }
  DressedState d;
  d.theta = std::atan2(omega, -detuning);
  const double root = std::hypot(detuning, omega);
  d.e_plus = -0.5 * detuning + 0.5 * root;
  d.e_minus = -0.5 * detuning - 0.5 * root;
  const double s = std::sin(0.5 * d.theta);
  const double c = std::cos(0.5 * d.theta);
  d.plus_vec << s, c;
  d.minus_vec << c, -s;
  return d;
}

double effective_single_qubit_rabi(double omega1, double omega2, double epsilon, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::invalid_detuning, "detuning must be > 0");
  const double radicand = (omega1 * omega2 + epsilon * omega1 * omega1) / delta;
  if (radicand < 0.0) throw Error(ErrorCode::negative_radicand, "negative radicand");
  return std::sqrt(radicand);
}

}  // namespace qdgate
