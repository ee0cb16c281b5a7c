#include "qdgate/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "qdgate/error.hpp"
#include "qdgate/units.hpp"

namespace qdgate {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

class Stepper {
 public:
  Stepper(const HamiltonianSource& h, Eigen::Index rows, Eigen::Index cols)
      : source_(h), h_(rows, rows) {
    for (auto& k : k_) k.resize(rows, cols);
    tmp_.resize(rows, cols);
  }

  // d(psi)/dt = -i H psi / hbar
  void rhs(double t, const Matrix& y, Matrix& out) {
    source_(t, h_);
    out.noalias() = h_ * y;
    out *= Complex(0.0, -1.0 / units::hbar_meV_ps);
  }

  // One trial step of signed size dt; returns the scaled error norm and writes y_new.
  double trial(double t, double dt, const Matrix& y, Matrix& y_new, const PropagatorConfig& cfg,
               bool need_error) {
    auto& [k1, k2, k3, k4, k5, k6, k7] = k_;
    tmp_ = y + dt * a21 * k1;
    rhs(t + c2 * dt, tmp_, k2);
    tmp_ = y + dt * (a31 * k1 + a32 * k2);
    rhs(t + c3 * dt, tmp_, k3);
    tmp_ = y + dt * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * dt, tmp_, k4);
    tmp_ = y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * dt, tmp_, k5);
    tmp_ = y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + dt, tmp_, k6);
    y_new = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + dt, y_new, k7);
    if (!need_error) return 0.0;
    tmp_ = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err = 0.0;
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      for (Eigen::Index i = 0; i < y.rows(); ++i) {
        const double scale =
            cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y(i, j)), std::abs(y_new(i, j)));
        err = std::max(err, std::abs(tmp_(i, j)) / scale);
      }
    }
    return err;
  }

  Matrix& first() { return k_[0]; }
  void accept_fsal() { std::swap(k_[0], k_[6]); }
  double hamiltonian_scale(double t) {
    source_(t, h_);
    return h_.cwiseAbs().maxCoeff();
  }

 private:
  const HamiltonianSource& source_;
  Matrix h_;
  std::array<Matrix, 7> k_;
  Matrix tmp_;
};

}  // namespace

PropagatorConfig PropagatorConfig::adaptive(double rel_tol, double abs_tol) {
  PropagatorConfig c;
  c.mode = Mode::adaptive;
  c.rel_tol = rel_tol;
  c.abs_tol = abs_tol;
  c.validate();
  return c;
}

PropagatorConfig PropagatorConfig::fixed_step(double dt) {
  PropagatorConfig c;
  c.mode = Mode::fixed_step;
  c.fixed_dt = dt;
  c.validate();
  return c;
}

void PropagatorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(fixed_dt > 0.0) || max_steps == 0) {
    throw Error(ErrorCode::invalid_argument, "propagator tolerances and step must be > 0");
  }
}

Propagation propagate(const HamiltonianSource& hamiltonian, const Matrix& psi0, double t0,
                      double t1, const PropagatorConfig& cfg, double sample_dt) {
  cfg.validate();
  if (!std::isfinite(t0) || !std::isfinite(t1)) {
    throw Error(ErrorCode::invalid_argument, "propagation window must be finite");
  }
  Propagation out;
  out.state = psi0;
  const double span = std::abs(t1 - t0);
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  const bool sampling = sample_dt > 0.0;
  const std::size_t n_samples =
      sampling ? static_cast<std::size_t>(std::floor(span / sample_dt * (1.0 + 1e-12))) + 1 : 0;
  auto sample_time = [&](std::size_t k) { return t0 + dir * static_cast<double>(k) * sample_dt; };
  if (sampling) {
    out.sample_times.push_back(t0);
    out.samples.push_back(psi0);
  }
  if (span == 0.0) return out;

  Stepper stepper(hamiltonian, psi0.rows(), psi0.cols());
  Matrix& y = out.state;
  Matrix y_new(y.rows(), y.cols());
  double t = t0;
  stepper.rhs(t, y, stepper.first());

  const bool adaptive = cfg.mode == PropagatorConfig::Mode::adaptive;
  double h = adaptive ? 0.01 * units::hbar_meV_ps / std::max(stepper.hamiltonian_scale(t0), 1e-3)
                      : cfg.fixed_dt;
  h = std::min(h, span);
  std::size_t next_sample = 1;
  std::size_t steps = 0;

  while (dir * (t1 - t) > 0.0) {
    if (++steps > cfg.max_steps) {
      throw Error(ErrorCode::step_limit_exceeded,
                  "exceeded " + std::to_string(cfg.max_steps) + " steps");
    }
    double target = t1;
    bool to_sample = false;
    if (sampling && next_sample < n_samples) {
      const double ts = sample_time(next_sample);
      if (dir * (t1 - ts) > 1e-9 * sample_dt) {
        target = ts;
        to_sample = true;
      }
    }
    const double remaining = std::abs(target - t);
    double step = std::min(h, remaining);
    // Avoid leaving a sliver before the target.
    if (remaining - step < 1e-9 * step) step = remaining;
    const bool lands = step == remaining;

    const double err = stepper.trial(t, dir * step, y, y_new, cfg, adaptive);
    if (adaptive && !(err <= 1.0)) {
      ++out.rejected_steps;
      const double factor = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h = step * factor;
      if (h < 1e-14 * std::max(1.0, std::abs(t))) {
        throw Error(ErrorCode::tolerance_failure, "step size underflow at t = " + std::to_string(t));
      }
      continue;
    }
    ++out.accepted_steps;
    t = lands ? target : t + dir * step;
    y.swap(y_new);
    stepper.accept_fsal();
    if (adaptive) {
      const double factor = err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)))
                                      : 5.0;
      // A step clipped short of the controller's choice does not reset it.
      h = (lands && step < h) ? std::max(h, step * factor) : step * factor;
    }
    if (lands && to_sample) {
      out.sample_times.push_back(t);
      out.samples.push_back(y);
      ++next_sample;
    }
  }
  if (sampling && out.sample_times.back() != t) {
    out.sample_times.push_back(t);
    out.samples.push_back(y);
  }
  return out;
}

QuantumState propagate_state(const HamiltonianSource& hamiltonian, const QuantumState& psi0,
                             double t0, double t1, const PropagatorConfig& cfg) {
  return propagate(hamiltonian, psi0, t0, t1, cfg).state.col(0);
}

}  // namespace qdgate
