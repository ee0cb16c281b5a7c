#include "qdgate/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "qdgate/error.hpp"
#include "qdgate/fidelity.hpp"
#include "qdgate/units.hpp"

namespace qdgate {

namespace {

Matrix logical_inputs() {
  Matrix psi = Matrix::Zero(9, 4);
  for (int n = 0; n < 4; ++n) psi(logical_index[n], n) = 1.0;
  return psi;
}

void fill_branch_populations(const Matrix& psi, int branch, BranchSeries& out) {
  double a = 0.0, b = 0.0;
  for (int k = 0; k < 3; ++k) {
    a += std::norm(psi(two_dot_index(level_trion, k), branch));
    b += std::norm(psi(two_dot_index(k, level_trion), branch));
  }
  out.exciton_a.push_back(a);
  out.exciton_b.push_back(b);
  out.trion_pair.push_back(std::norm(psi(two_dot_index(level_trion, level_trion), branch)));
}

GateResult summarize(const Matrix& final_state) {
  GateResult r;
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) r.logical_map(m, n) = final_state(logical_index[m], n);
  }
  for (int n = 0; n < 4; ++n) {
    const auto i = static_cast<std::size_t>(n);
    r.phases[i] = wrap_phase(std::arg(r.logical_map(n, n)));
    const double norm2 = final_state.col(n).squaredNorm();
    const double logical = r.logical_map.col(n).squaredNorm();
    r.residual_exciton[i] = std::clamp(norm2 - logical, 0.0, 1.0);
    r.max_norm_drift = std::max(r.max_norm_drift, std::abs(1.0 - std::sqrt(norm2)));
  }
  r.gate_phase = gate_phase(r.phases);
  r.fidelity_no_bath = gate_fidelity_closed_system(r.logical_map, r.phases);
  return r;
}

}  // namespace

double wrap_phase(double phi) {
  const double two_pi = 2.0 * units::pi;
  double x = std::fmod(phi, two_pi);
  if (x <= -units::pi) x += two_pi;
  if (x > units::pi) x -= two_pi;
  return x;
}

double gate_phase(const std::array<double, 4>& p) {
  return wrap_phase(p[0] - p[1] - p[2] + p[3]);
}

GateResult run_rabi_gate(const DotModel& model, double omega_pi, double wait,
                         const PropagatorConfig& cfg) {
  model.validate();
  if (model.epsilon != 0.0) {
    throw Error(ErrorCode::nonzero_mixing, "the direct Rabi scheme requires epsilon = 0");
  }
  if (!(omega_pi > 0.0) || !(wait >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "omega_pi must be > 0 and wait >= 0");
  }
  // Laser resonant with |1> <-> |x>.
  const double detuning = -model.delta;
  const double t_pi = units::pi * units::hbar_meV_ps / omega_pi;
  auto segment = [&](double omega) {
    return HamiltonianSource([&model, omega, detuning](double, Matrix& h) {
      fill_two_dot(model, omega, detuning, h);
    });
  };
  Matrix psi = logical_inputs();
  psi = propagate(segment(omega_pi), psi, 0.0, t_pi, cfg).state;
  if (wait > 0.0) psi = propagate(segment(0.0), psi, t_pi, t_pi + wait, cfg).state;
  psi = propagate(segment(omega_pi), psi, t_pi + wait, 2.0 * t_pi + wait, cfg).state;
  return summarize(psi);
}

GateResult run_adiabatic_gate(const DotModel& model, const PulseSchedule& schedule,
                              const PropagatorConfig& cfg, double sample_dt) {
  model.validate();
  schedule.validate();
  if (schedule.shape != PulseShape::gaussian_chirped) {
    throw Error(ErrorCode::invalid_argument, "adiabatic gate needs a gaussian_chirped schedule");
  }
  if (sample_dt <= 0.0) sample_dt = std::min(schedule.tau_omega, schedule.tau_delta) / 200.0;
  const HamiltonianSource source = [&](double t, Matrix& h) {
    const PulseSample p = pulse_at(schedule, t);
    fill_two_dot(model, p.omega, p.delta, h);
  };
  const Propagation run =
      propagate(source, logical_inputs(), schedule.t_start, schedule.t_end, cfg, sample_dt);

  GateResult r = summarize(run.state);
  BranchRecords& rec = r.records;
  rec.t0 = schedule.t_start;
  rec.dt = sample_dt;
  // The final sample lands on t_end and is kept only if it continues the uniform grid.
  std::size_t n = run.sample_times.size();
  if (n >= 2) {
    const double expected = rec.t0 + static_cast<double>(n - 1) * sample_dt;
    if (std::abs(run.sample_times[n - 1] - expected) > 1e-9 * sample_dt) --n;
  }
  rec.theta.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const PulseSample p = pulse_at(schedule, rec.time(k));
    rec.theta.push_back(std::atan2(p.omega, -p.delta));
  }
  for (int b = 0; b < 4; ++b) {
    BranchSeries& series = rec.branches[static_cast<std::size_t>(b)];
    series.amplitudes.resize(9, static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      fill_branch_populations(run.samples[k], b, series);
      series.amplitudes.col(static_cast<Eigen::Index>(k)) = run.samples[k].col(b);
    }
  }
  return r;
}

double landau_zener(double omega, double sweep_rate) {
  if (!(sweep_rate > 0.0)) throw Error(ErrorCode::invalid_argument, "sweep_rate must be > 0");
  return std::exp(-units::pi * omega * omega / (4.0 * units::hbar_meV_ps * sweep_rate));
}

double landau_zener_two_level(double omega, double sweep_rate) {
  if (!(sweep_rate > 0.0)) throw Error(ErrorCode::invalid_argument, "sweep_rate must be > 0");
  return std::exp(-units::pi * omega * omega / (2.0 * units::hbar_meV_ps * sweep_rate));
}

double landau_zener_numeric(double omega, double sweep_rate, double span,
                            const PropagatorConfig& cfg) {
  if (!(sweep_rate > 0.0) || !(omega >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "sweep_rate must be > 0 and omega >= 0");
  }
  if (span <= 0.0) {
    span = std::max(40.0 * omega / sweep_rate, 10.0 * std::sqrt(units::hbar_meV_ps / sweep_rate));
  }
  const HamiltonianSource source = [omega, sweep_rate](double t, Matrix& h) {
    h.setZero(2, 2);
    h(0, 1) = h(1, 0) = 0.5 * omega;
    h(1, 1) = -sweep_rate * t;
  };
  const DressedState start = dressed(omega, -sweep_rate * span);
  const DressedState end = dressed(omega, sweep_rate * span);
  Vector psi0(2);
  psi0 << start.minus_vec(0), start.minus_vec(1);
  const QuantumState psi = propagate_state(source, psi0, -span, span, cfg);
  const Complex upper = end.plus_vec(0) * psi(0) + end.plus_vec(1) * psi(1);
  return std::norm(upper);
}

}  // namespace qdgate
