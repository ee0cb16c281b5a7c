#pragma once

#include <array>
#include <vector>

#include "qdgate/hamiltonians.hpp"
#include "qdgate/integrator.hpp"

namespace qdgate {

// Time series of one logical branch on the uniform grid t0 + k*dt.
struct BranchSeries {
  std::vector<double> exciton_a;  // trion population of dot a
  std::vector<double> exciton_b;  // trion population of dot b
  std::vector<double> trion_pair; // population of |xx>
  Matrix amplitudes;              // 9 x n_samples
};

struct BranchRecords {
  double t0 = 0.0;  // ps
  double dt = 0.0;  // ps
  std::vector<double> theta;  // dressed angle of the common drive, rad
  std::array<BranchSeries, 4> branches;

  std::size_t size() const { return theta.size(); }
  double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
};

struct GateResult {
  std::array<double, 4> phases{};             // rad, in (-pi, pi]
  double gate_phase = 0.0;                    // rad, in (-pi, pi]
  std::array<double, 4> residual_exciton{};   // population outside the logical subspace
  double fidelity_no_bath = 0.0;
  Eigen::Matrix4cd logical_map;               // <m|U|n> over logical branches
  double max_norm_drift = 0.0;                // max |1 - ||psi_n||| at the end
  BranchRecords records;
};

// (-pi, pi]
double wrap_phase(double phi);

double gate_phase(const std::array<double, 4>& phases);

// Direct scheme: resonant pi-pulse of strength omega_pi on both dots, free wait, pi-pulse.
GateResult run_rabi_gate(const DotModel& model, double omega_pi, double wait,
                         const PropagatorConfig& cfg = PropagatorConfig{});

// Chirped adiabatic passage on both dots; propagates the full 9-dim system.
// sample_dt <= 0 selects min(tau_omega, tau_delta)/200.
GateResult run_adiabatic_gate(const DotModel& model, const PulseSchedule& schedule,
                              const PropagatorConfig& cfg = PropagatorConfig{},
                              double sample_dt = 0.0);

double landau_zener(double omega, double sweep_rate);

// Standard two-level result for a coupling omega/2, exp(-pi*omega^2/(2*hbar*rate)).
double landau_zener_two_level(double omega, double sweep_rate);

// Final upper-dressed-state population after a linear sweep over [-span, span] ps starting in
// the lower dressed state. span <= 0 selects the default max(40*omega/rate, 10*sqrt(hbar/rate)).
double landau_zener_numeric(double omega, double sweep_rate, double span = 0.0,
                            const PropagatorConfig& cfg = PropagatorConfig{});

}  // namespace qdgate
