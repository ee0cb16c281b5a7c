#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "qdgate/hamiltonians.hpp"

namespace qdgate {

using QuantumState = Vector;

struct PropagatorConfig {
  enum class Mode { adaptive, fixed_step };
  Mode mode = Mode::adaptive;
  double rel_tol = 1e-11;
  double abs_tol = 1e-12;
  double fixed_dt = 1e-3;  // ps
  std::size_t max_steps = 20'000'000;

  static PropagatorConfig adaptive(double rel_tol = 1e-11, double abs_tol = 1e-12);
  static PropagatorConfig fixed_step(double dt);
  void validate() const;
};

// Writes H(t) in meV into the supplied matrix.
using HamiltonianSource = std::function<void(double t, Matrix& h)>;

struct Propagation {
  Matrix state;                       // columns propagated side by side
  std::vector<double> sample_times;   // ps
  std::vector<Matrix> samples;        // state at each sample time
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

// Solves i hbar d(psi)/dt = H(t) psi from t0 to t1 (t1 < t0 integrates backwards) with an
// embedded Dormand-Prince 5(4) pair. When sample_dt > 0 the state is recorded at
// t0 + k*sample_dt and at t1; steps are clipped so the samples are hit exactly.
Propagation propagate(const HamiltonianSource& hamiltonian, const Matrix& psi0, double t0,
                      double t1, const PropagatorConfig& cfg, double sample_dt = 0.0);

QuantumState propagate_state(const HamiltonianSource& hamiltonian, const QuantumState& psi0,
                             double t0, double t1, const PropagatorConfig& cfg);

}  // namespace qdgate
