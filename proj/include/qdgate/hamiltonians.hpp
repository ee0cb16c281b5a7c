#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qdgate {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Per-dot basis order (|0>, |1>, |x>); two-dot states are indexed 3*a + b.
enum Level : int { level_zero = 0, level_one = 1, level_trion = 2 };

constexpr int two_dot_index(int level_a, int level_b) { return 3 * level_a + level_b; }

// Logical branches |00>, |01>, |10>, |11> in the 9-dim two-dot space.
inline constexpr int logical_index[4] = {two_dot_index(0, 0), two_dot_index(0, 1),
                                         two_dot_index(1, 0), two_dot_index(1, 1)};

enum class PulseShape { gaussian_chirped, constant, linear_sweep };

struct PulseSample {
  double omega;  // meV
  double delta;  // meV
};

struct PulseSchedule {
  PulseShape shape = PulseShape::gaussian_chirped;
  double omega0 = 0.0;      // meV
  double tau_omega = 1.0;   // ps
  double delta_inf = 0.0;   // meV; constant detuning for the constant shape
  double tau_delta = 1.0;   // ps
  double sweep_rate = 0.0;  // meV/ps, linear_sweep only
  double t_start = -1.0;    // ps
  double t_end = 1.0;       // ps

  static PulseSchedule gaussian_chirped(double omega0, double tau_omega, double delta_inf,
                                        double tau_delta, double t_start, double t_end);
  // Window [-window_widths*tau_omega, +window_widths*tau_omega].
  static PulseSchedule gaussian_chirped(double omega0, double tau_omega, double delta_inf,
                                        double tau_delta, double window_widths = 4.0);
  static PulseSchedule constant(double omega, double delta, double t_start, double t_end);
  static PulseSchedule linear_sweep(double omega, double rate, double t_start, double t_end);

  void validate() const;
};

PulseSample pulse_at(const PulseSchedule& schedule, double t);

struct DotModel {
  double epsilon = 0.0;     // hole mixing
  double delta = 0.0;       // logical splitting, meV
  double delta_e_ab = 0.0;  // trion-trion shift, meV

  void validate() const;
};

class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix m);
  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dimension() const noexcept { return m_.rows(); }
  // Largest |H - H^dagger| entry over the largest |H| entry.
  static double hermiticity_defect(const Matrix& m);

 private:
  Matrix m_;
};

// 3x3 in (|0>,|1>,|x>): diag(0, delta, -Delta), <x|H|1> = Omega/2, <x|H|0> = epsilon*Omega/2.
HermitianOperator build_single_dot(const DotModel& model, double omega, double detuning);

// H1 (x) I + I (x) H1 + delta_e_ab |xx><xx|.
HermitianOperator build_two_dot(const DotModel& model, double omega, double detuning);

// Allocation-free variants used inside propagation loops.
void fill_single_dot(const DotModel& model, double omega, double detuning, Matrix& h);
void fill_two_dot(const DotModel& model, double omega, double detuning, Matrix& h);

struct DressedState {
  double theta;    // rad, in [0, pi]
  double e_plus;   // meV
  double e_minus;  // meV
  Eigen::Vector2d plus_vec;   // components on (|1>, |x>)
  Eigen::Vector2d minus_vec;  // components on (|1>, |x>)
};

DressedState dressed(double omega, double detuning);

double effective_single_qubit_rabi(double omega1, double omega2, double epsilon, double delta);

}  // namespace qdgate
