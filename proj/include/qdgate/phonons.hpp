#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qdgate/evolution.hpp"
#include "qdgate/kernels.hpp"
#include "qdgate/spectral.hpp"

namespace qdgate {

// Renormalized Rabi frequency Omega * exp(-1/2 int J/w^2 (1 + 2N)).
double renormalized_rabi(double omega, const PhononBath& bath, double rel_tol = 1e-8);
// Delta - 1/2 int J/w.
double renormalized_detuning(double delta, const PhononBath& bath, double rel_tol = 1e-8);
// 1/2 int J/w^2 (1 + 2N): the exponent of the Rabi renormalization.
double huang_rhys_exponent(const PhononBath& bath, double rel_tol = 1e-8);

// Bath-coupling weights of two branches on the uniform grid t0 + k*dt (ps).
struct CouplingRecord {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> f_alpha;
  std::vector<double> f_beta;

  void validate() const;
};

// logical: |0> (weight 0) against |1> following the lower dressed state (weight sin^2(theta/2)).
// dressed: |+> (cos^2(theta/2)) against |-> (sin^2(theta/2)), so a = cos(theta).
enum class SweepPair { logical, dressed };

// Constant omega, detuning rate*t over [-span, span].
CouplingRecord linear_sweep_record(double omega, double rate, double span, double dt,
                                   SweepPair pair = SweepPair::logical);

struct DephasingOptions {
  double rel_tol = 1e-8;
  double taper_fraction = 0.1;
  // Repeat on every other sample and fail if any exponent moves by more than resolution_tol.
  bool check_resolution = true;
  double resolution_tol = 0.01;
  bool compute_phase = true;
  // The bath phase renormalizes the coherent phases; when absorbed it is left out of T.
  bool absorb_phonon_phase = true;
  Execution execution = Execution::parallel;
};

struct DephasingResult {
  double gamma = 0.0;
  double phase = 0.0;
  double gamma_coarse = 0.0;  // same integral on the 2*dt grid
  double omega_max = 0.0;     // upper integration limit, meV
  std::size_t evaluations = 0;
};

// Gamma = 1/2 int J |a(w)|^2 (1 + 2N) for a = f_alpha - f_beta, and the bath phase.
DephasingResult dephasing_exponent(const CouplingRecord& record, const PhononBath& bath,
                                   const DephasingOptions& opts = DephasingOptions{});

// Closed form for a linear sweep: 1/2 int J K1^2(w/w_m) (1 + 2N) / w_m^2, w_m = hbar*rate/omega.
double dephasing_linear_sweep(double omega, double rate, const PhononBath& bath,
                              double rel_tol = 1e-8);

// Modified Bessel function K1 with a series below x = 1e-3.
double bessel_k1(double x);

enum class BathTopology { common, separate };

struct FidelityMatrix {
  Eigen::MatrixXcd with_bath;     // T(lambda)
  Eigen::MatrixXcd without_bath;  // T(0)
  Eigen::MatrixXd gamma;
  Eigen::MatrixXd phase;          // bath phase per pair, rad
  double omega_max = 0.0;
};

// 2x2 matrix over the two branches of a single-dot record.
FidelityMatrix fidelity_matrix(const CouplingRecord& record, const PhononBath& bath,
                               const DephasingOptions& opts = DephasingOptions{});

// 4x4 matrix over the logical branches of a two-dot gate. Each dot couples through its own
// exciton population. common: 1/4 int J (1+2N) [|A_a|^2 + |A_b|^2 + 2 Re(A_a A_b*) cos(2wd/u)];
// separate: sum over dots of 1/2 int J (1+2N) |A_dot|^2.
FidelityMatrix fidelity_matrix(const BranchRecords& records, const PhononBath& bath, double d_nm,
                               BathTopology topology,
                               const DephasingOptions& opts = DephasingOptions{},
                               const std::array<double, 4>& coherent_phases = {});

DephasingResult two_dot_dephasing(const BranchRecords& records, int alpha, int beta,
                                  const PhononBath& bath, double d_nm, BathTopology topology,
                                  const DephasingOptions& opts = DephasingOptions{});

// Largest |eigenvalue| of the Hermitian part of T(lambda) - T(0).
double infidelity(const Eigen::MatrixXcd& t_with, const Eigen::MatrixXcd& t_zero);
double infidelity(const FidelityMatrix& t);
// max |c^dagger (T(lambda) - T(0)) c| by random unit vectors plus local refinement.
double infidelity_search(const Eigen::MatrixXcd& t_with, const Eigen::MatrixXcd& t_zero,
                         int samples = 1000, std::uint64_t seed = 7);

// Order-of-magnitude estimate (J(w_m)/omega) exp(-alpha omega^2 / (hbar rate)).
double lz_phonon_assisted(double omega, double rate, const PhononBath& bath, double alpha = 1.0);

// J(omega)/hbar, 1/ps.
double rabi_damping_rate(double omega, const PhononBath& bath);
// 1/2 [1 + cos(omega_tilde t / hbar + phase) exp(-rate t)], t in ps.
double rabi_ground_population(double t, double omega_tilde, double phase, double rate);

// (J0/omega_gap) exp(-omega_gap/omega_m).
double optical_phonon_suppression(double omega_gap, double omega_m, double j0);

struct EnergyShift {
  double plus = 0.0;
  double minus = 0.0;
};

// Second-order shifts int J/4 {[1 +- cos(theta)]^2 / w + sin^2(theta) / (sqrt(D^2+O^2) + w)}.
EnergyShift perturbative_energy_shift(double theta, double delta, double omega,
                                      const PhononBath& bath, double rel_tol = 1e-10);
// Their adiabatic expansion 1/2 (1 +- cos) int J/w - sin^2/4 sqrt(D^2+O^2) int J/w^2.
EnergyShift adiabatic_expansion_shift(double theta, double delta, double omega,
                                      const PhononBath& bath, double rel_tol = 1e-10);

}  // namespace qdgate
