#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qdgate/kernels.hpp"

namespace qdgate {

// Readout times are in ns.
struct ReadoutConfig {
  double omega = 3.0;    // meV
  double kappa = 1.0;    // 1/ns
  double epsilon = 0.1;
  double eta = 1.0;      // detector efficiency
  double t_max = 200.0;  // ns
  std::uint64_t seed = 1;

  void validate() const;
};

using DensityMatrix3 = Eigen::Matrix3cd;

// Non-Hermitian generator in meV over (|0>, |1>, |x>):
// -(omega/2)(|x><1| + eps |x><0| + h.c.) - i hbar (1 + eps^2) kappa/2 |x><x|.
Eigen::Matrix3cd effective_hamiltonian(const ReadoutConfig& cfg);

// Right-hand side of the conditional no-jump equations written out entry by entry, 1/ns.
DensityMatrix3 no_jump_rhs(const DensityMatrix3& rho, const ReadoutConfig& cfg);

// Exact no-jump propagator exp(-i H_eff t / hbar) from one eigendecomposition.
class NoJumpPropagator {
 public:
  explicit NoJumpPropagator(const ReadoutConfig& cfg);
  Eigen::Matrix3cd evolution(double t) const;
  Eigen::Vector3cd apply(const Eigen::Vector3cd& psi, double t) const;
  // Largest stable step for no_jump_evolve, min(hbar/omega, 1/kappa)/50.
  double max_step() const { return max_step_; }

 private:
  Eigen::Matrix3cd generator_;  // -i H_eff / hbar, 1/ns
  Eigen::Matrix3cd right_;
  Eigen::Matrix3cd right_inverse_;
  Eigen::Vector3cd rates_;
  bool diagonalizable_ = true;
  double max_step_ = 0.0;
};

// One exact step rho -> V rho V^dagger; StepTooLarge when dt exceeds the resolution bound.
DensityMatrix3 no_jump_evolve(const DensityMatrix3& rho, const ReadoutConfig& cfg, double dt);

// Trace of the no-jump evolution of |alpha><alpha|, alpha in {0, 1, 2}.
double survival_probability(int alpha, const ReadoutConfig& cfg, double t);

// (p0, p1) = (eps^2, 1) / (1 + eps^2)
std::pair<double, double> collapse_probabilities(double epsilon);

double post_first_jump_survival(const ReadoutConfig& cfg, double tau);

struct TrajectoryRecord {
  std::vector<double> emission_times;  // ns, strictly increasing
  std::vector<int> collapsed_to;       // 0 or 1
  std::vector<char> detected;

  // Photons up to and including the first collapse into |0>, or all of them if none.
  std::size_t first_bunch() const;
};

// Waiting-time sampling: draw u, evolve until the no-jump trace reaches u, emit, collapse.
TrajectoryRecord simulate_trajectory(const ReadoutConfig& cfg, int initial, std::mt19937_64& rng);

// First-order alternative: per step of size dt, emit with probability 1 - tr(rho(t+dt))/tr(rho(t)).
TrajectoryRecord simulate_trajectory_bernoulli(const ReadoutConfig& cfg, int initial,
                                               std::mt19937_64& rng, double dt);

// Trajectory i uses its own generator seeded with base_seed + i.
std::vector<TrajectoryRecord> simulate_ensemble(const ReadoutConfig& cfg, int initial,
                                                std::size_t count, std::uint64_t base_seed,
                                                Execution mode = Execution::parallel);

// eps^2 (1-eta)/(eps^2+eta) [1 - ((1-eta)/(1+eps^2))^(N+1)]; n_terms < 0 means N = infinity.
double detection_error(double epsilon, double eta, int n_terms = -1);

struct MeasurementOptimum {
  double t_opt = 0.0;        // ns
  double error = 0.0;        // P1(t_opt) + 1 - P0(t_opt)
  double error_floor = 0.0;  // smallest error on the scan grid
  bool at_boundary = false;  // t_opt in the last grid cell
  bool non_unimodal = false; // the scanned error was not monotone before its minimum
};

// Error budget err(t) = P1(t) + 1 - P0(t). Its infimum is approached only asymptotically, so
// t_opt is the earliest time with err <= floor * (1 + relative_slack).
MeasurementOptimum optimize_measurement_time(const ReadoutConfig& cfg, std::size_t grid = 4000,
                                             double relative_slack = 1e-3);

// Kolmogorov-Smirnov statistics and the asymptotic critical value c(alpha) * sqrt(scale).
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);
double ks_critical(double alpha, double n_a, double n_b = 0.0);

}  // namespace qdgate
