#include "qdgate/readout.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include <unsupported/Eigen/MatrixFunctions>

#include "qdgate/error.hpp"
#include "qdgate/units.hpp"

namespace qdgate {

namespace {

using Complex = std::complex<double>;

Eigen::Vector3cd basis(int alpha) {
  if (alpha < 0 || alpha > 2) throw Error(ErrorCode::invalid_argument, "basis index must be 0..2");
  Eigen::Vector3cd v = Eigen::Vector3cd::Zero();
  v(alpha) = 1.0;
  return v;
}

double uniform_open(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = u(rng);
  while (x <= 0.0) x = u(rng);
  return x;
}

int collapse(const ReadoutConfig& cfg, std::mt19937_64& rng) {
  const double p0 = collapse_probabilities(cfg.epsilon).first;
  return uniform_open(rng) < p0 ? 0 : 1;
}

char detect(const ReadoutConfig& cfg, std::mt19937_64& rng) {
  return uniform_open(rng) <= cfg.eta ? 1 : 0;
}

}  // namespace

void ReadoutConfig::validate() const {
  const bool ok = omega >= 0.0 && std::isfinite(omega) && kappa > 0.0 && std::isfinite(kappa) &&
                  epsilon >= 0.0 && epsilon <= 1.0 && eta >= 0.0 && eta <= 1.0 && t_max > 0.0 &&
                  std::isfinite(t_max);
  if (!ok) throw Error(ErrorCode::invalid_argument, "invalid readout configuration");
}

Eigen::Matrix3cd effective_hamiltonian(const ReadoutConfig& cfg) {
  cfg.validate();
  const double e = cfg.epsilon;
  Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
  h(2, 1) = h(1, 2) = -0.5 * cfg.omega;
  h(2, 0) = h(0, 2) = -0.5 * cfg.omega * e;
  h(2, 2) = Complex(0.0, -0.5 * units::hbar_meV_ns * (1.0 + e * e) * cfg.kappa);
  return h;
}

DensityMatrix3 no_jump_rhs(const DensityMatrix3& r, const ReadoutConfig& cfg) {
  cfg.validate();
  const Complex i(0.0, 1.0);
  const double w = 0.5 * cfg.omega / units::hbar_meV_ns;  // Omega/2 as a rate
  const double e = cfg.epsilon;
  const double g = (1.0 + e * e) * cfg.kappa;
  DensityMatrix3 d;
  d(0, 0) = i * w * e * (r(2, 0) - r(0, 2));
  d(1, 1) = i * w * (r(2, 1) - r(1, 2));
  d(2, 2) = i * w * (r(1, 2) - r(2, 1) + e * (r(0, 2) - r(2, 0))) - g * r(2, 2);
  d(0, 1) = i * w * (e * r(2, 1) - r(0, 2));
  d(0, 2) = i * w * (e * (r(2, 2) - r(0, 0)) - r(0, 1)) - 0.5 * g * r(0, 2);
  d(1, 2) = i * w * (r(2, 2) - r(1, 1) - e * r(1, 0)) - 0.5 * g * r(1, 2);
  d(1, 0) = std::conj(d(0, 1));
  d(2, 0) = std::conj(d(0, 2));
  d(2, 1) = std::conj(d(1, 2));
  return d;
}

NoJumpPropagator::NoJumpPropagator(const ReadoutConfig& cfg) {
  generator_ = Complex(0.0, -1.0 / units::hbar_meV_ns) * effective_hamiltonian(cfg);
  const double scale = std::max(generator_.cwiseAbs().maxCoeff(), 1e-300);
  const double rabi_time = cfg.omega > 0.0 ? units::hbar_meV_ns / cfg.omega : 1.0 / cfg.kappa;
  max_step_ = std::min(rabi_time, 1.0 / cfg.kappa) / 50.0;
  const Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(generator_);
  right_ = es.eigenvectors();
  rates_ = es.eigenvalues();
  for (int k = 0; k < 3; ++k) {
    // Trace never grows: clip rounding that would give a positive real part.
    if (std::abs(rates_(k)) < 1e-12 * scale) rates_(k) = 0.0;
    if (rates_(k).real() > 0.0) rates_(k) = Complex(0.0, rates_(k).imag());
  }
  const Eigen::FullPivLU<Eigen::Matrix3cd> lu(right_);
  diagonalizable_ = lu.isInvertible() && lu.rcond() > 1e-8;
  if (diagonalizable_) {
    right_inverse_ = lu.inverse();
    const Eigen::Matrix3cd rebuilt = right_ * rates_.asDiagonal() * right_inverse_;
    diagonalizable_ = (rebuilt - generator_).cwiseAbs().maxCoeff() <= 1e-9 * scale;
  }
}

Eigen::Matrix3cd NoJumpPropagator::evolution(double t) const {
  if (!diagonalizable_) return (generator_ * t).exp();
  Eigen::Vector3cd e;
  for (int k = 0; k < 3; ++k) e(k) = std::exp(rates_(k) * t);
  return right_ * e.asDiagonal() * right_inverse_;
}

Eigen::Vector3cd NoJumpPropagator::apply(const Eigen::Vector3cd& psi, double t) const {
  return evolution(t) * psi;
}

DensityMatrix3 no_jump_evolve(const DensityMatrix3& rho, const ReadoutConfig& cfg, double dt) {
  const NoJumpPropagator prop(cfg);
  if (!(dt >= 0.0)) throw Error(ErrorCode::invalid_argument, "dt must be >= 0");
  if (dt > prop.max_step() * (1.0 + 1e-12)) {
    throw Error(ErrorCode::step_too_large, "dt exceeds min(hbar/omega, 1/kappa)/50");
  }
  const Eigen::Matrix3cd v = prop.evolution(dt);
  return v * rho * v.adjoint();
}

double survival_probability(int alpha, const ReadoutConfig& cfg, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::invalid_argument, "t must be >= 0");
  const NoJumpPropagator prop(cfg);
  return std::min(1.0, prop.apply(basis(alpha), t).squaredNorm());
}

std::pair<double, double> collapse_probabilities(double epsilon) {
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be >= 0");
  const double e2 = epsilon * epsilon;
  return {e2 / (1.0 + e2), 1.0 / (1.0 + e2)};
}

double post_first_jump_survival(const ReadoutConfig& cfg, double tau) {
  const NoJumpPropagator prop(cfg);
  const double e2 = cfg.epsilon * cfg.epsilon;
  const double p0 = std::min(1.0, prop.apply(basis(0), tau).squaredNorm());
  const double p1 = std::min(1.0, prop.apply(basis(1), tau).squaredNorm());
  return (e2 * p0 + p1) / (1.0 + e2);
}

std::size_t TrajectoryRecord::first_bunch() const {
  for (std::size_t k = 0; k < collapsed_to.size(); ++k) {
    if (collapsed_to[k] == 0) return k + 1;
  }
  return collapsed_to.size();
}

TrajectoryRecord simulate_trajectory(const ReadoutConfig& cfg, int initial, std::mt19937_64& rng) {
  cfg.validate();
  if (initial != 0 && initial != 1) throw Error(ErrorCode::invalid_argument, "initial must be 0 or 1");
  const NoJumpPropagator prop(cfg);
  const std::array<Eigen::Vector3cd, 2> start = {basis(0), basis(1)};
  TrajectoryRecord rec;
  double t = 0.0;
  int state = initial;
  while (true) {
    const double u = uniform_open(rng);
    const double remaining = cfg.t_max - t;
    auto survival = [&](double tau) { return prop.apply(start[state], tau).squaredNorm(); };
    if (!(remaining > 0.0) || survival(remaining) > u) break;
    double lo = 0.0, hi = remaining;
    while (hi - lo > 1e-13 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (survival(mid) > u ? lo : hi) = mid;
    }
    const double next = t + hi;
    if (!(next > t)) break;
    t = next;
    state = collapse(cfg, rng);
    rec.emission_times.push_back(t);
    rec.collapsed_to.push_back(state);
    rec.detected.push_back(detect(cfg, rng));
  }
  return rec;
}

TrajectoryRecord simulate_trajectory_bernoulli(const ReadoutConfig& cfg, int initial,
                                               std::mt19937_64& rng, double dt) {
  cfg.validate();
  if (initial != 0 && initial != 1) throw Error(ErrorCode::invalid_argument, "initial must be 0 or 1");
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "dt must be > 0");
  const NoJumpPropagator prop(cfg);
  const Eigen::Matrix3cd v = prop.evolution(dt);
  TrajectoryRecord rec;
  Eigen::Vector3cd psi = basis(initial);
  const auto steps = static_cast<std::size_t>(std::floor(cfg.t_max / dt));
  for (std::size_t k = 1; k <= steps; ++k) {
    const Eigen::Vector3cd next = v * psi;
    const double keep = next.squaredNorm();
    if (uniform_open(rng) < 1.0 - keep) {
      const int state = collapse(cfg, rng);
      psi = basis(state);
      rec.emission_times.push_back(static_cast<double>(k) * dt);
      rec.collapsed_to.push_back(state);
      rec.detected.push_back(detect(cfg, rng));
    } else {
      psi = next / std::sqrt(keep);
    }
  }
  return rec;
}

std::vector<TrajectoryRecord> simulate_ensemble(const ReadoutConfig& cfg, int initial,
                                                std::size_t count, std::uint64_t base_seed,
                                                Execution mode) {
  std::vector<TrajectoryRecord> out(count);
  const auto n = static_cast<long long>(count);
  auto run = [&](long long i) {
    std::mt19937_64 rng(base_seed + static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] = simulate_trajectory(cfg, initial, rng);
  };
  if (mode == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < n; ++i) run(i);
  } else {
    for (long long i = 0; i < n; ++i) run(i);
  }
  return out;
}

double detection_error(double epsilon, double eta, int n_terms) {
  if (!(epsilon >= 0.0) || !(eta >= 0.0 && eta <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "need epsilon >= 0 and eta in [0, 1]");
  }
  const double e2 = epsilon * epsilon;
  if (e2 + eta == 0.0) return 0.0;
  const double prefactor = e2 * (1.0 - eta) / (e2 + eta);
  if (n_terms < 0) return prefactor;
  return prefactor * (1.0 - std::pow((1.0 - eta) / (1.0 + e2), n_terms + 1));
}

MeasurementOptimum optimize_measurement_time(const ReadoutConfig& cfg, std::size_t grid,
                                             double relative_slack) {
  cfg.validate();
  if (grid < 2) throw Error(ErrorCode::invalid_argument, "grid needs >= 2 points");
  const NoJumpPropagator prop(cfg);
  const Eigen::Vector3cd s0 = basis(0), s1 = basis(1);
  auto err = [&](double t) {
    return prop.apply(s1, t).squaredNorm() + 1.0 - prop.apply(s0, t).squaredNorm();
  };
  std::vector<double> values(grid + 1);
  const double h = cfg.t_max / static_cast<double>(grid);
  for (std::size_t k = 0; k <= grid; ++k) values[k] = err(h * static_cast<double>(k));
  const auto it_min = std::min_element(values.begin(), values.end());
  const auto k_min = static_cast<std::size_t>(it_min - values.begin());
  MeasurementOptimum r;
  r.error_floor = *it_min;
  for (std::size_t k = 0; k < k_min; ++k) {
    if (values[k + 1] > values[k] + 1e-12) r.non_unimodal = true;
  }
  const double target = r.error_floor * (1.0 + relative_slack);
  std::size_t k = 0;
  while (k < grid && values[k] > target) ++k;
  if (k == 0) {
    r.t_opt = 0.0;
  } else {
    double lo = h * static_cast<double>(k - 1), hi = h * static_cast<double>(k);
    for (int it = 0; it < 80 && hi - lo > 1e-12 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (err(mid) > target ? lo : hi) = mid;
    }
    r.t_opt = hi;
  }
  r.error = err(r.t_opt);
  r.at_boundary = k >= grid;
  return r;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw Error(ErrorCode::invalid_argument, "empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::invalid_argument, "empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical(double alpha, double n_a, double n_b) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(n_a > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "need alpha in (0, 1) and n > 0");
  }
  const double c = std::sqrt(-0.5 * std::log(0.5 * alpha));
  const double n_eff = n_b > 0.0 ? n_a * n_b / (n_a + n_b) : n_a;
  return c / std::sqrt(n_eff);
}

}  // namespace qdgate
