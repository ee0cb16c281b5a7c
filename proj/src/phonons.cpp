#include "qdgate/phonons.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <utility>

#include "qdgate/error.hpp"
#include "qdgate/fidelity.hpp"
#include "qdgate/quadrature.hpp"
#include "qdgate/units.hpp"

namespace qdgate {

namespace {

using Complex = std::complex<double>;

QuadratureOptions quad_options(double rel_tol) {
  QuadratureOptions o;
  o.rel_tol = rel_tol;
  return o;
}

double upper_limit(const PhononBath& bath) { return 10.0 * bath.omega_l(); }

std::vector<double> spectral_breakpoints(double upper) {
  return geometric_breakpoints(0.0, upper, 8, 0.3);
}

bool bath_is_silent(const PhononBath& bath) {
  return bath.calibration == 0.0 || spectral_j(bath, bath.omega_l()) == 0.0;
}

void require_superohmic(const PhononBath& bath) {
  if (bath_is_silent(bath)) return;
  const double wl = bath.omega_l();
  const double s = loglog_slope(bath, 1e-4 * wl, 1e-2 * wl);
  if (!(s > 1.0)) {
    throw Error(ErrorCode::divergent_integral,
                "spectral function is not superohmic (slope " + std::to_string(s) + ")");
  }
}

// int_0^{10 w_l} J(w) g(w) dw
double spectral_integral(const PhononBath& bath, const std::function<double(double)>& g,
                         double rel_tol) {
  bath.validate();
  if (bath_is_silent(bath)) return 0.0;
  const BatchIntegrand f = [&](const std::vector<double>& x, std::vector<double>& out) {
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = spectral_j(bath, x[k]) * g(x[k]);
  };
  return integrate_gk(f, 1, spectral_breakpoints(upper_limit(bath)), quad_options(rel_tol))
      .value[0];
}

// Signals: one per branch (dots == 1) or index 2*branch + dot (dots == 2).
struct PairLayout {
  int dots = 1;
  std::vector<std::pair<int, int>> pairs;
  double d_nm = 0.0;
  BathTopology topology = BathTopology::separate;
};

std::vector<double> gamma_pass(const RecordSpectra& spectra, const PairLayout& layout,
                               const PhononBath& bath, double lo, double hi,
                               const DephasingOptions& opts, std::size_t& evaluations,
                               double abs_tol = 0.0) {
  const std::size_t m = layout.pairs.size();
  const std::size_t n_sig = spectra.signal_count();
  const double temperature = bath.temperature_K;
  const double d_m = layout.d_nm * units::metre_per_nm;
  const BatchIntegrand f = [&](const std::vector<double>& x, std::vector<double>& out) {
    std::vector<Complex> amp;
    spectra.transform(x, amp, opts.execution);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double w = x[k];
      const double weight = 0.5 * spectral_j(bath, w) * thermal_weight(w, temperature);
      const Complex* a = amp.data() + k * n_sig;
      const double q = w * units::joule_per_meV / (units::hbar_J_s * bath.material.u_m_s);
      const double interference = std::cos(2.0 * q * d_m);
      for (std::size_t p = 0; p < m; ++p) {
        const auto [al, be] = layout.pairs[p];
        double g;
        if (layout.dots == 1) {
          g = std::norm(a[al] - a[be]);
        } else {
          const Complex a0 = a[2 * al] - a[2 * be];
          const Complex a1 = a[2 * al + 1] - a[2 * be + 1];
          if (layout.topology == BathTopology::common) {
            g = 0.5 * (std::norm(a0) + std::norm(a1) +
                       2.0 * std::real(a0 * std::conj(a1)) * interference);
          } else {
            g = std::norm(a0) + std::norm(a1);
          }
        }
        out[k * m + p] = weight * g;
      }
    }
  };
  QuadratureOptions qo = quad_options(opts.rel_tol);
  qo.abs_tol = abs_tol;
  const auto r = integrate_gk(f, m, geometric_breakpoints(lo, hi, lo == 0.0 ? 8 : 0, 0.3), qo);
  evaluations += r.evaluations;
  return r.value;
}

std::vector<double> phase_pass(const RecordSpectra& spectra, const PairLayout& layout,
                               const PhononBath& bath, double hi, const DephasingOptions& opts,
                               std::size_t& evaluations) {
  // Per dot and pair: O(b,b) - O(a,a) + O(a,b) - O(b,a), summed over dots.
  std::vector<std::pair<int, int>> sine_pairs;
  for (const auto& [al, be] : layout.pairs) {
    for (int dot = 0; dot < layout.dots; ++dot) {
      const int a = layout.dots == 1 ? al : 2 * al + dot;
      const int b = layout.dots == 1 ? be : 2 * be + dot;
      sine_pairs.insert(sine_pairs.end(), {{b, b}, {a, a}, {a, b}, {b, a}});
    }
  }
  const std::size_t m = layout.pairs.size();
  const std::size_t per_pair = 4 * static_cast<std::size_t>(layout.dots);
  const double inv_hbar2 = 1.0 / (units::hbar_meV_ps * units::hbar_meV_ps);
  const BatchIntegrand f = [&](const std::vector<double>& x, std::vector<double>& out) {
    std::vector<double> o;
    spectra.ordered_sine(x, sine_pairs, o, opts.execution);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double j = spectral_j(bath, x[k]) * inv_hbar2;
      const double* ok = o.data() + k * sine_pairs.size();
      for (std::size_t p = 0; p < m; ++p) {
        double s = 0.0;
        for (std::size_t d = 0; d < per_pair; d += 4) {
          const double* q = ok + p * per_pair + d;
          s += q[0] - q[1] + q[2] - q[3];
        }
        out[k * m + p] = j * s;
      }
    }
  };
  QuadratureOptions qo = quad_options(std::max(opts.rel_tol, 1e-6));
  qo.abs_tol = 1e-12;
  const auto r = integrate_gk(f, m, spectral_breakpoints(hi), qo);
  evaluations += r.evaluations;
  return r.value;
}

struct GammaOutcome {
  std::vector<double> gamma;
  std::vector<double> gamma_coarse;
  std::vector<double> phase;
  double omega_max = 0.0;
  std::size_t evaluations = 0;
};

GammaOutcome run_gammas(std::vector<std::vector<double>> signals, double t0, double dt,
                        const PairLayout& layout, const PhononBath& bath,
                        const DephasingOptions& opts) {
  bath.validate();
  GammaOutcome out;
  const std::size_t m = layout.pairs.size();
  out.gamma.assign(m, 0.0);
  out.gamma_coarse.assign(m, 0.0);
  out.phase.assign(m, 0.0);
  if (bath_is_silent(bath) || m == 0) return out;
  require_superohmic(bath);

  const RecordSpectra fine(std::move(signals), t0, dt, opts.taper_fraction);
  // A quarter of the Nyquist frequency keeps the 2*dt comparison free of aliasing.
  const double hi = std::min(upper_limit(bath), 0.25 * fine.nyquist());
  out.omega_max = hi;
  out.gamma = gamma_pass(fine, layout, bath, 0.0, hi, opts, out.evaluations);
  const double largest = *std::max_element(out.gamma.begin(), out.gamma.end());

  if (opts.check_resolution && largest > 0.0) {
    if (fine.sample_count() < 5) {
      throw Error(ErrorCode::unresolved_spectrum, "record too short for the resolution check");
    }
    const RecordSpectra coarse = fine.subsampled(2);
    out.gamma_coarse = gamma_pass(coarse, layout, bath, 0.0, hi, opts, out.evaluations);
    for (std::size_t p = 0; p < m; ++p) {
      const double scale = std::max(out.gamma[p], 1e-3 * largest);
      if (std::abs(out.gamma_coarse[p] - out.gamma[p]) > opts.resolution_tol * scale) {
        throw Error(ErrorCode::unresolved_spectrum,
                    "dephasing exponent changes by more than " +
                        std::to_string(100.0 * opts.resolution_tol) + "% when dt is doubled");
      }
    }
    // Truncated below the phonon cutoff: the upper half of the range must be negligible.
    if (hi < upper_limit(bath)) {
      // Only needs resolving down to a fraction of the acceptance threshold.
      const auto tail = gamma_pass(fine, layout, bath, 0.5 * hi, hi, opts, out.evaluations,
                                   1e-2 * opts.resolution_tol * 1e-3 * largest);
      for (std::size_t p = 0; p < m; ++p) {
        if (tail[p] > opts.resolution_tol * std::max(out.gamma[p], 1e-3 * largest)) {
          throw Error(ErrorCode::unresolved_spectrum,
                      "record sampling truncates the spectral integral");
        }
      }
    }
  } else {
    out.gamma_coarse = out.gamma;
  }
  if (opts.compute_phase) out.phase = phase_pass(fine, layout, bath, hi, opts, out.evaluations);
  return out;
}

FidelityMatrix assemble(std::size_t dim, const PairLayout& layout, const GammaOutcome& g,
                        const std::vector<double>& coherent, const DephasingOptions& opts) {
  FidelityMatrix t;
  const auto n = static_cast<Eigen::Index>(dim);
  t.gamma = Eigen::MatrixXd::Zero(n, n);
  t.phase = Eigen::MatrixXd::Zero(n, n);
  t.without_bath.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      t.without_bath(a, b) = std::polar(1.0, coherent[static_cast<std::size_t>(b)] -
                                                 coherent[static_cast<std::size_t>(a)]);
    }
  }
  for (std::size_t p = 0; p < layout.pairs.size(); ++p) {
    const auto [a, b] = layout.pairs[p];
    t.gamma(a, b) = t.gamma(b, a) = g.gamma[p];
    t.phase(a, b) = g.phase[p];
    t.phase(b, a) = -g.phase[p];
  }
  t.with_bath = t.without_bath;
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      Complex factor = std::exp(-t.gamma(a, b));
      if (!opts.absorb_phonon_phase) factor *= std::polar(1.0, t.phase(a, b));
      t.with_bath(a, b) *= factor;
    }
  }
  t.omega_max = g.omega_max;
  return t;
}

std::vector<std::vector<double>> two_dot_signals(const BranchRecords& records) {
  if (records.size() < 2 || !(records.dt > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "branch records need a uniform grid of >= 2 samples");
  }
  std::vector<std::vector<double>> signals;
  for (const auto& branch : records.branches) {
    if (branch.exciton_a.size() != records.size() || branch.exciton_b.size() != records.size()) {
      throw Error(ErrorCode::dimension_mismatch, "branch series length mismatch");
    }
    signals.push_back(branch.exciton_a);
    signals.push_back(branch.exciton_b);
  }
  return signals;
}

}  // namespace

double huang_rhys_exponent(const PhononBath& bath, double rel_tol) {
  require_superohmic(bath);
  const double temperature = bath.temperature_K;
  return 0.5 * spectral_integral(
                   bath, [temperature](double w) { return thermal_weight(w, temperature) / (w * w); },
                   rel_tol);
}

double renormalized_rabi(double omega, const PhononBath& bath, double rel_tol) {
  return omega * std::exp(-huang_rhys_exponent(bath, rel_tol));
}

double renormalized_detuning(double delta, const PhononBath& bath, double rel_tol) {
  require_superohmic(bath);
  return delta - 0.5 * spectral_integral(bath, [](double w) { return 1.0 / w; }, rel_tol);
}

void CouplingRecord::validate() const {
  if (!(dt > 0.0) || f_alpha.size() != f_beta.size() || f_alpha.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "coupling record needs dt > 0 and equal series");
  }
  for (std::size_t k = 0; k < f_alpha.size(); ++k) {
    if (!(std::abs(f_alpha[k]) <= 1.0) || !(std::abs(f_beta[k]) <= 1.0)) {
      throw Error(ErrorCode::invalid_argument, "coupling weights must lie in [-1, 1]");
    }
  }
}

CouplingRecord linear_sweep_record(double omega, double rate, double span, double dt,
                                   SweepPair pair) {
  if (!(rate > 0.0) || !(span > 0.0) || !(dt > 0.0) || !(omega >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "linear sweep record needs positive parameters");
  }
  CouplingRecord r;
  r.t0 = -span;
  r.dt = dt;
  const auto n = static_cast<std::size_t>(std::floor(2.0 * span / dt)) + 1;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = r.t0 + static_cast<double>(k) * dt;
    const double theta = std::atan2(omega, -rate * t);
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    r.f_alpha.push_back(pair == SweepPair::logical ? 0.0 : c * c);
    r.f_beta.push_back(s * s);
  }
  return r;
}

DephasingResult dephasing_exponent(const CouplingRecord& record, const PhononBath& bath,
                                   const DephasingOptions& opts) {
  record.validate();
  PairLayout layout;
  layout.pairs = {{0, 1}};
  const auto g =
      run_gammas({record.f_alpha, record.f_beta}, record.t0, record.dt, layout, bath, opts);
  DephasingResult r;
  r.gamma = g.gamma[0];
  r.gamma_coarse = g.gamma_coarse[0];
  r.phase = g.phase[0];
  r.omega_max = g.omega_max;
  r.evaluations = g.evaluations;
  return r;
}

double bessel_k1(double x) {
  if (!(x > 0.0)) throw Error(ErrorCode::invalid_argument, "K1 needs x > 0");
  if (x < 1e-3) {
    constexpr double euler_gamma = 0.57721566490153286;
    return 1.0 / x + 0.5 * x * (std::log(0.5 * x) + euler_gamma - 0.5);
  }
  if (x > 700.0) return 0.0;
  return std::cyl_bessel_k(1.0, x);
}

double dephasing_linear_sweep(double omega, double rate, const PhononBath& bath, double rel_tol) {
  if (!(omega > 0.0) || !(rate > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "linear sweep needs omega > 0 and rate > 0");
  }
  bath.validate();
  if (bath_is_silent(bath)) return 0.0;
  const double wm = units::hbar_meV_ps * rate / omega;
  const double temperature = bath.temperature_K;
  const double upper = std::min(upper_limit(bath), 60.0 * wm);
  std::vector<double> bp{0.0};
  for (double s : {1e-4, 1e-3, 1e-2, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0}) {
    if (s * wm < upper) bp.push_back(s * wm);
  }
  bp.push_back(upper);
  const BatchIntegrand f = [&](const std::vector<double>& x, std::vector<double>& out) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double k1 = bessel_k1(x[k] / wm);
      out[k] = spectral_j(bath, x[k]) * k1 * k1 * thermal_weight(x[k], temperature);
    }
  };
  return 0.5 * integrate_gk(f, 1, bp, quad_options(rel_tol)).value[0] / (wm * wm);
}

FidelityMatrix fidelity_matrix(const CouplingRecord& record, const PhononBath& bath,
                               const DephasingOptions& opts) {
  record.validate();
  PairLayout layout;
  layout.pairs = {{0, 1}};
  const auto g =
      run_gammas({record.f_alpha, record.f_beta}, record.t0, record.dt, layout, bath, opts);
  return assemble(2, layout, g, {0.0, 0.0}, opts);
}

FidelityMatrix fidelity_matrix(const BranchRecords& records, const PhononBath& bath, double d_nm,
                               BathTopology topology, const DephasingOptions& opts,
                               const std::array<double, 4>& coherent_phases) {
  if (!(d_nm >= 0.0)) throw Error(ErrorCode::invalid_argument, "dot separation must be >= 0");
  PairLayout layout;
  layout.dots = 2;
  layout.d_nm = d_nm;
  layout.topology = topology;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) layout.pairs.emplace_back(a, b);
  }
  const auto g = run_gammas(two_dot_signals(records), records.t0, records.dt, layout, bath, opts);
  return assemble(4, layout, g,
                  std::vector<double>(coherent_phases.begin(), coherent_phases.end()), opts);
}

DephasingResult two_dot_dephasing(const BranchRecords& records, int alpha, int beta,
                                  const PhononBath& bath, double d_nm, BathTopology topology,
                                  const DephasingOptions& opts) {
  if (alpha < 0 || alpha > 3 || beta < 0 || beta > 3) {
    throw Error(ErrorCode::invalid_argument, "branch index out of range");
  }
  if (!(d_nm >= 0.0)) throw Error(ErrorCode::invalid_argument, "dot separation must be >= 0");
  PairLayout layout;
  layout.dots = 2;
  layout.d_nm = d_nm;
  layout.topology = topology;
  layout.pairs = {{alpha, beta}};
  const auto g = run_gammas(two_dot_signals(records), records.t0, records.dt, layout, bath, opts);
  DephasingResult r;
  r.gamma = g.gamma[0];
  r.gamma_coarse = g.gamma_coarse[0];
  r.phase = g.phase[0];
  r.omega_max = g.omega_max;
  r.evaluations = g.evaluations;
  return r;
}

double infidelity(const Eigen::MatrixXcd& t_with, const Eigen::MatrixXcd& t_zero) {
  if (t_with.rows() != t_zero.rows() || t_with.cols() != t_zero.cols() ||
      t_with.rows() != t_with.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "fidelity matrices must be square and equal size");
  }
  const Eigen::MatrixXcd m = t_with - t_zero;
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double infidelity(const FidelityMatrix& t) { return infidelity(t.with_bath, t.without_bath); }

double infidelity_search(const Eigen::MatrixXcd& t_with, const Eigen::MatrixXcd& t_zero,
                         int samples, std::uint64_t seed) {
  if (t_with.rows() != t_zero.rows() || t_with.cols() != t_zero.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "fidelity matrices must have equal size");
  }
  const Eigen::MatrixXcd diff = t_with - t_zero;
  const Eigen::Index n = diff.rows();
  const double scale = diff.cwiseAbs().maxCoeff();
  if (n == 0 || scale == 0.0) return 0.0;
  // Unit-scale objective so the quasi-Newton tolerances are meaningful.
  const Eigen::MatrixXcd m = diff / scale;
  auto to_vec = [n](const Eigen::VectorXd& x) {
    Eigen::VectorXcd c(n);
    for (Eigen::Index i = 0; i < n; ++i) c(i) = Complex(x(2 * i), x(2 * i + 1));
    const double norm = c.norm();
    return norm > 0.0 ? Eigen::VectorXcd(c / norm) : c;
  };
  auto value = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXcd c = to_vec(x);
    return std::abs(c.dot(m * c));
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double best = 0.0;
  Eigen::VectorXd best_x = Eigen::VectorXd::Zero(2 * n);
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd x(2 * n);
    for (Eigen::Index i = 0; i < 2 * n; ++i) x(i) = gauss(rng);
    const double v = value(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  const Eigen::VectorXd refined = minimize_quasi_newton(
      [&](const Eigen::VectorXd& x) { return -value(x); }, best_x, 200);
  return scale * std::max(best, value(refined));
}

double lz_phonon_assisted(double omega, double rate, const PhononBath& bath, double alpha) {
  if (!(omega > 0.0) || !(rate > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "estimate needs omega > 0 and rate > 0");
  }
  const double wm = units::hbar_meV_ps * rate / omega;
  return spectral_j(bath, wm) / omega *
         std::exp(-alpha * omega * omega / (units::hbar_meV_ps * rate));
}

double rabi_damping_rate(double omega, const PhononBath& bath) {
  if (!(omega > 0.0)) throw Error(ErrorCode::invalid_argument, "damping rate needs omega > 0");
  return spectral_j(bath, omega) / units::hbar_meV_ps;
}

double rabi_ground_population(double t, double omega_tilde, double phase, double rate) {
  return 0.5 * (1.0 + std::cos(omega_tilde * t / units::hbar_meV_ps + phase) * std::exp(-rate * t));
}

double optical_phonon_suppression(double omega_gap, double omega_m, double j0) {
  if (!(omega_gap > 0.0) || !(j0 >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "optical gap must be > 0 and J0 >= 0");
  }
  if (!(omega_m > 0.0)) return 0.0;
  return j0 / omega_gap * std::exp(-omega_gap / omega_m);
}

EnergyShift perturbative_energy_shift(double theta, double delta, double omega,
                                      const PhononBath& bath, double rel_tol) {
  require_superohmic(bath);
  const double c = std::cos(theta), s2 = std::sin(theta) * std::sin(theta);
  const double split = std::hypot(delta, omega);
  EnergyShift e;
  e.plus = 0.25 * spectral_integral(
                      bath, [&](double w) { return (1 + c) * (1 + c) / w + s2 / (split + w); },
                      rel_tol);
  e.minus = 0.25 * spectral_integral(
                       bath, [&](double w) { return (1 - c) * (1 - c) / w + s2 / (split + w); },
                       rel_tol);
  return e;
}

EnergyShift adiabatic_expansion_shift(double theta, double delta, double omega,
                                      const PhononBath& bath, double rel_tol) {
  require_superohmic(bath);
  const double c = std::cos(theta), s2 = std::sin(theta) * std::sin(theta);
  const double split = std::hypot(delta, omega);
  const double i1 = spectral_integral(bath, [](double w) { return 1.0 / w; }, rel_tol);
  const double i2 = spectral_integral(bath, [](double w) { return 1.0 / (w * w); }, rel_tol);
  return {0.5 * (1 + c) * i1 - 0.25 * s2 * split * i2, 0.5 * (1 - c) * i1 - 0.25 * s2 * split * i2};
}

}  // namespace qdgate
