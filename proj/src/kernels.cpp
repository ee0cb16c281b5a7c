#include "qdgate/kernels.hpp"

#include <cmath>

#include "qdgate/error.hpp"
#include "qdgate/units.hpp"

namespace qdgate {

namespace {

using Complex = std::complex<double>;

// Tukey window over n points with the given total taper fraction.
double tukey(std::size_t k, std::size_t n, double fraction) {
  if (n < 2 || fraction <= 0.0) return 1.0;
  const double x = static_cast<double>(k) / static_cast<double>(n - 1);
  const double edge = 0.5 * fraction;
  if (x < edge) {
    const double s = std::sin(0.5 * units::pi * x / edge);
    return s * s;
  }
  if (x > 1.0 - edge) {
    const double s = std::sin(0.5 * units::pi * (1.0 - x) / edge);
    return s * s;
  }
  return 1.0;
}

// Phasors exp(i*w*(start + k*step)) re-anchored every 64 steps to bound drift.
class PhasorWalk {
 public:
  PhasorWalk(double w, double start, double step)
      : w_(w), start_(start), step_(step), rot_(std::polar(1.0, w * step)) {}
  Complex at(std::size_t k) {
    if (k % 64 == 0) {
      cur_ = std::polar(1.0, w_ * (start_ + static_cast<double>(k) * step_));
    } else {
      cur_ *= rot_;
    }
    return cur_;
  }

 private:
  double w_, start_, step_;
  Complex rot_;
  Complex cur_{1.0, 0.0};
};

}  // namespace

RecordSpectra::RecordSpectra(std::vector<std::vector<double>> signals, double t0, double dt,
                             double taper_fraction)
    : signals_(std::move(signals)), t0_(t0), dt_(dt), taper_fraction_(taper_fraction) {
  if (!(dt > 0.0) || !std::isfinite(t0) || !(taper_fraction >= 0.0 && taper_fraction < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "record grid needs dt > 0 and a taper in [0, 1)");
  }
  for (const auto& s : signals_) {
    if (s.size() != sample_count() || s.size() < 2) {
      throw Error(ErrorCode::dimension_mismatch, "record signals need equal length >= 2");
    }
  }
  const std::size_t n = sample_count();
  tapered_steps_.resize(signals_.size());
  for (std::size_t s = 0; s < signals_.size(); ++s) {
    auto& steps = tapered_steps_[s];
    steps.resize(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      steps[k] = tukey(k, n - 1, taper_fraction_) * (signals_[s][k + 1] - signals_[s][k]);
    }
  }
}

RecordSpectra RecordSpectra::subsampled(std::size_t stride) const {
  if (stride == 0) throw Error(ErrorCode::invalid_argument, "stride must be >= 1");
  std::vector<std::vector<double>> out(signals_.size());
  for (std::size_t s = 0; s < signals_.size(); ++s) {
    for (std::size_t k = 0; k < sample_count(); k += stride) out[s].push_back(signals_[s][k]);
  }
  return RecordSpectra(std::move(out), t0_, dt_ * static_cast<double>(stride), taper_fraction_);
}

double RecordSpectra::nyquist() const { return units::pi * units::hbar_meV_ps / dt_; }

void RecordSpectra::transform_one(double omega, Complex* out) const {
  const double w = omega / units::hbar_meV_ps;
  const std::size_t m = signals_.size();
  for (std::size_t s = 0; s < m; ++s) out[s] = 0.0;
  if (omega == 0.0) return;
  PhasorWalk walk(-w, t0_ + 0.5 * dt_, dt_);
  const std::size_t n = sample_count() - 1;
  for (std::size_t k = 0; k < n; ++k) {
    const Complex e = walk.at(k);
    for (std::size_t s = 0; s < m; ++s) out[s] += tapered_steps_[s][k] * e;
  }
  // Summation by parts: dt * sum a_j e^{-i w t_j} = dt * sum da_k e^{-i w t_{k+1/2}} / (2i sin(w dt/2))
  const Complex scale = dt_ / (units::hbar_meV_ps * Complex(0.0, 2.0 * std::sin(0.5 * w * dt_)));
  for (std::size_t s = 0; s < m; ++s) out[s] *= scale;
}

void RecordSpectra::transform(const std::vector<double>& omega, std::vector<Complex>& out,
                              Execution mode) const {
  const std::size_t m = signals_.size();
  out.assign(omega.size() * m, Complex(0.0, 0.0));
  const auto n = static_cast<long long>(omega.size());
  if (mode == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < n; ++k) {
      transform_one(omega[static_cast<std::size_t>(k)], out.data() + static_cast<std::size_t>(k) * m);
    }
  } else {
    for (long long k = 0; k < n; ++k) {
      transform_one(omega[static_cast<std::size_t>(k)], out.data() + static_cast<std::size_t>(k) * m);
    }
  }
}

void RecordSpectra::ordered_sine_one(double omega, const std::vector<std::pair<int, int>>& pairs,
                                     double* out) const {
  const double w = omega / units::hbar_meV_ps;
  const std::size_t n = sample_count();
  const std::size_t m = signals_.size();
  // Running sums C_g(t_k) = sum_{j<k} g_j e^{i w t_j} dt + g_k e^{i w t_k} dt / 2.
  std::vector<Complex> running(m, Complex(0.0, 0.0));
  std::vector<double> acc(pairs.size(), 0.0);
  std::vector<Complex> c(m);
  PhasorWalk walk(w, t0_, dt_);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex e = walk.at(k);
    for (std::size_t s = 0; s < m; ++s) c[s] = running[s] + 0.5 * dt_ * signals_[s][k] * e;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto f = static_cast<std::size_t>(pairs[p].first);
      const auto g = static_cast<std::size_t>(pairs[p].second);
      acc[p] += dt_ * signals_[f][k] * std::imag(e * std::conj(c[g]));
    }
    for (std::size_t s = 0; s < m; ++s) running[s] += dt_ * signals_[s][k] * e;
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) out[p] = acc[p];
}

void RecordSpectra::ordered_sine(const std::vector<double>& omega,
                                 const std::vector<std::pair<int, int>>& pairs,
                                 std::vector<double>& out, Execution mode) const {
  for (const auto& [f, g] : pairs) {
    if (f < 0 || g < 0 || static_cast<std::size_t>(f) >= signals_.size() ||
        static_cast<std::size_t>(g) >= signals_.size()) {
      throw Error(ErrorCode::dimension_mismatch, "signal pair index out of range");
    }
  }
  const std::size_t p = pairs.size();
  out.assign(omega.size() * p, 0.0);
  const auto n = static_cast<long long>(omega.size());
  if (mode == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < n; ++k) {
      ordered_sine_one(omega[static_cast<std::size_t>(k)], pairs,
                       out.data() + static_cast<std::size_t>(k) * p);
    }
  } else {
    for (long long k = 0; k < n; ++k) {
      ordered_sine_one(omega[static_cast<std::size_t>(k)], pairs,
                       out.data() + static_cast<std::size_t>(k) * p);
    }
  }
}

}  // namespace qdgate
