#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace qdgate {

// serial is the reference; parallel splits the frequency loop across OpenMP threads and must
// agree with it bit for bit.
enum class Execution { serial, parallel };

// Spectral kernels over signals sampled on the uniform grid t0 + k*dt (ps).
class RecordSpectra {
 public:
  RecordSpectra(std::vector<std::vector<double>> signals, double t0, double dt,
                double taper_fraction = 0.1);

  // Keeps every stride-th sample.
  RecordSpectra subsampled(std::size_t stride) const;

  std::size_t signal_count() const { return signals_.size(); }
  std::size_t sample_count() const { return signals_.empty() ? 0 : signals_[0].size(); }
  double dt() const { return dt_; }
  // pi*hbar/dt, meV
  double nyquist() const;

  // out[k*signal_count() + s] = (1/hbar) sum_j dt a_s(t_j) exp(-i omega_k t_j / hbar),
  // evaluated from tapered forward differences so constant asymptotes drop out.
  void transform(const std::vector<double>& omega, std::vector<std::complex<double>>& out,
                 Execution mode) const;

  // out[k*pairs.size() + p] = int dt f(t) int_{t' < t} dt' g(t') sin(omega_k (t - t') / hbar),
  // ps^2, with (f, g) = (signal pairs[p].first, signal pairs[p].second).
  void ordered_sine(const std::vector<double>& omega, const std::vector<std::pair<int, int>>& pairs,
                    std::vector<double>& out, Execution mode) const;

 private:
  void transform_one(double omega, std::complex<double>* out) const;
  void ordered_sine_one(double omega, const std::vector<std::pair<int, int>>& pairs,
                        double* out) const;

  std::vector<std::vector<double>> signals_;
  std::vector<std::vector<double>> tapered_steps_;
  double t0_;
  double dt_;
  double taper_fraction_;
};

}  // namespace qdgate
