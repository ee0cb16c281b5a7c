#include "qdgate/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <vector>

namespace qdgate {

namespace {

using Complex = std::complex<double>;

Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
    probe(i) = x(i) + h;
    const double up = f(probe);
    probe(i) = x(i) - h;
    const double down = f(probe);
    probe(i) = x(i);
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

Eigen::Vector4cd to_state(const Eigen::VectorXd& x) {
  Eigen::Vector4cd c;
  for (int n = 0; n < 4; ++n) c(n) = Complex(x(2 * n), x(2 * n + 1));
  const double norm = c.norm();
  return norm > 0.0 ? Eigen::Vector4cd(c / norm) : c;
}

Eigen::VectorXd to_params(const Eigen::Vector4cd& c) {
  Eigen::VectorXd x(8);
  for (int n = 0; n < 4; ++n) {
    x(2 * n) = c(n).real();
    x(2 * n + 1) = c(n).imag();
  }
  return x;
}

Eigen::Vector4cd haar_state(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Vector4cd c;
  for (int n = 0; n < 4; ++n) c(n) = Complex(gauss(rng), gauss(rng));
  return c / c.norm();
}

}  // namespace

Eigen::VectorXd minimize_quasi_newton(const std::function<double(const Eigen::VectorXd&)>& f,
                                      Eigen::VectorXd x, int max_iterations,
                                      double gradient_tol) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd inverse_hessian = Eigen::MatrixXd::Identity(n, n);
  double fx = f(x);
  Eigen::VectorXd g = numeric_gradient(f, x);
  for (int it = 0; it < max_iterations; ++it) {
    if (g.norm() <= gradient_tol) break;
    Eigen::VectorXd direction = -inverse_hessian * g;
    if (direction.dot(g) >= 0.0) {
      inverse_hessian.setIdentity();
      direction = -g;
    }
    double step = 1.0;
    Eigen::VectorXd x_new;
    double f_new = fx;
    bool improved = false;
    for (int k = 0; k < 40; ++k) {
      x_new = x + step * direction;
      f_new = f(x_new);
      if (f_new <= fx + 1e-4 * step * direction.dot(g)) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
    const Eigen::VectorXd g_new = numeric_gradient(f, x_new);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-14) {
      const Eigen::VectorXd hy = inverse_hessian * y;
      inverse_hessian += ((sy + y.dot(hy)) / (sy * sy)) * (s * s.transpose()) -
                         (hy * s.transpose() + s * hy.transpose()) / sy;
    }
    const double change = fx - f_new;
    x = x_new;
    fx = f_new;
    g = g_new;
    if (change <= 1e-15 * std::max(1.0, std::abs(fx))) break;
  }
  return x;
}

double transfer_fidelity(const Eigen::Matrix4cd& u, const std::array<double, 4>& target_phases,
                         const Eigen::Vector4cd& c) {
  Complex overlap(0.0, 0.0);
  for (int m = 0; m < 4; ++m) {
    const Complex target = std::polar(1.0, target_phases[static_cast<std::size_t>(m)]) * c(m);
    overlap += std::conj(target) * (u.row(m) * c)(0);
  }
  return std::norm(overlap);
}

double gate_fidelity_closed_system(const Eigen::Matrix4cd& u,
                                   const std::array<double, 4>& target_phases,
                                   const FidelitySearch& search) {
  auto objective = [&](const Eigen::VectorXd& x) {
    return transfer_fidelity(u, target_phases, to_state(x));
  };
  std::vector<Eigen::Vector4cd> starts;
  for (int n = 0; n < 4; ++n) starts.push_back(Eigen::Vector4cd::Unit(n));
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      Eigen::Vector4cd c = Eigen::Vector4cd::Zero();
      c(a) = c(b) = 1.0 / std::sqrt(2.0);
      starts.push_back(c);
    }
  }
  starts.push_back(Eigen::Vector4cd::Constant(0.5));
  std::mt19937_64 rng(search.seed);
  while (static_cast<int>(starts.size()) < search.starts) starts.push_back(haar_state(rng));
  starts.resize(static_cast<std::size_t>(std::max(search.starts, 1)));

  double best = std::numeric_limits<double>::infinity();
  for (const auto& c0 : starts) {
    // Basis starts sit on a symmetric ridge; nudge them so the gradient is informative.
    Eigen::VectorXd x0 = to_params(c0);
    x0 += 1e-3 * to_params(haar_state(rng));
    const double start_value = objective(to_params(c0));
    const Eigen::VectorXd x = minimize_quasi_newton(objective, x0, search.max_iterations);
    best = std::min({best, start_value, objective(x)});
  }
  return std::clamp(best, 0.0, 1.0);
}

double average_fidelity(const Eigen::Matrix4cd& u, const std::array<double, 4>& target_phases,
                        int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double sum = 0.0;
  for (int k = 0; k < samples; ++k) sum += transfer_fidelity(u, target_phases, haar_state(rng));
  return sum / samples;
}

}  // namespace qdgate
