#pragma once

#include <array>
#include <cstdint>
#include <functional>

#include <Eigen/Dense>

namespace qdgate {

// BFGS with central-difference gradients and backtracking line search.
Eigen::VectorXd minimize_quasi_newton(const std::function<double(const Eigen::VectorXd&)>& f,
                                      Eigen::VectorXd x0, int max_iterations,
                                      double gradient_tol = 1e-10);

struct FidelitySearch {
  int starts = 32;
  std::uint64_t seed = 0x5eed;
  int max_iterations = 200;
};

// |<chi~|U|chi>|^2 with chi~ = sum_n exp(i phi_n) c_n |n>.
double transfer_fidelity(const Eigen::Matrix4cd& u, const std::array<double, 4>& target_phases,
                         const Eigen::Vector4cd& c);

// Worst case of transfer_fidelity over normalized logical inputs.
double gate_fidelity_closed_system(const Eigen::Matrix4cd& u,
                                   const std::array<double, 4>& target_phases,
                                   const FidelitySearch& search = FidelitySearch{});

// Mean of transfer_fidelity over Haar-random inputs.
double average_fidelity(const Eigen::Matrix4cd& u, const std::array<double, 4>& target_phases,
                        int samples, std::uint64_t seed);

}  // namespace qdgate
