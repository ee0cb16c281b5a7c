#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace qdgate {

// Evaluates m integrand components at every node: out[k*m + i] is component i at x[k].
using BatchIntegrand =
    std::function<void(const std::vector<double>& x, std::vector<double>& out)>;

struct QuadratureOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  // Components far below the largest one are judged against this fraction of it.
  double relative_floor = 1e-6;
  std::size_t max_panels = 20000;
  // Panels bisected per refinement round; their nodes form one batch.
  std::size_t batch_panels = 8;
};

struct QuadratureResult {
  std::vector<double> value;
  std::vector<double> error;
  std::size_t panels = 0;
  std::size_t evaluations = 0;
};

// Adaptive 7-point Gauss / 15-point Kronrod over consecutive panels [b_0, b_1], [b_1, b_2], ...
// Throws QuadratureFailure when max_panels is reached before convergence.
QuadratureResult integrate_gk(const BatchIntegrand& f, std::size_t components,
                              const std::vector<double>& breakpoints,
                              const QuadratureOptions& opts = QuadratureOptions{});

double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    const QuadratureOptions& opts = QuadratureOptions{});

// {a, a + (b-a)*r^k ...}: breakpoints refined geometrically towards a.
std::vector<double> geometric_breakpoints(double a, double b, int levels, double ratio = 0.1);

}  // namespace qdgate
