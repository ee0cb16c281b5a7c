#include "qdgate/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "qdgate/error.hpp"

namespace qdgate {

namespace {

// Nonnegative half of the symmetric 15-point Kronrod abscissae on [-1, 1].
constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for xgk[1], xgk[3], xgk[5], xgk[7].
constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr std::size_t nodes_per_panel = 15;

struct Panel {
  double a, b;
  std::vector<double> value;
  std::vector<double> error;
};

void panel_nodes(double a, double b, std::vector<double>& x) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (std::size_t j = 0; j < 7; ++j) {
    x.push_back(c - h * xgk[j]);
    x.push_back(c + h * xgk[j]);
  }
  x.push_back(c);
}

// Node order per panel: (-x0, +x0, -x1, +x1, ..., -x6, +x6, centre).
void panel_rule(const double* fx, std::size_t m, double h, Panel& p) {
  p.value.assign(m, 0.0);
  p.error.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    auto f = [&](std::size_t node) { return fx[node * m + i]; };
    double kronrod = wgk[7] * f(14);
    double gauss = wg[3] * f(14);
    for (std::size_t j = 0; j < 7; ++j) {
      const double pair = f(2 * j) + f(2 * j + 1);
      kronrod += wgk[j] * pair;
      if (j % 2 == 1) gauss += wg[j / 2] * pair;
    }
    p.value[i] = kronrod * h;
    p.error[i] = std::abs((kronrod - gauss) * h);
  }
}

void evaluate_panels(const BatchIntegrand& f, std::size_t m, std::vector<Panel>& panels,
                     std::size_t& evaluations) {
  std::vector<double> x;
  x.reserve(panels.size() * nodes_per_panel);
  for (const auto& p : panels) panel_nodes(p.a, p.b, x);
  std::vector<double> fx(x.size() * m, 0.0);
  f(x, fx);
  evaluations += x.size();
  for (std::size_t k = 0; k < panels.size(); ++k) {
    panel_rule(fx.data() + k * nodes_per_panel * m, m, 0.5 * (panels[k].b - panels[k].a),
               panels[k]);
  }
}

}  // namespace

QuadratureResult integrate_gk(const BatchIntegrand& f, std::size_t m,
                              const std::vector<double>& breakpoints,
                              const QuadratureOptions& opts) {
  if (breakpoints.size() < 2 || m == 0) {
    throw Error(ErrorCode::invalid_argument, "quadrature needs two breakpoints and one component");
  }
  std::vector<Panel> panels;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    if (!(breakpoints[k + 1] >= breakpoints[k])) {
      throw Error(ErrorCode::invalid_argument, "breakpoints must be non-decreasing");
    }
    if (breakpoints[k + 1] > breakpoints[k]) panels.push_back({breakpoints[k], breakpoints[k + 1], {}, {}});
  }
  QuadratureResult result;
  result.value.assign(m, 0.0);
  result.error.assign(m, 0.0);
  if (panels.empty()) return result;
  evaluate_panels(f, m, panels, result.evaluations);

  std::vector<double> tol(m);
  while (true) {
    std::fill(result.value.begin(), result.value.end(), 0.0);
    std::fill(result.error.begin(), result.error.end(), 0.0);
    for (const auto& p : panels) {
      for (std::size_t i = 0; i < m; ++i) {
        result.value[i] += p.value[i];
        result.error[i] += p.error[i];
      }
    }
    double largest = 0.0;
    for (double v : result.value) largest = std::max(largest, std::abs(v));
    bool done = true;
    for (std::size_t i = 0; i < m; ++i) {
      tol[i] = std::max({opts.abs_tol, opts.rel_tol * std::abs(result.value[i]),
                         opts.rel_tol * opts.relative_floor * largest});
      if (result.error[i] > tol[i]) done = false;
    }
    if (done) break;
    if (panels.size() >= opts.max_panels) {
      throw Error(ErrorCode::quadrature_failure, "adaptive quadrature did not converge");
    }
    // Rank panels by their worst error relative to each component's tolerance.
    auto badness = [&](const Panel& p) {
      double b = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (result.error[i] > tol[i]) b = std::max(b, p.error[i] / std::max(tol[i], 1e-300));
      }
      return b;
    };
    std::vector<std::size_t> order(panels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t n_split = std::min(opts.batch_panels, panels.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_split),
                      order.end(), [&](std::size_t l, std::size_t r) {
                        const double bl = badness(panels[l]), br = badness(panels[r]);
                        return bl != br ? bl > br : l < r;
                      });
    std::vector<Panel> children;
    std::vector<std::size_t> replaced;
    for (std::size_t s = 0; s < n_split; ++s) {
      const Panel& p = panels[order[s]];
      if (badness(p) == 0.0) break;
      const double mid = 0.5 * (p.a + p.b);
      if (!(mid > p.a && mid < p.b)) continue;
      children.push_back({p.a, mid, {}, {}});
      children.push_back({mid, p.b, {}, {}});
      replaced.push_back(order[s]);
    }
    if (replaced.empty()) {
      throw Error(ErrorCode::quadrature_failure, "quadrature panels cannot be subdivided further");
    }
    evaluate_panels(f, m, children, result.evaluations);
    for (std::size_t s = 0; s < replaced.size(); ++s) {
      panels[replaced[s]] = std::move(children[2 * s]);
      panels.push_back(std::move(children[2 * s + 1]));
    }
  }
  // Fixed-order summation by panel position keeps the result independent of refinement order.
  std::sort(panels.begin(), panels.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  std::fill(result.value.begin(), result.value.end(), 0.0);
  std::fill(result.error.begin(), result.error.end(), 0.0);
  for (const auto& p : panels) {
    for (std::size_t i = 0; i < m; ++i) {
      result.value[i] += p.value[i];
      result.error[i] += p.error[i];
    }
  }
  result.panels = panels.size();
  return result;
}

double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    const QuadratureOptions& opts) {
  if (a == b) return 0.0;
  const double sign = b > a ? 1.0 : -1.0;
  const BatchIntegrand batch = [&f](const std::vector<double>& x, std::vector<double>& out) {
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = f(x[k]);
  };
  const auto r = integrate_gk(batch, 1, {std::min(a, b), std::max(a, b)}, opts);
  return sign * r.value[0];
}

std::vector<double> geometric_breakpoints(double a, double b, int levels, double ratio) {
  std::vector<double> bp{a};
  for (int k = levels; k >= 1; --k) bp.push_back(a + (b - a) * std::pow(ratio, k));
  bp.push_back(b);
  return bp;
}

}  // namespace qdgate
