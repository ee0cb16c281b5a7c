// One PASS/FAIL line per acceptance criterion; an optional argument selects a single criterion.
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "qdgate/evolution.hpp"
#include "qdgate/phonons.hpp"
#include "qdgate/readout.hpp"
#include "qdgate/spectral.hpp"
#include "qdgate/units.hpp"

using namespace qdgate;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (ok ? "" : "[fail] ") << what << "; ";
  }
};

std::string num(double x, int digits = 6) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

PhononBath gaas(double l_nm, double temperature, double calibration = 1.0) {
  PhononBath b;
  b.l_nm = l_nm;
  b.temperature_K = temperature;
  b.calibration = calibration;
  return b;
}

double max_residual(const GateResult& g) {
  return *std::max_element(g.residual_exciton.begin(), g.residual_exciton.end());
}

// Reference gate rescaled to omega0 at fixed adiabaticity.
GateResult scaled_gate(double omega0) {
  const double s = omega0 / 3.0;
  const DotModel model{0.1, -0.5 * s, 2.0 * s};
  return run_adiabatic_gate(
      model, PulseSchedule::gaussian_chirped(omega0, 10.0 / s, -3.0 * s, 8.72 / s, 4.0));
}

double gate_infidelity(const GateResult& g, const PhononBath& bath, double d_nm,
                       double rel_tol = 1e-8) {
  DephasingOptions opts;
  opts.rel_tol = rel_tol;
  return infidelity(fidelity_matrix(g.records, bath, d_nm, BathTopology::common, opts, g.phases));
}

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / ("qdgate_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

int run_qdsim(const std::string& args) {
  const std::string cmd = std::string(QDSIM_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Data rows of a CSV written by the CLI, numeric columns only.
std::vector<std::vector<double>> csv_rows(const fs::path& p) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(read_file(p));
  std::string line;
  std::getline(ss, line);  // hash comment
  std::getline(ss, line);  // header
  while (std::getline(ss, line)) {
    std::vector<double> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string config(const std::string& name) { return std::string(QDGATE_CONFIG_DIR) + "/" + name; }

Verdict criterion_1() {
  Verdict v;
  Stopwatch clock;
  const DotModel model{0.1, -0.5, 2.0};
  const GateResult g =
      run_adiabatic_gate(model, PulseSchedule::gaussian_chirped(3.0, 10.0, -3.0, 8.72, 4.0));
  const double seconds = clock.seconds();
  const double dtheta = std::abs(wrap_phase(g.gate_phase - units::pi));
  const double residual = max_residual(g);
  v.check(dtheta <= 0.05, "theta " + num(g.gate_phase, 10) + " (|theta - pi| <= 0.05)");
  v.check(residual <= 1e-5, "max residual exciton " + num(residual) + " (<= 1e-5)");
  v.detail << "residual per dot in |00> " << num(0.5 * g.residual_exciton[0]) << "; ";
  v.check(seconds <= 10.0, "runtime " + num(seconds, 3) + " s (<= 10)");
  return v;
}

Verdict criterion_2() {
  Verdict v;
  Stopwatch clock;
  const DotModel model{0.0, -0.5, 2.0};
  const GateResult g = run_rabi_gate(model, 1e4, units::pi * units::hbar_meV_ps / model.delta_e_ab);
  const double seconds = clock.seconds();
  v.check(std::abs(wrap_phase(g.gate_phase - units::pi)) <= 1e-3,
          "theta " + num(g.gate_phase, 10) + " (|theta - pi| <= 1e-3)");
  v.check(seconds <= 1.0, "runtime " + num(seconds, 3) + " s (<= 1)");
  return v;
}

Verdict criterion_3() {
  Verdict v;
  Stopwatch clock;
  const double omega = 0.5;
  double worst = 0.0, worst_eta = 0.0, worst_two_level = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double eta = 0.1 * std::pow(60.0, k / 9.0);
    const double rate = omega * omega / (units::hbar_meV_ps * eta);
    const double numeric = landau_zener_numeric(omega, rate);
    const double rel = std::abs(numeric / landau_zener(omega, rate) - 1.0);
    if (rel > worst) {
      worst = rel;
      worst_eta = eta;
    }
    worst_two_level = std::max(worst_two_level, std::abs(numeric / landau_zener_two_level(omega, rate) - 1.0));
  }
  const double seconds = clock.seconds();
  v.check(worst <= 0.05, "max relative deviation from exp(-pi W^2/4 rate) " + num(worst) +
                             " at eta " + num(worst_eta, 3) + " (<= 0.05)");
  v.detail << "against exp(-pi W^2/2 rate) " << num(worst_two_level) << "; ";
  v.check(seconds <= 5.0, "runtime " + num(seconds, 3) + " s (<= 5)");
  return v;
}

Verdict criterion_4() {
  Verdict v;
  PhononBath def = gaas(20.0, 0.0);
  PhononBath pie = def;
  pie.coupling = Coupling::piezoelectric;
  const double wl = def.omega_l();
  const double sd = loglog_slope(def, 1e-4 * wl, 1e-2 * wl);
  const double sp = loglog_slope(pie, 1e-4 * wl, 1e-2 * wl);
  v.check(std::abs(sd - 3.0) <= 0.05, "deformation slope " + num(sd) + " (3 +- 0.05)");
  v.check(std::abs(sp - 5.0) <= 0.05, "piezoelectric slope " + num(sp) + " (5 +- 0.05)");
  double worst = 0.0;
  for (int k = 0; k <= 40; ++k) {
    const double w = wl * std::pow(10.0, -4.0 + 2.0 * k / 40.0);
    worst = std::max(worst, std::abs(piezo_small_omega(pie, w) / spectral_j(pie, w) - 1.0));
  }
  v.check(worst <= 0.01, "piezo small-omega closed form deviation " + num(worst) + " (<= 0.01)");
  return v;
}

Verdict criterion_5() {
  Verdict v;
  // High temperature: kT >> omega_l and the inverse gate time.
  const GateResult slow = scaled_gate(0.3);
  const double g20 = gate_infidelity(slow, gaas(20.0, 20.0, 7.5), 5.0);
  const double g40 = gate_infidelity(slow, gaas(20.0, 40.0, 7.5), 5.0);
  v.check(std::abs(g40 / g20 - 2.0) <= 0.2,
          "f(40 K)/f(20 K) " + num(g40 / g20) + " (2 +- 10%), omega0 0.3 meV, l 20 nm");
  // Low temperature: kT(0.1 K) << omega_l and the inverse gate time.
  const GateResult fast = scaled_gate(3.0);
  const double c0 = gate_infidelity(fast, gaas(10.0, 0.0, 7.5), 5.0);
  const double c1 = gate_infidelity(fast, gaas(10.0, 0.1, 7.5), 5.0);
  v.check(std::abs(c1 / c0 - 1.0) <= 0.05,
          "f(0.1 K)/f(0) " + num(c1 / c0) + " (1 +- 5%), omega0 3 meV, l 10 nm");
  return v;
}

Verdict criterion_6() {
  Verdict v;
  const fs::path dir = scratch_dir() / "tables";
  // (l, omega, T) -> f
  std::map<std::tuple<double, double, double>, double> f;
  for (const char* name : {"table_l20.yaml", "table_l15.yaml", "table_l10.yaml"}) {
    const fs::path out = dir / name;
    if (run_qdsim("fidelity-sweep --config " + config(name) + " --out " + out.string()) != 0) {
      v.check(false, std::string("qdsim fidelity-sweep ") + name);
      return v;
    }
    for (const auto& r : csv_rows(out / "fidelity.csv")) f[{r[0], r[3], r[2]}] = r[6];
  }
  std::vector<double> ls, omegas, temps;
  for (const auto& [key, value] : f) {
    ls.push_back(std::get<0>(key));
    omegas.push_back(std::get<1>(key));
    temps.push_back(std::get<2>(key));
  }
  auto unique = [](std::vector<double>& x) {
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end()), x.end());
  };
  unique(ls);
  unique(omegas);
  unique(temps);

  const double anchor = f.at({20.0, 0.3, 4.0});
  v.check(anchor >= 5e-4 && anchor <= 1e-2, "f(20 nm, 0.3 meV, 4 K) " + num(anchor) + " in [5e-4, 1e-2]");
  bool omega_order = true, t_order = true, l_order = true;
  double worst_cold = 0.0;
  for (double l : ls) {
    for (double t : temps) {
      for (std::size_t k = 1; k < omegas.size(); ++k) {
        omega_order = omega_order && f.at({l, omegas[k - 1], t}) < f.at({l, omegas[k], t});
      }
    }
    for (double w : omegas) {
      for (std::size_t k = 1; k < temps.size(); ++k) {
        t_order = t_order && f.at({l, w, temps[k - 1]}) < f.at({l, w, temps[k]});
      }
      worst_cold = std::max(worst_cold, f.at({l, w, temps.front()}));
    }
  }
  for (double w : omegas) {
    for (double t : temps) {
      for (std::size_t k = 1; k < ls.size(); ++k) {
        l_order = l_order && f.at({ls[k - 1], w, t}) > f.at({ls[k], w, t});
      }
    }
  }
  v.check(omega_order, "f decreases with decreasing omega");
  v.check(t_order, "f increases with T");
  v.check(l_order, "f increases with decreasing l");
  v.check(worst_cold <= 1e-6, "max f at T = " + num(temps.front()) + " K is " + num(worst_cold) + " (<= 1e-6)");
  return v;
}

Verdict criterion_7() {
  Verdict v;
  const fs::path out = scratch_dir() / "separation";
  if (run_qdsim("fidelity-sweep --config " + config("separation.yaml") + " --out " + out.string()) != 0) {
    v.check(false, "qdsim fidelity-sweep separation.yaml");
    return v;
  }
  std::map<double, std::map<double, double>> by_t;  // T -> d -> f
  for (const auto& r : csv_rows(out / "fidelity.csv")) by_t[r[2]][r[1]] = r[6];
  for (const auto& [t, curve] : by_t) {
    if (t > 5.0) continue;
    double lo = 1e300, hi = 0.0;
    for (const auto& [d, f] : curve) {
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
    v.check(hi <= 3.0 * lo, "T " + num(t) + " K: max/min over d = " + num(hi / lo) + " (<= 3)");
  }
  bool rising = true;
  const auto& first = by_t.begin()->second;
  for (const auto& [d, f0] : first) {
    double prev = f0;
    for (auto it = std::next(by_t.begin()); it != by_t.end(); ++it) {
      rising = rising && it->second.at(d) > prev;
      prev = it->second.at(d);
    }
  }
  v.check(rising, "f increases with T at every d");
  return v;
}

Verdict criterion_8() {
  Verdict v;
  const PhononBath b = gaas(20.0, 0.0);
  const double wl = b.omega_l();
  const double expansion = spectral_j(b, wl) / wl;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double omega = 0.3 * wl * std::abs(u(rng)) + 1e-3;
    const double delta = 0.3 * wl * u(rng);
    const double theta = std::atan2(omega, -delta);
    const EnergyShift p = perturbative_energy_shift(theta, delta, omega, b);
    const EnergyShift a = adiabatic_expansion_shift(theta, delta, omega, b);
    const double scale = std::hypot(delta, omega);
    worst = std::max({worst, std::abs(p.plus - a.plus) / scale, std::abs(p.minus - a.minus) / scale});
  }
  v.check(worst <= 3.0 * expansion, "max |dE_pert - dE_exp| / sqrt(D^2+W^2) " + num(worst) +
                                        " (<= 3 J(w_l)/w_l = " + num(3.0 * expansion) + ")");
  return v;
}

Verdict criterion_9() {
  Verdict v;
  ReadoutConfig cfg;
  cfg.eta = 0.9;
  const double eps = cfg.epsilon;
  const auto [p0, p1] = collapse_probabilities(eps);
  v.check(p0 == eps * eps / (1.0 + eps * eps) && p1 == 1.0 / (1.0 + eps * eps),
          "p0 " + num(p0, 12) + " = eps^2/(1+eps^2)");
  const double pe = detection_error(eps, cfg.eta);
  v.check(std::abs(pe - 1.1e-3) <= 5e-5, "P_e " + num(pe) + " (1.1e-3 +- 5e-5)");

  ReadoutConfig long_run = cfg;
  long_run.eta = 1.0;
  long_run.t_max = 20000.0;
  const auto bunches = simulate_ensemble(long_run, 1, 1000, 11);
  double mean = 0.0, sq = 0.0;
  for (const auto& r : bunches) {
    const double n = static_cast<double>(r.first_bunch());
    mean += n;
    sq += n * n;
  }
  mean /= 1000.0;
  const double sigma = std::sqrt((sq / 1000.0 - mean * mean) / 1000.0);
  const double target = 1.0 / (eps * eps);
  v.check(std::abs(mean - target) <= 3.0 * sigma,
          "mean first bunch " + num(mean) + " +- " + num(sigma) + " vs 1/eps^2 = " + num(target));

  Stopwatch clock;
  ReadoutConfig ks_cfg;
  ks_cfg.t_max = 100.0;
  const auto ens = simulate_ensemble(ks_cfg, 1, 10000, 101);
  const double seconds = clock.seconds();
  std::vector<double> first;
  for (const auto& r : ens) {
    if (!r.emission_times.empty()) first.push_back(r.emission_times.front());
  }
  const double never = survival_probability(1, ks_cfg, ks_cfg.t_max);
  const auto cdf = [&](double t) { return (1.0 - survival_probability(1, ks_cfg, t)) / (1.0 - never); };
  const double d = ks_statistic(first, cdf);
  const double crit = ks_critical(0.01, static_cast<double>(first.size()));
  v.check(d <= crit, "first-emission KS " + num(d) + " (<= " + num(crit) + " at 1%)");
  v.check(seconds <= 30.0, "10^4 trajectories in " + num(seconds, 3) + " s (<= 30)");
  return v;
}

Verdict criterion_10() {
  Verdict v;
  double drift = 0.0;
  drift = std::max(drift, run_adiabatic_gate(DotModel{0.1, -0.5, 2.0},
                                             PulseSchedule::gaussian_chirped(3.0, 10.0, -3.0, 8.72, 4.0))
                              .max_norm_drift);
  drift = std::max(drift, run_adiabatic_gate(DotModel{0.0, -0.5, 2.0},
                                             PulseSchedule::gaussian_chirped(3.0, 10.0, -3.0, 8.72, 4.0))
                              .max_norm_drift);
  drift = std::max(drift, run_rabi_gate(DotModel{0.0, -0.5, 2.0}, 1e4, 1.034).max_norm_drift);
  const GateResult slow = scaled_gate(0.3);
  drift = std::max(drift, slow.max_norm_drift);
  v.check(drift <= 1e-9, "max norm drift " + num(drift) + " (<= 1e-9)");

  double worst = 0.0;
  for (double t : {0.0, 4.0, 20.0}) {
    const PhononBath b = gaas(20.0, t);
    worst = std::max(worst, std::abs(huang_rhys_exponent(b, 5e-9) / huang_rhys_exponent(b, 1e-8) - 1.0));
    const PhononBath cal = gaas(20.0, t, 7.5);
    worst = std::max(worst, std::abs(gate_infidelity(slow, cal, 5.0, 5e-9) /
                                         gate_infidelity(slow, cal, 5.0, 1e-8) - 1.0));
  }
  v.check(worst <= 1e-3, "halving-tolerance change " + num(worst) + " (<= 0.1%)");

  const fs::path dir = scratch_dir() / "hygiene";
  bool identical = true;
  for (const auto& [command, name, file] :
       {std::tuple<std::string, std::string, std::string>{"fidelity-sweep", "table_l20.yaml", "fidelity.csv"},
        {"readout", "readout.yaml", "trajectories.csv"},
        {"readout", "readout.yaml", "survival.csv"}}) {
    const std::string base = command + " --config " + config(name) + " --seed 3 --out ";
    const fs::path a = dir / (command + "_1"), b = dir / (command + "_3"), c = dir / (command + "_r");
    const bool ran = run_qdsim(base + a.string() + " --jobs 1") == 0 &&
                     run_qdsim(base + b.string() + " --jobs 3") == 0 &&
                     run_qdsim(base + c.string() + " --jobs 1") == 0;
    const std::string ref = read_file(a / file);
    identical = identical && ran && !ref.empty() && ref == read_file(b / file) && ref == read_file(c / file);
  }
  v.check(identical, "CSV bytes identical across --jobs 1/3 and reruns");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria = {
      criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
      criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
  int first = 1, last = 10;
  if (argc > 1) {
    first = last = std::atoi(argv[1]);
    if (first < 1 || first > 10) {
      std::cerr << "usage: acceptance [criterion 1-10]\n";
      return 2;
    }
  }
  bool all = true;
  for (int k = first; k <= last; ++k) {
    Verdict v;
    try {
      v = criteria[static_cast<std::size_t>(k - 1)]();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << k << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail.str()
              << std::endl;
    all = all && v.pass;
  }
  fs::remove_all(scratch_dir());
  return all ? 0 : 1;
}
