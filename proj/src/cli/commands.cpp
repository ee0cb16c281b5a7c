#include "qdgate/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iostream>
#include <map>
#include <sstream>

#include <omp.h>

#include "qdgate/error.hpp"
#include "qdgate/evolution.hpp"
#include "qdgate/phonons.hpp"
#include "qdgate/readout.hpp"
#include "qdgate/spectral.hpp"
#include "qdgate/units.hpp"

namespace qdgate::cli {

namespace {

ParamSpec num(std::string key, double fallback) {
  return {std::move(key), ParamKind::number, format_number(fallback), {}};
}
ParamSpec whole(std::string key, long long fallback) {
  return {std::move(key), ParamKind::integer, std::to_string(fallback), {}};
}
ParamSpec pick(std::string key, std::vector<std::string> choices) {
  std::string first = choices.front();
  return {std::move(key), ParamKind::choice, std::move(first), std::move(choices)};
}

std::vector<ParamSpec> bath_schema(double temperature, double calibration) {
  const Material m;
  return {pick("bath.coupling", {"deformation", "piezoelectric"}),
          pick("bath.geometry", {"spherical", "quasi2d"}),
          num("bath.l_nm", 20.0),
          num("bath.l_h_nm", 0.0),
          num("bath.lz_nm", 0.0),
          num("bath.r0_nm", 0.0),
          num("bath.temperature_K", temperature),
          num("bath.calibration", calibration),
          num("material.rho_kg_m3", m.rho_kg_m3),
          num("material.u_m_s", m.u_m_s),
          num("material.d_c_eV", m.d_c_eV),
          num("material.d_v_eV", m.d_v_eV),
          num("material.e14_C_m2", m.e14_C_m2),
          num("material.eps_r", m.eps_r)};
}

PhononBath bath_from(const ResolvedConfig& c) {
  PhononBath b;
  b.coupling = c.text("bath.coupling") == "deformation" ? Coupling::deformation
                                                         : Coupling::piezoelectric;
  b.geometry = c.text("bath.geometry") == "spherical" ? Geometry::spherical : Geometry::quasi2d;
  b.l_nm = c.number("bath.l_nm");
  b.l_h_nm = c.number("bath.l_h_nm");
  b.lz_nm = c.number("bath.lz_nm");
  b.r0_nm = c.number("bath.r0_nm");
  b.temperature_K = c.number("bath.temperature_K");
  b.calibration = c.number("bath.calibration");
  b.material.rho_kg_m3 = c.number("material.rho_kg_m3");
  b.material.u_m_s = c.number("material.u_m_s");
  b.material.d_c_eV = c.number("material.d_c_eV");
  b.material.d_v_eV = c.number("material.d_v_eV");
  b.material.e14_C_m2 = c.number("material.e14_C_m2");
  b.material.eps_r = c.number("material.eps_r");
  b.validate();
  return b;
}

std::string fixed(double x, int digits = 6) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

// Runs body(i) for i < n on `jobs` threads; the first failure in index order is rethrown.
template <class Body>
void parallel_indexed(std::size_t n, int jobs, Body body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(jobs, 1))
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::vector<std::string> command_names() { return {"gate", "fidelity-sweep", "readout", "spectral"}; }

bool command_sweeps(const std::string& command) { return command == "fidelity-sweep"; }

std::vector<ParamSpec> command_schema(const std::string& command) {
  if (command == "gate") {
    return {num("model.epsilon", 0.1),
            num("model.delta_meV", -0.5),
            num("model.delta_e_ab_meV", 2.0),
            pick("pulse.scheme", {"adiabatic", "rabi"}),
            num("pulse.omega0_meV", 3.0),
            num("pulse.tau_omega_ps", 10.0),
            num("pulse.delta_inf_meV", -3.0),
            num("pulse.tau_delta_ps", 8.72),
            num("pulse.window_widths", 4.0),
            num("rabi.omega_pi_meV", 1e4),
            num("rabi.wait_ps", 0.0),
            num("solver.rel_tol", 1e-11),
            num("solver.abs_tol", 1e-12),
            num("output.sample_dt_ps", 0.0)};
  }
  if (command == "fidelity-sweep") {
    auto s = bath_schema(4.0, 7.5);
    const std::vector<ParamSpec> rest = {
        num("bath.d_nm", 5.0),
        pick("bath.topology", {"common", "separate"}),
        num("gate.omega0_meV", 0.3),
        num("gate.epsilon", 0.1),
        num("gate.window_widths", 4.0),
        num("gate.reference.omega0_meV", 3.0),
        num("gate.reference.tau_omega_ps", 10.0),
        num("gate.reference.delta_inf_meV", -3.0),
        num("gate.reference.tau_delta_ps", 8.72),
        num("gate.reference.delta_meV", -0.5),
        num("gate.reference.delta_e_ab_meV", 2.0),
        num("numerics.rel_tol", 1e-8)};
    s.insert(s.end(), rest.begin(), rest.end());
    return s;
  }
  if (command == "readout") {
    return {num("readout.omega_meV", 3.0),
            num("readout.kappa_per_ns", 1.0),
            num("readout.epsilon", 0.1),
            num("readout.eta", 1.0),
            num("readout.t_max_ns", 200.0),
            whole("readout.initial", 1),
            whole("readout.trajectories", 100),
            whole("output.time_points", 401),
            whole("output.search_grid", 4000)};
  }
  if (command == "spectral") {
    auto s = bath_schema(0.0, 1.0);
    s.push_back(whole("grid.points", 200));
    return s;
  }
  throw Error(ErrorCode::config_error, "unknown command '" + command + "'");
}

CommandOutput cmd_gate(const ResolvedConfig& c, const RunOptions&) {
  DotModel model;
  model.epsilon = c.number("model.epsilon");
  model.delta = c.number("model.delta_meV");
  model.delta_e_ab = c.number("model.delta_e_ab_meV");
  model.validate();
  const PropagatorConfig solver =
      PropagatorConfig::adaptive(c.number("solver.rel_tol"), c.number("solver.abs_tol"));

  CommandOutput out;
  CsvTable pulses{"pulse_shapes.csv", {"t_ps", "omega_meV", "delta_meV"}, {}};
  CsvTable phase{"phase_population.csv",
                 {"t_ps", "gate_phase_rad", "xx_00", "xx_01", "xx_10", "xx_11"},
                 {}};
  GateResult g;
  if (c.text("pulse.scheme") == "rabi") {
    const double omega_pi = c.number("rabi.omega_pi_meV");
    double wait = c.number("rabi.wait_ps");
    if (wait <= 0.0) {
      if (!(model.delta_e_ab > 0.0)) {
        throw Error(ErrorCode::config_error, "rabi.wait_ps must be set when delta_e_ab is 0");
      }
      wait = units::pi * units::hbar_meV_ps / model.delta_e_ab;
    }
    g = run_rabi_gate(model, omega_pi, wait, solver);
    const double t_pi = units::pi * units::hbar_meV_ps / omega_pi;
    const double edges[] = {0.0, t_pi, t_pi + wait, 2.0 * t_pi + wait};
    // Piecewise-constant drive: each edge appears once per side.
    pulses.rows.push_back({edges[0], omega_pi, -model.delta});
    pulses.rows.push_back({edges[1], omega_pi, -model.delta});
    pulses.rows.push_back({edges[1], 0.0, -model.delta});
    pulses.rows.push_back({edges[2], 0.0, -model.delta});
    pulses.rows.push_back({edges[2], omega_pi, -model.delta});
    pulses.rows.push_back({edges[3], omega_pi, -model.delta});
    phase.rows.push_back({edges[3], g.gate_phase, 0.0, 0.0, 0.0, 0.0});
  } else {
    const PulseSchedule sched = PulseSchedule::gaussian_chirped(
        c.number("pulse.omega0_meV"), c.number("pulse.tau_omega_ps"),
        c.number("pulse.delta_inf_meV"), c.number("pulse.tau_delta_ps"),
        c.number("pulse.window_widths"));
    g = run_adiabatic_gate(model, sched, solver, c.number("output.sample_dt_ps"));
    const BranchRecords& r = g.records;
    double unwrapped = 0.0, previous = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      const double t = r.time(k);
      const PulseSample p = pulse_at(sched, t);
      pulses.rows.push_back({t, p.omega, p.delta});
      std::array<double, 4> phi{};
      for (int n = 0; n < 4; ++n) {
        const auto& amp = r.branches[static_cast<std::size_t>(n)].amplitudes;
        phi[static_cast<std::size_t>(n)] =
            std::arg(amp(logical_index[n], static_cast<Eigen::Index>(k)));
      }
      const double wrapped = gate_phase(phi);
      unwrapped = k == 0 ? wrapped : unwrapped + wrap_phase(wrapped - previous);
      previous = wrapped;
      std::vector<Cell> row{t, unwrapped};
      for (const auto& b : r.branches) row.emplace_back(b.trion_pair[k]);
      phase.rows.push_back(std::move(row));
    }
  }
  CsvTable summary{"summary.csv",
                   {"scheme", "gate_phase_rad", "phi_00", "phi_01", "phi_10", "phi_11",
                    "residual_00", "residual_01", "residual_10", "residual_11",
                    "fidelity_no_bath", "max_norm_drift"},
                   {}};
  std::vector<Cell> row{c.text("pulse.scheme"), g.gate_phase};
  for (double p : g.phases) row.emplace_back(p);
  for (double r : g.residual_exciton) row.emplace_back(r);
  row.emplace_back(g.fidelity_no_bath);
  row.emplace_back(g.max_norm_drift);
  summary.rows.push_back(std::move(row));
  out.tables = {std::move(pulses), std::move(phase), std::move(summary)};
  out.log.push_back("gate phase " + fixed(g.gate_phase) + " rad, max residual exciton " +
                    fixed(*std::max_element(g.residual_exciton.begin(), g.residual_exciton.end())) +
                    ", fidelity without bath " + fixed(g.fidelity_no_bath, 10));
  return out;
}

CommandOutput cmd_fidelity_sweep(const ResolvedConfig& c, const RunOptions& opts) {
  const std::vector<ResolvedConfig> points = c.expand();
  // Points that differ only in bath parameters share one gate run.
  std::map<std::string, std::size_t> gate_slot;
  std::vector<std::size_t> point_gate(points.size());
  std::vector<const ResolvedConfig*> gate_config;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::string key;
    for (const auto& [k, v] : points[i].values) {
      if (k.rfind("gate.", 0) == 0) key += k + "=" + v + ";";
    }
    const auto [it, inserted] = gate_slot.emplace(key, gate_config.size());
    if (inserted) gate_config.push_back(&points[i]);
    point_gate[i] = it->second;
  }

  std::vector<GateResult> gates(gate_config.size());
  std::vector<double> gate_shift(gate_config.size());
  parallel_indexed(gates.size(), opts.jobs, [&](std::size_t i) {
    const ResolvedConfig& p = *gate_config[i];
    const double omega0 = p.number("gate.omega0_meV");
    const double ref = p.number("gate.reference.omega0_meV");
    if (!(omega0 > 0.0) || !(ref > 0.0)) {
      throw Error(ErrorCode::config_error, "gate.omega0_meV and the reference must be > 0");
    }
    // Fixed adiabaticity: energies scale with omega0, times with 1/omega0.
    const double s = omega0 / ref;
    DotModel model;
    model.epsilon = p.number("gate.epsilon");
    model.delta = s * p.number("gate.reference.delta_meV");
    model.delta_e_ab = s * p.number("gate.reference.delta_e_ab_meV");
    const PulseSchedule sched = PulseSchedule::gaussian_chirped(
        omega0, p.number("gate.reference.tau_omega_ps") / s,
        s * p.number("gate.reference.delta_inf_meV"), p.number("gate.reference.tau_delta_ps") / s,
        p.number("gate.window_widths"));
    gates[i] = run_adiabatic_gate(model, sched);
    gate_shift[i] = model.delta_e_ab;
  });

  CsvTable table{"fidelity.csv",
                 {"l_nm", "d_nm", "T_K", "omega_meV", "delta_e_ab_meV", "gamma", "infidelity"},
                 {}};
  table.rows.resize(points.size());
  parallel_indexed(points.size(), opts.jobs, [&](std::size_t i) {
    const ResolvedConfig& p = points[i];
    const PhononBath bath = bath_from(p);
    DephasingOptions dopt;
    dopt.rel_tol = p.number("numerics.rel_tol");
    const double d = p.number("bath.d_nm");
    const BathTopology topology =
        p.text("bath.topology") == "common" ? BathTopology::common : BathTopology::separate;
    const GateResult& g = gates[point_gate[i]];
    const FidelityMatrix fm = fidelity_matrix(g.records, bath, d, topology, dopt, g.phases);
    table.rows[i] = {bath.l_nm, d, bath.temperature_K, p.number("gate.omega0_meV"),
                     gate_shift[point_gate[i]], fm.gamma.maxCoeff(), infidelity(fm)};
  });
  CommandOutput out;
  out.log.push_back(std::to_string(points.size()) + " sweep points, " +
                    std::to_string(gates.size()) + " distinct gate runs");
  out.tables.push_back(std::move(table));
  return out;
}

CommandOutput cmd_readout(const ResolvedConfig& c, const RunOptions&) {
  ReadoutConfig rc;
  rc.omega = c.number("readout.omega_meV");
  rc.kappa = c.number("readout.kappa_per_ns");
  rc.epsilon = c.number("readout.epsilon");
  rc.eta = c.number("readout.eta");
  rc.t_max = c.number("readout.t_max_ns");
  rc.seed = c.seed;
  try {
    rc.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::config_error, e.what());
  }
  const long long initial = c.integer("readout.initial");
  const long long count = c.integer("readout.trajectories");
  const long long points = c.integer("output.time_points");
  const long long grid = c.integer("output.search_grid");
  if ((initial != 0 && initial != 1) || count < 0 || points < 2 || grid < 2) {
    throw Error(ErrorCode::config_error,
                "need readout.initial in {0, 1}, trajectories >= 0 and grids of >= 2 points");
  }

  const NoJumpPropagator prop(rc);
  const Eigen::Vector3cd s0 = Eigen::Vector3cd::Unit(0), s1 = Eigen::Vector3cd::Unit(1);
  const MeasurementOptimum best = optimize_measurement_time(rc, static_cast<std::size_t>(grid));
  CsvTable survival{"survival.csv", {"t_ns", "P0", "P1"}, {}};
  CsvTable budget{"error_budget.csv", {"t_ns", "err1", "err0", "total", "t_opt"}, {}};
  for (long long k = 0; k < points; ++k) {
    const double t = rc.t_max * static_cast<double>(k) / static_cast<double>(points - 1);
    const double p0 = std::min(1.0, prop.apply(s0, t).squaredNorm());
    const double p1 = std::min(1.0, prop.apply(s1, t).squaredNorm());
    survival.rows.push_back({t, p0, p1});
    budget.rows.push_back({t, p1, 1.0 - p0, p1 + 1.0 - p0, best.t_opt});
  }

  const auto ensemble = simulate_ensemble(rc, static_cast<int>(initial),
                                          static_cast<std::size_t>(count), c.seed);
  CsvTable traj{"trajectories.csv",
                {"trajectory_id", "emission_time_ns", "collapsed_to", "detected"},
                {}};
  double bunch = 0.0;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const TrajectoryRecord& r = ensemble[i];
    bunch += static_cast<double>(r.first_bunch());
    for (std::size_t k = 0; k < r.emission_times.size(); ++k) {
      traj.rows.push_back({static_cast<long long>(i), r.emission_times[k],
                           static_cast<long long>(r.collapsed_to[k]),
                           static_cast<long long>(r.detected[k])});
    }
  }
  CommandOutput out;
  out.tables = {std::move(survival), std::move(traj), std::move(budget)};
  out.log.push_back("t_opt " + fixed(best.t_opt) + " ns, error " + fixed(best.error) +
                    (best.at_boundary ? " (at t_max boundary)" : "") +
                    (best.non_unimodal ? " (non-unimodal scan)" : ""));
  if (!ensemble.empty()) {
    out.log.push_back("mean first-bunch photons " +
                      fixed(bunch / static_cast<double>(ensemble.size())));
  }
  out.log.push_back("detection error " + fixed(detection_error(rc.epsilon, rc.eta)));
  return out;
}

CommandOutput cmd_spectral(const ResolvedConfig& c, const RunOptions&) {
  PhononBath bath = bath_from(c);
  const long long n = c.integer("grid.points");
  if (n < 2) throw Error(ErrorCode::config_error, "grid.points must be >= 2");
  PhononBath deformation = bath, piezo = bath;
  deformation.coupling = Coupling::deformation;
  piezo.coupling = Coupling::piezoelectric;
  const double wl = bath.omega_l();
  const double lo = 1e-4 * wl, hi = 10.0 * wl;
  CsvTable table{"j_omega.csv", {"omega_meV", "J_deformation", "J_piezo"}, {}};
  for (long long k = 0; k < n; ++k) {
    const double w = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(n - 1));
    table.rows.push_back({w, spectral_j(deformation, w), spectral_j(piezo, w)});
  }
  CommandOutput out;
  const double sd = loglog_slope(deformation, lo, 1e-2 * wl);
  const double sp = loglog_slope(piezo, lo, 1e-2 * wl);
  out.log.push_back("deformation slope " + fixed(sd, 5) + " (expected " +
                    fixed(deformation.exponent()) + ")");
  out.log.push_back("piezoelectric slope " + fixed(sp, 5) + " (expected " +
                    fixed(piezo.exponent()) + ")");
  out.tables.push_back(std::move(table));
  return out;
}

int run_command(const std::string& command, const RunOptions& opts) {
  try {
    omp_set_num_threads(std::max(opts.jobs, 1));
    const auto schema = command_schema(command);
    const ResolvedConfig cfg =
        load_config(opts.config, command, schema, command_sweeps(command), opts.seed);
    if (opts.verbose) std::cerr << "config hash " << hex64(cfg.hash()) << "\n";
    CommandOutput out;
    if (command == "gate") out = cmd_gate(cfg, opts);
    else if (command == "fidelity-sweep") out = cmd_fidelity_sweep(cfg, opts);
    else if (command == "readout") out = cmd_readout(cfg, opts);
    else out = cmd_spectral(cfg, opts);
    write_atomically(opts.out, out.tables, cfg.hash());
    for (const auto& line : out.log) std::cout << line << "\n";
    if (opts.verbose) {
      for (const auto& t : out.tables) {
        std::cerr << "wrote " << (opts.out / t.name).string() << " (" << t.rows.size()
                  << " rows)\n";
      }
    }
    return exit_ok;
  } catch (const Error& e) {
    std::cerr << "qdsim: " << e.what() << "\n";
    return is_numeric_failure(e.code()) ? exit_numeric_failure : exit_config_error;
  } catch (const std::exception& e) {
    std::cerr << "qdsim: " << e.what() << "\n";
    return exit_numeric_failure;
  }
}

}  // namespace qdgate::cli
