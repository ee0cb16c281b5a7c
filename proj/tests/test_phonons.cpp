#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/oracles.hpp"
#include "qdgate/error.hpp"
#include "qdgate/phonons.hpp"
#include "qdgate/units.hpp"

using namespace qdgate;

namespace {

PhononBath gaas(double l_nm = 20.0, double temperature = 0.0) {
  PhononBath b;
  b.l_nm = l_nm;
  b.temperature_K = temperature;
  return b;
}

PhononBath silent() {
  PhononBath b;
  b.calibration = 0.0;
  return b;
}

double simpson_moment(const PhononBath& b, const std::function<double(double)>& g) {
  return oracle::simpson([&](double w) { return w == 0.0 ? 0.0 : spectral_j(b, w) * g(w); }, 0.0,
                         10.0 * b.omega_l(), 200000);
}

// Frozen from the library at GaAs defaults, l = 20 nm, T = 0.
constexpr double frozen_huang_rhys = 0.0010330231835083;
constexpr double frozen_detuning_shift = -0.00021773421418064;
constexpr double frozen_damping_rate = 0.000610402225282324;

}  // namespace

TEST(Renormalization, SilentBathLeavesParameters) {
  EXPECT_DOUBLE_EQ(renormalized_rabi(3.0, silent()), 3.0);
  EXPECT_DOUBLE_EQ(renormalized_detuning(1.5, silent()), 1.5);
}

TEST(Renormalization, HuangRhysAgainstSimpson) {
  const PhononBath b = gaas();
  const double oracle_value = 0.5 * simpson_moment(b, [](double w) { return 1.0 / (w * w); });
  EXPECT_NEAR(huang_rhys_exponent(b) / oracle_value, 1.0, 1e-7);
  EXPECT_NEAR(huang_rhys_exponent(b), frozen_huang_rhys, 1e-12);
  const double rel = (3.0 - renormalized_rabi(3.0, b)) / 3.0;
  EXPECT_GT(rel, 0.0);
  EXPECT_LT(rel, 1e-2);
}

TEST(Renormalization, DetuningShiftAgainstSimpson) {
  const PhononBath b = gaas();
  const double oracle_shift = -0.5 * simpson_moment(b, [](double w) { return 1.0 / w; });
  EXPECT_NEAR(renormalized_detuning(0.0, b) / oracle_shift, 1.0, 1e-7);
  EXPECT_NEAR(renormalized_detuning(0.0, b), frozen_detuning_shift, 1e-13);
  EXPECT_LT(renormalized_detuning(2.0, b), 2.0);
}

TEST(Renormalization, TemperatureOnlySuppresses) {
  double prev = renormalized_rabi(1.0, gaas(20.0, 0.0));
  for (double t : {1.0, 4.0, 20.0}) {
    const double r = renormalized_rabi(1.0, gaas(20.0, t));
    EXPECT_LE(r, prev);
    prev = r;
  }
}

TEST(EnergyShift, SilentBathAndZeroAngle) {
  const EnergyShift z = perturbative_energy_shift(0.7, 0.1, 0.3, silent());
  EXPECT_EQ(z.plus, 0.0);
  EXPECT_EQ(z.minus, 0.0);
  const PhononBath b = gaas();
  const EnergyShift e = perturbative_energy_shift(0.0, -0.3, 0.0, b);
  EXPECT_NEAR(e.plus, simpson_moment(b, [](double w) { return 1.0 / w; }), 1e-9);
  EXPECT_EQ(e.minus, 0.0);
}

TEST(EnergyShift, RoutesAgreeWithinExpansionParameter) {
  const PhononBath b = gaas();
  const double wl = b.omega_l();
  const double expansion = spectral_j(b, wl) / wl;
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double omega = 0.3 * wl * std::abs(u(rng)) + 1e-3;
    const double delta = 0.3 * wl * u(rng);
    const double theta = std::atan2(omega, -delta);
    const EnergyShift p = perturbative_energy_shift(theta, delta, omega, b);
    const EnergyShift a = adiabatic_expansion_shift(theta, delta, omega, b);
    const double bound = 3.0 * expansion * std::hypot(delta, omega);
    EXPECT_LE(std::abs(p.plus - a.plus), bound);
    EXPECT_LE(std::abs(p.minus - a.minus), bound);
  }
}

TEST(EnergyShift, ResonantExample) {
  const PhononBath b = gaas();
  const double omega = 0.3, theta = units::pi / 2.0;
  const EnergyShift p = perturbative_energy_shift(theta, 0.0, omega, b);
  const EnergyShift a = adiabatic_expansion_shift(theta, 0.0, omega, b);
  const double bound = 3.0 * spectral_j(b, b.omega_l()) / b.omega_l() * omega;
  EXPECT_LE(std::abs(p.plus - a.plus), bound);
  EXPECT_LE(std::abs(p.minus - a.minus), bound);
}

TEST(LzPhonon, Examples) {
  const PhononBath b = gaas();
  EXPECT_EQ(lz_phonon_assisted(0.5, 1e-6, b), 0.0);
  EXPECT_EQ(lz_phonon_assisted(0.5, 0.1, silent()), 0.0);
  double prev = 1.0;
  for (double omega : {0.2, 0.3, 0.5, 0.8}) {
    const double p = lz_phonon_assisted(omega, 0.05, b);
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(RabiDamping, WeakAndFrozen) {
  const PhononBath b = gaas();
  EXPECT_EQ(rabi_damping_rate(0.3, silent()), 0.0);
  EXPECT_NEAR(rabi_damping_rate(0.3, b), spectral_j(b, 0.3) / units::hbar_meV_ps, 1e-18);
  EXPECT_NEAR(rabi_damping_rate(0.3, b), frozen_damping_rate, 1e-15);
  for (double omega : {0.01, 0.02, 0.05}) EXPECT_LT(spectral_j(b, omega) / omega, 1e-2);
  EXPECT_DOUBLE_EQ(rabi_ground_population(0.0, 0.3, 0.0, 0.1), 1.0);
  EXPECT_NEAR(rabi_ground_population(1e6, 0.3, 0.0, 0.1), 0.5, 1e-12);
  const double t = units::pi * units::hbar_meV_ps / 0.3;
  EXPECT_NEAR(rabi_ground_population(t, 0.3, 0.0, 0.0), 0.0, 1e-12);
}

TEST(OpticalPhonons, Examples) {
  EXPECT_EQ(optical_phonon_suppression(36.0, 0.0, 1.0), 0.0);
  EXPECT_NEAR(optical_phonon_suppression(2.0, 2.0, 1.0), 1.0 / (std::exp(1.0) * 2.0), 1e-15);
  double prev = 0.0;
  for (double wm : {0.5, 1.0, 2.0, 5.0}) {
    const double g = optical_phonon_suppression(36.0, wm, 1.0);
    EXPECT_GT(g, prev);
    prev = g;
  }
}

TEST(BesselK1, SeriesJoinsLibrary) {
  EXPECT_NEAR(bessel_k1(0.999e-3) / bessel_k1(1.001e-3), 1.001 / 0.999, 1e-5);
  EXPECT_NEAR(bessel_k1(1.0), 0.601907230197235, 1e-14);
  EXPECT_THROW(bessel_k1(0.0), Error);
}

TEST(LinearSweepGamma, LinearInTemperatureWhenHot) {
  const PhononBath b = gaas(10.0);
  const double omega = 1.0, rate = 0.304;
  const double g20 = dephasing_linear_sweep(omega, rate, b.at_temperature(20.0));
  const double g40 = dephasing_linear_sweep(omega, rate, b.at_temperature(40.0));
  EXPECT_NEAR(g40 / g20, 2.0, 0.2);
}

TEST(LinearSweepGamma, ZeroTemperatureOrderOfMagnitude) {
  for (double l : {10.0, 15.0, 20.0}) {
    const PhononBath b = gaas(l);
    const double omega = 1.0, rate = 0.05;
    const double wm = units::hbar_meV_ps * rate / omega;
    const double ratio = dephasing_linear_sweep(omega, rate, b) * wm / spectral_j(b, wm);
    EXPECT_GE(ratio, 0.1) << l;
    EXPECT_LE(ratio, 10.0) << l;
  }
  EXPECT_EQ(dephasing_linear_sweep(1.0, 0.1, silent()), 0.0);
}

TEST(LinearSweepGamma, MonotoneInTemperature) {
  const PhononBath b = gaas(15.0);
  double prev = 0.0;
  for (double t : {0.0, 0.1, 1.0, 4.0, 20.0}) {
    const double g = dephasing_linear_sweep(1.0, 0.1, b.at_temperature(t));
    EXPECT_GE(g, prev);
    prev = g;
  }
}

TEST(Superohmic, CancelledCouplingIsSilent) {
  // Equal potentials and zero field cancel J entirely; silence is not divergence.
  PhononBath b = gaas();
  b.material.d_v_eV = b.material.d_c_eV;
  EXPECT_DOUBLE_EQ(renormalized_rabi(1.0, b), 1.0);
}
