#pragma once

namespace qdgate {

enum class Coupling { deformation, piezoelectric };
enum class Geometry { spherical, quasi2d };

// GaAs-like defaults; calibration inputs, not fitted values.
struct Material {
  double rho_kg_m3 = 5370.0;
  double u_m_s = 5110.0;
  double d_c_eV = -14.6;
  double d_v_eV = -4.8;
  double e14_C_m2 = 0.16;
  double eps_r = 12.9;
};

struct PhononBath {
  Coupling coupling = Coupling::deformation;
  Geometry geometry = Geometry::spherical;
  Material material;
  double l_nm = 20.0;
  double l_h_nm = 0.0;   // hole length for the piezoelectric form; <= 0 selects 0.8*l
  double lz_nm = 0.0;    // quasi2d well width; only the strong-confinement limit is modelled
  double r0_nm = 0.0;    // field-induced electron-hole displacement
  double temperature_K = 0.0;
  double calibration = 1.0;  // global factor on J

  void validate() const;
  PhononBath at_temperature(double temperature) const;

  double omega_l() const;         // hbar*u/l, meV
  double hole_length_nm() const;
  double piezo_coupling() const;  // M, J/m
  // Small-omega power law: 3 for deformation, 5 for piezoelectric at r0 = 0.
  double exponent() const;
};

// J(omega) in meV for omega in meV; zero for omega = 0.
double spectral_j(const PhononBath& bath, double omega);

// Leading small-omega piezoelectric form M^2 w^5 (l_c^2 - l_v^2)^2 / (6720 pi^2 rho u^7), meV.
double piezo_small_omega(const PhononBath& bath, double omega);

// (1/4pi) * surface integral of cos(x sin(theta) cos(phi)), by nested adaptive quadrature.
double angular_average_f1(double x);
// 1 - f1(x), computed without cancellation.
double angular_average_f1_complement(double x);

// Field-direction factor of the piezoelectric form: (105/8) int_0^1 c^2 (1-c^2)^2 cos(x c) dc.
double piezo_angular(double x);
double piezo_angular_complement(double x);

// Bose occupation at energy omega (meV) and temperature (K); 0 at T = 0.
double bose_n(double omega, double temperature);
// 1 + 2N = coth(omega / 2kT); 1 at T = 0.
double thermal_weight(double omega, double temperature);

// Least-squares log-log slope of J over a 21-point log grid on [lo, hi].
double loglog_slope(const PhononBath& bath, double lo, double hi);

}  // namespace qdgate
