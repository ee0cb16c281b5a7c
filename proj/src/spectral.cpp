#include "qdgate/spectral.hpp"

#include <cmath>
#include <functional>

#include "qdgate/error.hpp"
#include "qdgate/quadrature.hpp"
#include "qdgate/units.hpp"

namespace qdgate {

namespace {

constexpr double pi = units::pi;

QuadratureOptions angular_options() {
  QuadratureOptions o;
  o.rel_tol = 1e-11;
  o.abs_tol = 1e-14;
  return o;
}

// 1 - sin(z)/z
double one_minus_sinc(double z) {
  const double z2 = z * z;
  if (std::abs(z) < 1e-3) return z2 / 6.0 - z2 * z2 / 120.0;
  return 1.0 - std::sin(z) / z;
}

// (e^{-x/2} - e^{-y/2})^2 without cancellation.
double squared_gaussian_gap(double x, double y) {
  const double d = -2.0 * std::exp(-0.25 * (x + y)) * std::sinh(0.25 * (x - y));
  return d * d;
}

double surface_average(double x, const std::function<double(double)>& kernel) {
  // (2/pi) int_0^{pi/2} sin(theta) int_0^{pi/2} kernel(x sin(theta) cos(phi)) dphi dtheta
  const QuadratureOptions opts = angular_options();
  const auto inner = [&](double theta) {
    const double s = std::sin(theta);
    const auto g = [&](double phi) { return kernel(x * s * std::cos(phi)); };
    return s * integrate_gk(g, 0.0, 0.5 * pi, opts);
  };
  return (2.0 / pi) * integrate_gk(inner, 0.0, 0.5 * pi, opts);
}

double piezo_moment(double x, double (*kernel)(double)) {
  const auto g = [x, kernel](double c) {
    const double w = 1.0 - c * c;
    return c * c * w * w * kernel(x * c);
  };
  return (105.0 / 8.0) * integrate_gk(g, 0.0, 1.0, angular_options());
}

double joule_to_mev(double e) { return e / units::joule_per_meV; }

}  // namespace

void PhononBath::validate() const {
  const Material& m = material;
  const bool ok = m.rho_kg_m3 > 0.0 && m.u_m_s > 0.0 && m.eps_r > 0.0 && l_nm > 0.0 &&
                  r0_nm >= 0.0 && lz_nm >= 0.0 && temperature_K >= 0.0 && calibration >= 0.0 &&
                  std::isfinite(m.d_c_eV) && std::isfinite(m.d_v_eV) && std::isfinite(m.e14_C_m2) &&
                  std::isfinite(l_h_nm);
  if (!ok) throw Error(ErrorCode::invalid_argument, "invalid phonon bath parameters");
}

PhononBath PhononBath::at_temperature(double temperature) const {
  PhononBath b = *this;
  b.temperature_K = temperature;
  return b;
}

double PhononBath::omega_l() const {
  return joule_to_mev(units::hbar_J_s * material.u_m_s / (l_nm * units::metre_per_nm));
}

double PhononBath::hole_length_nm() const { return l_h_nm > 0.0 ? l_h_nm : 0.8 * l_nm; }

double PhononBath::piezo_coupling() const {
  return 6.0 * units::elementary_charge_C * material.e14_C_m2 /
         (units::vacuum_permittivity_F_m * material.eps_r);
}

double PhononBath::exponent() const { return coupling == Coupling::deformation ? 3.0 : 5.0; }

double spectral_j(const PhononBath& bath, double omega) {
  if (std::isnan(omega) || omega < 0.0) {
    throw Error(ErrorCode::negative_frequency, "spectral function needs omega >= 0");
  }
  if (omega == 0.0 || bath.calibration == 0.0) return 0.0;
  const Material& m = bath.material;
  const double e = omega * units::joule_per_meV;
  const double q = e / (units::hbar_J_s * m.u_m_s);  // phonon wave number, 1/m
  const double r0 = bath.r0_nm * units::metre_per_nm;
  double j = 0.0;
  if (bath.coupling == Coupling::deformation) {
    const double l = bath.l_nm * units::metre_per_nm;
    const double dc = m.d_c_eV * units::joule_per_eV, dv = m.d_v_eV * units::joule_per_eV;
    const double z = 2.0 * q * r0;
    const double complement = bath.geometry == Geometry::spherical
                                  ? one_minus_sinc(z)
                                  : angular_average_f1_complement(z);
    // Dc^2 + Dv^2 - 2 Dc Dv g  =  (Dc - Dv)^2 + 2 Dc Dv (1 - g)
    const double bracket = (dc - dv) * (dc - dv) + 2.0 * dc * dv * complement;
    const double hb3 = units::hbar_J_s * units::hbar_J_s * units::hbar_J_s;
    j = e * e * e / (4.0 * pi * pi * m.rho_kg_m3 * std::pow(m.u_m_s, 5) * hb3) *
        std::exp(-0.5 * q * q * l * l) * bracket;
  } else {
    const double lc = bath.l_nm * units::metre_per_nm;
    const double lv = bath.hole_length_nm() * units::metre_per_nm;
    const double x = 0.5 * q * q * lc * lc, y = 0.5 * q * q * lv * lv;
    const double z = 2.0 * q * r0;
    const double complement = z == 0.0 ? 0.0 : piezo_angular_complement(z);
    // e^{-x} + e^{-y} - 2 e^{-(x+y)/2} f  =  (e^{-x/2} - e^{-y/2})^2 + 2 e^{-(x+y)/2} (1 - f)
    const double bracket = squared_gaussian_gap(x, y) + 2.0 * std::exp(-0.5 * (x + y)) * complement;
    const double mm = bath.piezo_coupling();
    const double w = e / units::hbar_J_s;
    j = mm * mm * w / (420.0 * pi * pi * m.rho_kg_m3 * std::pow(m.u_m_s, 3)) * bracket;
  }
  return bath.calibration * joule_to_mev(j);
}

double piezo_small_omega(const PhononBath& bath, double omega) {
  const Material& m = bath.material;
  const double w = omega * units::joule_per_meV / units::hbar_J_s;
  const double lc = bath.l_nm * units::metre_per_nm;
  const double lv = bath.hole_length_nm() * units::metre_per_nm;
  const double mm = bath.piezo_coupling();
  const double d = lc * lc - lv * lv;
  const double j = mm * mm * std::pow(w, 5) * d * d /
                   (6720.0 * pi * pi * m.rho_kg_m3 * std::pow(m.u_m_s, 7));
  return bath.calibration * joule_to_mev(j);
}

double angular_average_f1(double x) {
  if (x < 0.0) throw Error(ErrorCode::invalid_argument, "f1 needs x >= 0");
  if (x == 0.0) return 1.0;
  return surface_average(x, [](double a) { return std::cos(a); });
}

double angular_average_f1_complement(double x) {
  if (x < 0.0) throw Error(ErrorCode::invalid_argument, "f1 needs x >= 0");
  if (x == 0.0) return 0.0;
  return surface_average(x, [](double a) {
    const double s = std::sin(0.5 * a);
    return 2.0 * s * s;
  });
}

double piezo_angular(double x) {
  return piezo_moment(x, [](double a) { return std::cos(a); });
}

double piezo_angular_complement(double x) {
  return piezo_moment(x, [](double a) {
    const double s = std::sin(0.5 * a);
    return 2.0 * s * s;
  });
}

double bose_n(double omega, double temperature) {
  if (!(omega > 0.0)) throw Error(ErrorCode::nonpositive_frequency, "bose_n needs omega > 0");
  if (!(temperature >= 0.0)) throw Error(ErrorCode::invalid_argument, "temperature must be >= 0");
  if (temperature == 0.0) return 0.0;
  return 1.0 / std::expm1(omega / (units::kB_meV_per_K * temperature));
}

double thermal_weight(double omega, double temperature) {
  if (temperature == 0.0) return 1.0;
  return 1.0 + 2.0 * bose_n(omega, temperature);
}

double loglog_slope(const PhononBath& bath, double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo)) throw Error(ErrorCode::invalid_argument, "need 0 < lo < hi");
  constexpr int n = 21;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < n; ++k) {
    const double x = std::log(lo) + (std::log(hi) - std::log(lo)) * k / (n - 1);
    const double j = spectral_j(bath, std::exp(x));
    if (!(j > 0.0)) throw Error(ErrorCode::divergent_integral, "J vanishes on the slope grid");
    const double y = std::log(j);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qdgate
