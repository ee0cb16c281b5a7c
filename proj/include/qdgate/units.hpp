#pragma once

#include <numbers>

// Energies in meV, gate times in ps, readout times in ns, temperatures in K.
namespace qdgate::units {

inline constexpr double pi = std::numbers::pi;

inline constexpr double hbar_meV_ps = 0.6582119;
inline constexpr double hbar_meV_ns = hbar_meV_ps * 1e-3;
inline constexpr double kB_meV_per_K = 0.0861733;

inline constexpr double joule_per_meV = 1.602176634e-22;
inline constexpr double joule_per_eV = 1.602176634e-19;
inline constexpr double hbar_J_s = 1.054571817e-34;
inline constexpr double elementary_charge_C = 1.602176634e-19;
inline constexpr double vacuum_permittivity_F_m = 8.8541878128e-12;
inline constexpr double metre_per_nm = 1e-9;

}  // namespace qdgate::units
