#pragma once

// Internal unit system: lengths in nm, times in ps, energies in meV,
// electron charge Q = 1. Fields are therefore mV/nm and potentials mV.

namespace qdmol::units {

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double kHbar = 0.6582120;            // meV ps
inline constexpr double kHbar2Over2M0 = 38.0998;      // meV nm^2
inline constexpr double kCoulomb = 1439.96;           // e^2/(4 pi eps0), meV nm
inline constexpr double kBoltzmann = 0.0861733;       // meV / K
inline constexpr double kPlanck = 4.135667;           // meV / THz
inline constexpr double kElectronCharge = 1.0;

// SI anchors used when a formula is naturally written in SI (phonon rates).
namespace si {
inline constexpr double kJoulePerMeV = 1.602176634e-22;
inline constexpr double kJoulePerEV = 1.602176634e-19;
inline constexpr double kMeterPerNm = 1e-9;
inline constexpr double kSecondPerPs = 1e-12;
inline constexpr double kHbar = 1.054571817e-34;      // J s
}  // namespace si

constexpr double mev_to_joule(double e) { return e * si::kJoulePerMeV; }
constexpr double joule_to_mev(double e) { return e / si::kJoulePerMeV; }
constexpr double nm_to_m(double x) { return x * si::kMeterPerNm; }
constexpr double m_to_nm(double x) { return x / si::kMeterPerNm; }
constexpr double ps_to_s(double t) { return t * si::kSecondPerPs; }
constexpr double s_to_ps(double t) { return t / si::kSecondPerPs; }
// 1 mV/nm = 1e6 V/m
constexpr double field_to_si(double e_mv_per_nm) { return e_mv_per_nm * 1e6; }
constexpr double field_from_si(double e_v_per_m) { return e_v_per_m * 1e-6; }
constexpr double per_ps_to_per_s(double r) { return r / si::kSecondPerPs; }
constexpr double per_s_to_per_ps(double r) { return r * si::kSecondPerPs; }

// Kinetic prefactor hbar^2 / (2 m*) for an effective mass ratio m*/m0.
constexpr double kinetic_prefactor(double mass_ratio) { return kHbar2Over2M0 / mass_ratio; }

constexpr double energy_to_thz(double mev) { return mev / kPlanck; }
constexpr double thz_to_energy(double thz) { return thz * kPlanck; }
// Angular frequency in rad/ps for a carrier given in THz.
constexpr double thz_to_angular(double thz) { return 2.0 * kPi * thz; }

}  // namespace qdmol::units
