#pragma once

#include <numbers>

namespace spsim {

// Internal unit system: time in microseconds, angular frequencies in rad/us.
// Config files use ordinary (non-angular) frequencies with unit suffixes.

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * kPi;

// Speed of light, m/s.
inline constexpr double kSpeedOfLight = 299792458.0;

// Bohr magneton over Planck constant, GHz/T (CODATA 2018).
inline constexpr double kBohrMagnetonGHzPerTesla = 13.996244936;

// Ordinary frequency in MHz -> angular frequency in rad/us.
inline constexpr double mhz_to_angular(double f_mhz) { return kTwoPi * f_mhz; }
inline constexpr double khz_to_angular(double f_khz) { return kTwoPi * f_khz * 1e-3; }
inline constexpr double angular_to_mhz(double w) { return w / kTwoPi; }

}  // namespace spsim
