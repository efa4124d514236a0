#pragma once

#include <cmath>
#include <numbers>

// Unit convention: every rate and frequency handled by the library is an
// angular frequency in rad/s. Files and command-line flags use Hz, and chain
// energies are given as E/h in Hz.
namespace jjchain {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K
inline constexpr double kHbar = kPlanck / kTwoPi;

constexpr double hz_to_angular(double f_hz) { return kTwoPi * f_hz; }
constexpr double angular_to_hz(double omega) { return omega / kTwoPi; }

/// Power in dBm to watts, exactly 10^((dBm - 30)/10).
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

}  // namespace jjchain
