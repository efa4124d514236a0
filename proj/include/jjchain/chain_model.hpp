#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "jjchain/units.hpp"

namespace jjchain {

/// Microscopic chain energies, all given as E/h in Hz.
struct ChainParams {
  double e_j_hz = 0.0;   ///< Josephson energy
  double e_c_hz = 0.0;   ///< junction charging energy
  double e_g_hz = 0.0;   ///< charging energy to ground
  int n_junctions = 0;
  double length_mm = 0.0;       ///< reporting only
  double impedance_ohm = 0.0;   ///< informational, never used in a formula

  /// Throws ValidationError unless all energies and the junction count are positive.
  void validate() const;
};

/// Phenomenological saturating dispersion 2 pi f_k = v q / sqrt(1 + (v q / omega_p)^2), q = k pi / L.
struct DispersionParams {
  double v = 0.0;          ///< m/s, so that v * q is in rad/s
  double omega_p = 0.0;    ///< rad/s
  double length_m = 0.0;

  void validate() const;
  double quasimomentum(int k) const { return k * std::numbers::pi / length_m; }
};

struct LuttingerParams {
  double k_g = 0.0;     ///< dimensionless
  double v_s_hz = 0.0;  ///< sqrt(2 E_J E_g), in Hz
};

/// Mode frequencies and per-terminal / internal loss rates for k = 1..k_max, all rad/s.
/// Index 0 of every array is mode k = 1.
struct ModeTable {
  Eigen::ArrayXd omega;
  Eigen::ArrayXd kappa_ex;
  Eigen::ArrayXd kappa_i;

  int k_max() const { return static_cast<int>(omega.size()); }
  double omega_of(int k) const { return omega(k - 1); }
  double kappa_ex_of(int k) const { return kappa_ex(k - 1); }
  double kappa_i_of(int k) const { return kappa_i(k - 1); }
  /// Total linewidth 2 kappa_ex + kappa_i.
  double kappa_of(int k) const { return 2.0 * kappa_ex(k - 1) + kappa_i(k - 1); }
  Eigen::ArrayXd kappa_total() const { return 2.0 * kappa_ex + kappa_i; }
  double mean_kappa() const { return kappa_total().mean(); }

  void validate() const;
};

/// Per-mode replacement applied on top of the defaults in build_mode_table (rad/s).
struct ModeOverride {
  int k = 0;
  std::optional<double> omega;
  std::optional<double> kappa_ex;
  std::optional<double> kappa_i;
};

// Defaults: kappa_ex/2pi = 0.4 MHz per terminal and kappa_i/2pi = 0.9 MHz give a
// total linewidth of 1.7 MHz, and 173 modes were identified in the measured chain.
inline constexpr double kDefaultKappaExHz = 0.4e6;
inline constexpr double kDefaultKappaIHz = 0.9e6;
inline constexpr int kDefaultKMax = 173;

/// omega_k = 2 pi sqrt(2 e_g e_j) pi k / N in rad/s; the single 2 pi converts E/h to E/hbar.
double linear_mode_frequency(int k, const ChainParams& params);

template <typename Scalar>
Scalar saturating_dispersion(const Scalar& v, const Scalar& omega_p, double quasimomentum) {
  using std::sqrt;
  const Scalar x = v * quasimomentum;
  const Scalar r = x / omega_p;
  return x / sqrt(Scalar(1) + r * r);
}

double sqrt_mode_frequency(int k, const DispersionParams& disp);

LuttingerParams luttinger_params(const ChainParams& params);

/// Inverse of luttinger_params: returns (e_j_hz, e_g_hz).
std::pair<double, double> energies_from_luttinger(const LuttingerParams& lp);

ModeTable build_mode_table(const ChainParams& params, int k_max, double kappa_ex_default,
                           double kappa_i_default, std::span<const ModeOverride> overrides = {});
ModeTable build_mode_table(const DispersionParams& disp, int k_max, double kappa_ex_default,
                           double kappa_i_default, std::span<const ModeOverride> overrides = {});

}  // namespace jjchain
