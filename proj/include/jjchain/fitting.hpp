#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jjchain/chain_model.hpp"
#include "jjchain/least_squares.hpp"
#include "jjchain/spectra.hpp"

namespace jjchain {

struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;
  double residual_norm = 0.0;
  int iterations = 0;
  std::vector<std::string> warnings;

  double value(const std::string& name) const;
  double std_error(const std::string& name) const;
};

struct DispersionPoint {
  int k = 0;
  double f_hz = 0.0;
};

/// Fits the saturating dispersion to measured mode frequencies; returns (v [m/s], omega_p [rad/s]).
/// Starts from the slope of the two lowest modes for v and inverts the model at the highest mode for omega_p.
FitResult fit_dispersion(std::span<const DispersionPoint> points, double length_m, const LmOptions& opt = {});

struct CrossingFitOptions {
  bool complex_fit = false;  ///< default fits |S21|, absorbing any phase offset
  LmOptions lm{};
};

/// Fits the pairwise avoided-crossing model; returns (g, omega_i, omega_j, kappa, kappa_ex[, phi]) in rad/s.
/// g is reported non-negative; an unresolved splitting (g < kappa/4) adds a warning.
FitResult fit_avoided_crossing(const TransmissionTrace& trace, double delta, const CrossingFitOptions& opt = {});

/// Ordinary least squares of log y on log x; returns (exponent, prefactor) for y = prefactor * x^exponent.
FitResult fit_power_law(std::span<const double> x, std::span<const double> y);

/// Pointwise complex subtraction in linear units; grids must match exactly.
TransmissionTrace subtract_background(const TransmissionTrace& signal, const TransmissionTrace& background);

struct GainPoint {
  double temperature_k = 0.0;
  double power_w = 0.0;
};

struct GainWindow {
  double t_min = 0.25;
  double t_max = 1.4;
};

/// Linear fit P = G (T + T_add) over points inside the window; returns (G, T_add).
FitResult calibrate_gain(std::span<const GainPoint> points, GainWindow window = {});

struct PsdTrace {
  Eigen::ArrayXd freq_hz;
  Eigen::ArrayXd psd;  ///< W/Hz; difference traces may be negative
  double band_lo_hz = 0.0;
  double band_hi_hz = 0.0;
  bool is_difference = true;
};

/// Whether kappa_ex is used as the emission rate in 1/s as given (angular) or divided by 2 pi first.
enum class KappaConvention { angular, ordinary };

inline constexpr double kDefaultPsdBandHz = 15e6;

/// PSD trace whose integration band is `width_hz` centred on `centre_hz`.
PsdTrace make_psd_trace(Eigen::ArrayXd freq_hz, Eigen::ArrayXd psd, double centre_hz,
                        double width_hz = kDefaultPsdBandHz);

/// n = (1 / kappa_ex) * integral over the band of dP / (G h f) df, trapezoidal with interpolated band edges.
double occupation_from_psd(const PsdTrace& trace, double kappa_ex, double gain,
                           KappaConvention convention = KappaConvention::angular);

/// Photons in a mode from its emitted power, P_N / (G kappa_ex) / (h f_N).
double scattered_photon_estimate(double p_n_watts, double gain, double kappa_ex, double f_n_hz,
                                 KappaConvention convention = KappaConvention::angular);

/// Resonant-scattering estimate n_k g / kappa.
double cross_check_resonant_scattering(double n_k, double g, double kappa);

}  // namespace jjchain
