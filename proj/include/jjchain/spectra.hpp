#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "jjchain/chain_model.hpp"
#include "jjchain/tridiagonal.hpp"

namespace jjchain {

/// Two coherent pumps on modes p < q, with Delta = omega_q^pump - omega_p^pump in rad/s.
struct DriveSpec {
  int p = 1;
  int q = 2;
  double delta = 0.0;
  double n_p = 0.0;
  double n_q = 0.0;

  int spacing() const { return q - p; }
  void validate() const;
};

/// Modes k + j*spacing for j = -i_max..i_max, stored with j = -i_max at index 0.
struct CascadeSystem {
  int k = 1;
  int i_max = 1;
  Eigen::ArrayXd freqs_prime;  ///< driven (Kerr-shifted) frequencies, rad/s
  Eigen::ArrayXd kappas;       ///< total linewidths, rad/s
  Eigen::ArrayXd couplings;    ///< bond (j-1, j) effective coupling, rad/s

  Eigen::Index dimension() const { return 2 * i_max + 1; }
  void validate() const;
};

struct TraceMeta {
  std::string model;
  std::optional<DriveSpec> drive;
  std::optional<ModeTable> modes;
  std::string timestamp;
  std::vector<std::string> history;
};

struct TransmissionTrace {
  Eigen::ArrayXd freq_hz;
  Eigen::ArrayXcd s21;
  TraceMeta meta;
};

/// A (Delta x f_ro) grid of transmission values; row r belongs to delta_hz(r).
struct TransmissionMap {
  Eigen::ArrayXd freq_hz;
  Eigen::ArrayXd delta_hz;
  Eigen::ArrayXXcd s21;
};

/// Single avoided crossing between the read-out mode i and mode j:
/// S21 = kappa_ex / (kappa/2 - i(w - w_i) + g^2 / (kappa/2 - i(w - w_j - Delta))).
TransmissionTrace s21_pairwise(const Eigen::ArrayXd& omega_grid, double omega_i, double omega_j, double delta,
                               double g, double kappa, double kappa_ex);

/// Read-out mode k hybridized with k - spacing (shifted by +Delta) and k + spacing (shifted by -Delta),
/// with a common linewidth and coupling.
TransmissionTrace s21_two_neighbors(const Eigen::ArrayXd& omega_grid, double omega_k, double omega_km,
                                    double omega_kp, double delta, double g, double kappa, double kappa_ex);

/// Complex-symmetric tridiagonal coupled-mode matrix in the frame rotating at j*Delta:
/// A[j,j] = w'_{k+j spacing} - j Delta - i kappa_j / 2, off-diagonals equal to the bond couplings.
Tridiagonal<std::complex<double>> build_cascade_matrix(const CascadeSystem& sys, const DriveSpec& drive);

/// S21(w) = i kappa_ex,k [(w I - A)^-1]_{cc}, c the read-out row, via one tridiagonal solve per point.
TransmissionTrace s21_cascade(const Eigen::ArrayXd& omega_grid, const CascadeSystem& sys, const DriveSpec& drive,
                              double kappa_ex_k, int threads = 1);

/// Builds a CascadeSystem from a mode table (undriven frequencies stand in for the primed ones)
/// with couplings |K_{p,q,a,b}| sqrt(n_p n_q) between neighbouring members of the ladder.
CascadeSystem cascade_system_from_chain(int k, int i_max, const DriveSpec& drive, const ModeTable& modes,
                                        const ChainParams& chain);

/// Bare |K| for each bond of the ladder, in rad/s per photon.
Eigen::ArrayXd cascade_bond_elements(int k, int i_max, const DriveSpec& drive, const ChainParams& chain);

/// Sweeps Delta over `delta_grid` (rad/s), rows computed independently.
TransmissionMap s21_cascade_map(const Eigen::ArrayXd& omega_grid, const Eigen::ArrayXd& delta_grid,
                                const CascadeSystem& sys, const DriveSpec& drive, double kappa_ex_k, int threads = 1);

/// The five-parameter model used to fit measured cascade maps.
struct CascadeFit {
  double kappa_fit = 0.0;   ///< common linewidth, rad/s
  double alpha_fit = 0.0;   ///< relative frequency correction applied to every diagonal entry
  double n_pump_fit = 0.0;  ///< sqrt(n_p n_q) used with the bare elements
  double s_fit = 1.0;       ///< magnitude calibration
  double phi_fit = 0.0;     ///< phase calibration, rad
};

/// S21 = i S_fit kappa_ex,k [(w I - A_fit)^-1]_{cc} e^{i phi_fit}, with
/// A_fit[j,j] = w'_j (1 + alpha_fit) - j Delta - i kappa_fit/2 and off-diagonals elements * n_pump_fit.
TransmissionTrace s21_cascade_fit_model(const Eigen::ArrayXd& omega_grid, const CascadeSystem& sys,
                                        const DriveSpec& drive, const Eigen::ArrayXd& bond_elements,
                                        const CascadeFit& fit, double kappa_ex_k);

enum class PumpingSide { below, above };

/// Line along which the order-i feature sits, in (f_ro - f_k [Hz], Delta/2pi [Hz]) coordinates.
struct GuideLine {
  int order = 0;
  double slope = 0.0;
  double intercept_hz = 0.0;
};

/// Energy conservation f'_{k+i spacing} - f_ro = i Delta / 2pi. Pumps above k give slope -1/i;
/// pumps below k are swept with the lower pump, which reverses the sign of Delta and gives +1/i.
/// `freqs_prime` uses the CascadeSystem layout (centre entry is mode k).
GuideLine resonance_guide(int i, const Eigen::ArrayXd& freqs_prime, PumpingSide side);
std::vector<GuideLine> resonance_guides(const Eigen::ArrayXd& freqs_prime, PumpingSide side);

}  // namespace jjchain
