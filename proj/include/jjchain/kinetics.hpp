#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

#include "jjchain/chain_model.hpp"

namespace jjchain {

/// Occupation-number kinetics of the driven chain.
///
/// dn_k/dt = -(kappa_k + dkappa_i,k)(n_k - n_k^th) + alpha kappa_ex,k n_k^flux + I_in[k] + I_out[k]
///
/// The collision integral runs over 2 -> 2 channels (p, k) <-> (q1, q2) with q1 > q2,
/// q1 + q2 = k + p (quasimomentum conserved with the sign pattern that matches energy
/// conservation) and q1, q2 != k. Each channel carries W = 2 pi |K|^2 delta_gamma(dw) with
/// gamma the summed linewidths of the four participants. With the linear dispersion every
/// selected channel is exactly resonant, so the broadening sets channel weights, not selection.
struct KineticConfig {
  ModeTable modes;
  ChainParams chain;
  double temperature = 0.01;           ///< K
  Eigen::ArrayXd flux;                 ///< photons per second per Hz, one entry per mode
  double alpha = 1.0;                  ///< insertion-loss correction on the pump term
  Eigen::ArrayXd extra_internal_loss;  ///< rad/s, one entry per mode
  double dt_factor = 0.01;             ///< time step in units of 1/kappa_0
  double tolerance = 1e-14;            ///< on sum_k |dn_k|^2 between consecutive steps
  int linewidth_update_stride = 10;
  long max_steps = 2'000'000;
  bool stability_guard = true;         ///< halve dt when any |dn_k| > 0.5 n_k + 1
  int threads = 1;

  void validate() const;
};

struct KineticState {
  Eigen::ArrayXd n;
  Eigen::ArrayXd excess;  ///< self-consistent dkappa_k, rad/s
  long steps = 0;
  double residual = 0.0;
  double dt = 0.0;                      ///< time step in use when the state was produced
  std::vector<double> residual_history; ///< residual sampled at every linewidth refresh
};

/// One precomputed scattering channel (p, k) <-> (q1, q2) of a read-out mode k.
struct Channel {
  int p = 0;
  int q1 = 0;
  int q2 = 0;
  double base = 0.0;      ///< 2 pi |K_{q1 q2 p k}|^2, (rad/s)^2
  double detuning = 0.0;  ///< w_q1 + w_q2 - w_p - w_k, rad/s
};

struct ChannelTerms {
  double in = 0.0;
  double out = 0.0;  ///< non-positive
};

/// A decay channel of mode k labelled by signed partner modes (s2 q1, s3 q2); p follows from
/// k + s1 p + s2 q1 + s3 q2 = 0.
struct DecayChannel {
  int q1 = 0;
  int q2 = 0;
  int s2 = 0;
  int s3 = 0;
  int p = 0;
  double rate = 0.0;  ///< contribution to dkappa_k, rad/s
};

struct DecayAnalysis {
  std::vector<DecayChannel> channels;  ///< descending rate, both orderings of (q1, q2)
  std::vector<double> cumulative;      ///< running sum / total
  double total = 0.0;
  int count_95 = 0;                    ///< ordered channels needed to reach 95 %
  double distinct_count_95 = 0.0;      ///< count_95 / 2 for q1 <-> q2 indistinguishability
};

/// Bose-Einstein occupation 1 / (exp(hbar omega / k_B T) - 1).
double thermal_occupation(double omega, double temperature);

/// Lorentzian (1/pi) gamma / (gamma^2 + omega^2) standing in for an energy delta function.
double broadened_delta(double omega, double gamma);

/// Sum over the four participants of (2 kappa_ex + kappa_i + dkappa).
double channel_gamma(int q1, int q2, int p, int k, const ModeTable& modes, const Eigen::ArrayXd& excess);

/// Photons per second per Hz for a PSD in W/Hz, n_flux = P / (h f_k).
double flux_from_psd(double psd_w_per_hz, double omega);

class KineticModel {
 public:
  explicit KineticModel(KineticConfig cfg);

  const KineticConfig& config() const { return cfg_; }
  int k_max() const { return cfg_.modes.k_max(); }
  const Eigen::ArrayXd& thermal() const { return thermal_; }
  std::size_t channel_count() const { return channels_.size(); }
  std::span<const Channel> channels(int k) const;

  /// Mean total linewidth, which sets the time step dt = dt_factor / kappa_0.
  double kappa0() const { return kappa0_; }
  double default_dt() const { return cfg_.dt_factor / kappa0_; }

  KineticState thermal_state() const;

  double collision_integral(int k, const KineticState& state) const;
  double excess_linewidth(int k, const KineticState& state) const;
  std::vector<ChannelTerms> channel_terms(int k, const KineticState& state) const;

  Eigen::ArrayXd collision_integrals(const KineticState& state) const;
  Eigen::ArrayXd excess_linewidths(const KineticState& state) const;

  /// Full right-hand side of the kinetic equation.
  Eigen::ArrayXd rates(const KineticState& state) const;

  /// One forward-Euler step; occupations are clamped at zero and the excess linewidths copied.
  KineticState step(const KineticState& state, double dt) const;

  /// Time-evolves until sum_k |dn_k|^2 <= tolerance, refreshing dkappa every stride steps.
  /// Starts from thermal occupations unless `initial` is given. Throws ConvergenceError at max_steps.
  KineticState solve_ness(const std::optional<KineticState>& initial = std::nullopt) const;

  DecayAnalysis decay_channels(int k, const KineticState& state) const;

 private:
  Eigen::ArrayXd channel_weights(const Eigen::ArrayXd& excess) const;
  void sweep(const Eigen::ArrayXd& n, const Eigen::ArrayXd& weights, Eigen::ArrayXd* collision,
             Eigen::ArrayXd* excess) const;
  Eigen::ArrayXd rates_with(const Eigen::ArrayXd& n, const Eigen::ArrayXd& weights) const;
  KineticState advance(const KineticState& state, const Eigen::ArrayXd& weights, double dt) const;
  Eigen::ArrayXd clamped(const Eigen::ArrayXd& excess) const { return excess.max(0.0); }

  KineticConfig cfg_;
  Eigen::ArrayXd thermal_;
  Eigen::ArrayXd linewidth_;  ///< 2 kappa_ex + kappa_i
  Eigen::ArrayXd damping_;    ///< kappa + extra internal loss
  Eigen::ArrayXd drive_;      ///< alpha kappa_ex n_flux
  double kappa0_ = 0.0;
  std::vector<Channel> channels_;
  std::vector<std::size_t> offsets_;  ///< channels of mode k live in [offsets_[k-1], offsets_[k])
};

// Convenience wrappers that build a KineticModel for a single evaluation.
double collision_integral(int k, const KineticState& state, const KineticConfig& cfg);
double excess_linewidth(int k, const KineticState& state, const KineticConfig& cfg);
KineticState step(const KineticState& state, const KineticConfig& cfg, double dt);
KineticState solve_ness(const KineticConfig& cfg, const std::optional<KineticState>& initial = std::nullopt);
DecayAnalysis decay_channels(int k, const KineticState& state, const KineticConfig& cfg);

}  // namespace jjchain
