#pragma once

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "jjchain/chain_model.hpp"
#include "jjchain/fitting.hpp"
#include "jjchain/kinetics.hpp"
#include "jjchain/spectra.hpp"

namespace jjchain {

/// Inclusive block of mode indices.
struct ModeRange {
  int lo = 1;
  int hi = 1;
  bool contains(int k) const { return k >= lo && k <= hi; }
};

struct FluxProfile {
  ModeRange band{1, 13};
  std::optional<double> psd_dbm_per_hz;        ///< converted with n_flux = P / (h f_k)
  std::optional<double> photons_per_s_per_hz;  ///< used as given
};

struct LossBlock {
  ModeRange modes;
  double value_hz = 0.0;
};

struct KineticsSettings {
  double temperature_k = 0.01;
  std::optional<FluxProfile> flux;
  double alpha = 1.0;
  std::vector<LossBlock> extra_internal_loss;
  double dt_factor = 0.01;
  double tolerance = 1e-14;
  long max_steps = 2'000'000;
  int linewidth_update_stride = 10;
  bool stability_guard = true;
};

struct SweepGrid {
  double start_hz = 0.0;
  double stop_hz = 0.0;
  int points = 0;

  Eigen::ArrayXd values() const { return Eigen::ArrayXd::LinSpaced(points, start_hz, stop_hz); }
};

struct SpectrumSettings {
  DriveSpec drive;          ///< delta in rad/s after loading
  int readout_k = 1;
  int i_max = 1;
  std::optional<std::vector<double>> freqs_prime_hz;
  std::optional<double> coupling_hz;  ///< overrides |K| sqrt(n_p n_q)
  std::optional<SweepGrid> grid;      ///< read-out frequencies; defaults to +-20 MHz around mode k
  std::optional<SweepGrid> delta_sweep;
  PumpingSide side = PumpingSide::above;
};

/// Fully defaulted run configuration.
struct Config {
  ChainParams chain;
  std::optional<DispersionParams> dispersion;
  int k_max = kDefaultKMax;
  double kappa_ex_hz = kDefaultKappaExHz;
  double kappa_i_hz = kDefaultKappaIHz;
  std::vector<ModeOverride> overrides;  ///< rad/s
  KineticsSettings kinetics;
  std::optional<SpectrumSettings> spectrum;
  KappaConvention kappa_convention = KappaConvention::angular;
  bool synthetic = false;
  std::string note;

  nlohmann::json resolved;  ///< canonical JSON of every field after defaulting
  std::string digest;       ///< SHA-256 hex of resolved.dump()

  ModeTable mode_table() const;
  KineticConfig kinetic_config(int threads = 1) const;
};

Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);

/// SHA-256 hex digest of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace jjchain
