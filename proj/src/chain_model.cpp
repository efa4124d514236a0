#include "jjchain/chain_model.hpp"

#include <string>

#include "jjchain/errors.hpp"

namespace jjchain {

void ChainParams::validate() const {
  if (!(e_j_hz > 0.0) || !(e_c_hz > 0.0) || !(e_g_hz > 0.0))
    throw ValidationError("chain energies e_j, e_c, e_g must be strictly positive");
  if (n_junctions <= 0) throw ValidationError("n_junctions must be positive");
  const double v_s = std::sqrt(2.0 * e_j_hz * e_g_hz);
  if (!std::isfinite(v_s) || v_s <= 0.0) throw ValidationError("sound velocity sqrt(2 e_j e_g) is not finite");
}

void DispersionParams::validate() const {
  if (!(v > 0.0) || !(omega_p > 0.0) || !(length_m > 0.0))
    throw ValidationError("dispersion parameters v, omega_p and length must be positive");
}

void ModeTable::validate() const {
  const auto n = omega.size();
  if (n == 0) throw ValidationError("mode table is empty");
  if (kappa_ex.size() != n || kappa_i.size() != n)
    throw ValidationError("mode table columns have different lengths");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(omega(i) > 0.0) || !(kappa_ex(i) > 0.0) || !(kappa_i(i) > 0.0))
      throw ValidationError("mode table entry for k=" + std::to_string(i + 1) + " is not positive");
    if (i > 0 && !(omega(i) > omega(i - 1)))
      throw ValidationError("mode frequencies are not strictly increasing at k=" + std::to_string(i + 1));
  }
}

double linear_mode_frequency(int k, const ChainParams& params) {
  if (k < 1 || k > params.n_junctions)
    throw DomainError("mode index " + std::to_string(k) + " outside 1.." + std::to_string(params.n_junctions));
  return kTwoPi * std::sqrt(2.0 * params.e_g_hz * params.e_j_hz) * std::numbers::pi * k / params.n_junctions;
}

double sqrt_mode_frequency(int k, const DispersionParams& disp) {
  if (k < 1) throw DomainError("mode index must be >= 1");
  return saturating_dispersion(disp.v, disp.omega_p, disp.quasimomentum(k));
}

LuttingerParams luttinger_params(const ChainParams& params) {
  return {std::sqrt(params.e_j_hz / (2.0 * params.e_g_hz)), std::sqrt(2.0 * params.e_j_hz * params.e_g_hz)};
}

std::pair<double, double> energies_from_luttinger(const LuttingerParams& lp) {
  // K v = e_j and v / K = 2 e_g.
  return {lp.k_g * lp.v_s_hz, lp.v_s_hz / (2.0 * lp.k_g)};
}

namespace {

template <typename FreqFn>
ModeTable assemble(int k_max, double kappa_ex_default, double kappa_i_default,
                   std::span<const ModeOverride> overrides, FreqFn&& freq) {
  if (k_max < 1) throw ValidationError("k_max must be >= 1");
  if (!(kappa_ex_default > 0.0) || !(kappa_i_default > 0.0))
    throw ValidationError("default linewidths must be positive");
  ModeTable table;
  table.omega.resize(k_max);
  for (int k = 1; k <= k_max; ++k) table.omega(k - 1) = freq(k);
  table.kappa_ex = Eigen::ArrayXd::Constant(k_max, kappa_ex_default);
  table.kappa_i = Eigen::ArrayXd::Constant(k_max, kappa_i_default);
  for (const auto& o : overrides) {
    if (o.k < 1 || o.k > k_max)
      throw ValidationError("mode override k=" + std::to_string(o.k) + " outside 1.." + std::to_string(k_max));
    if (o.omega) table.omega(o.k - 1) = *o.omega;
    if (o.kappa_ex) table.kappa_ex(o.k - 1) = *o.kappa_ex;
    if (o.kappa_i) table.kappa_i(o.k - 1) = *o.kappa_i;
  }
  table.validate();
  return table;
}

}  // namespace

ModeTable build_mode_table(const ChainParams& params, int k_max, double kappa_ex_default,
                           double kappa_i_default, std::span<const ModeOverride> overrides) {
  params.validate();
  if (k_max > params.n_junctions) throw ValidationError("k_max exceeds the number of junctions");
  return assemble(k_max, kappa_ex_default, kappa_i_default, overrides,
                  [&](int k) { return linear_mode_frequency(k, params); });
}

ModeTable build_mode_table(const DispersionParams& disp, int k_max, double kappa_ex_default,
                           double kappa_i_default, std::span<const ModeOverride> overrides) {
  disp.validate();
  return assemble(k_max, kappa_ex_default, kappa_i_default, overrides,
                  [&](int k) { return sqrt_mode_frequency(k, disp); });
}

}  // namespace jjchain
