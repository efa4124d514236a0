#include "jjchain/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jjchain/errors.hpp"
#include "jjchain/parallel.hpp"
#include "jjchain/units.hpp"
#include "jjchain/wave_mixing.hpp"

namespace jjchain {

namespace {

// Neumaier compensated sum; accumulation order is always ascending channel index.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

struct Occupations {
  double k, p, q1, q2;
};

ChannelTerms terms(double weight, const Occupations& o) {
  return {weight * (1.0 + o.p) * (1.0 + o.k) * o.q1 * o.q2, -weight * o.p * o.k * (1.0 + o.q1) * (1.0 + o.q2)};
}

double stimulated_decay(double weight, const Occupations& o) {
  return weight * (o.p * (1.0 + o.q1 + o.q2) - o.q1 * o.q2);
}

// In minus out for one channel. The two terms nearly cancel close to balance, so the difference is
// formed in extended precision before scaling by the weight.
// Largest relative change between two linewidth vectors; exact zeros on both sides count as unchanged.
double relative_change(const Eigen::ArrayXd& before, const Eigen::ArrayXd& after) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < after.size(); ++i) {
    const double scale = std::max(std::abs(before(i)), std::abs(after(i)));
    if (scale > 0.0) worst = std::max(worst, std::abs(after(i) - before(i)) / scale);
  }
  return worst;
}

constexpr double kExcessConsistency = 1e-10;

double net_collision(double weight, const Occupations& o) {
  const long double k = o.k, p = o.p, q1 = o.q1, q2 = o.q2;
  const long double d = q1 * q2 * (1.0L + p + k) - p * k * (1.0L + q1 + q2);
  return weight * static_cast<double>(d);
}

}  // namespace

double thermal_occupation(double omega, double temperature) {
  if (!(omega > 0.0) || !(temperature > 0.0)) throw DomainError("thermal occupation needs omega > 0 and T > 0");
  return 1.0 / std::expm1(kHbar * omega / (kBoltzmann * temperature));
}

double broadened_delta(double omega, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("broadening gamma must be positive");
  return gamma / (std::numbers::pi * (gamma * gamma + omega * omega));
}

double channel_gamma(int q1, int q2, int p, int k, const ModeTable& modes, const Eigen::ArrayXd& excess) {
  double gamma = 0.0;
  for (int j : {q1, q2, p, k}) gamma += modes.kappa_of(j) + excess(j - 1);
  return gamma;
}

double flux_from_psd(double psd_w_per_hz, double omega) { return psd_w_per_hz / (kPlanck * omega / kTwoPi); }

void KineticConfig::validate() const {
  modes.validate();
  chain.validate();
  const auto n = modes.omega.size();
  if (!(temperature > 0.0)) throw ValidationError("temperature must be positive");
  if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
  if (!(dt_factor > 0.0) || dt_factor > 1.0) throw ValidationError("dt_factor must lie in (0, 1]");
  if (linewidth_update_stride < 1) throw ValidationError("linewidth_update_stride must be >= 1");
  if (max_steps < 1) throw ValidationError("max_steps must be >= 1");
  if (flux.size() != n || extra_internal_loss.size() != n)
    throw ValidationError("flux and extra_internal_loss need one entry per mode");
  if ((flux < 0.0).any() || (extra_internal_loss < 0.0).any())
    throw ValidationError("flux and extra_internal_loss must be non-negative");
  if (modes.k_max() > chain.n_junctions) throw ValidationError("k_max exceeds the number of junctions");
}

KineticModel::KineticModel(KineticConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const int kmax = cfg_.modes.k_max();
  const auto& modes = cfg_.modes;
  thermal_.resize(kmax);
  for (int k = 1; k <= kmax; ++k) thermal_(k - 1) = thermal_occupation(modes.omega_of(k), cfg_.temperature);
  linewidth_ = modes.kappa_total();
  damping_ = linewidth_ + cfg_.extra_internal_loss;
  drive_ = cfg_.alpha * modes.kappa_ex * cfg_.flux;
  kappa0_ = linewidth_.mean();

  offsets_.assign(1, 0);
  for (int k = 1; k <= kmax; ++k) {
    for (int p = 1; p <= kmax; ++p) {
      const int total = k + p;
      for (int q2 = std::max(1, total - kmax); 2 * q2 < total; ++q2) {
        const int q1 = total - q2;
        if (q1 == k || q2 == k) continue;  // self-decay
        const double element = matrix_element(q1, q2, p, k, cfg_.chain);
        if (element == 0.0) continue;
        const double detuning = modes.omega_of(q1) + modes.omega_of(q2) - modes.omega_of(p) - modes.omega_of(k);
        channels_.push_back({p, q1, q2, kTwoPi * element * element, detuning});
      }
    }
    offsets_.push_back(channels_.size());
  }
}

std::span<const Channel> KineticModel::channels(int k) const {
  if (k < 1 || k > k_max()) throw DomainError("mode index outside the kinetic table");
  return {channels_.data() + offsets_[k - 1], offsets_[k] - offsets_[k - 1]};
}

KineticState KineticModel::thermal_state() const {
  KineticState s;
  s.n = thermal_;
  s.excess = Eigen::ArrayXd::Zero(k_max());
  s.dt = default_dt();
  return s;
}

Eigen::ArrayXd KineticModel::channel_weights(const Eigen::ArrayXd& excess) const {
  const Eigen::ArrayXd width = linewidth_ + excess;
  Eigen::ArrayXd w(static_cast<Eigen::Index>(channels_.size()));
  for (int k = 1; k <= k_max(); ++k) {
    for (std::size_t c = offsets_[k - 1]; c < offsets_[k]; ++c) {
      const Channel& ch = channels_[c];
      const double gamma = width(ch.q1 - 1) + width(ch.q2 - 1) + width(ch.p - 1) + width(k - 1);
      w(static_cast<Eigen::Index>(c)) = ch.base * broadened_delta(ch.detuning, gamma);
    }
  }
  return w;
}

void KineticModel::sweep(const Eigen::ArrayXd& n, const Eigen::ArrayXd& weights, Eigen::ArrayXd* collision,
                         Eigen::ArrayXd* excess) const {
  const int kmax = k_max();
  if (collision) collision->resize(kmax);
  if (excess) excess->resize(kmax);
  parallel_for(static_cast<std::size_t>(kmax), cfg_.threads, [&](std::size_t idx) {
    const int k = static_cast<int>(idx) + 1;
    CompensatedSum coll, decay;
    for (std::size_t c = offsets_[k - 1]; c < offsets_[k]; ++c) {
      const Channel& ch = channels_[c];
      const Occupations o{n(k - 1), n(ch.p - 1), n(ch.q1 - 1), n(ch.q2 - 1)};
      const double w = weights(static_cast<Eigen::Index>(c));
      if (collision) coll.add(net_collision(w, o));
      if (excess) decay.add(stimulated_decay(w, o));
    }
    if (collision) (*collision)(k - 1) = coll.value();
    if (excess) (*excess)(k - 1) = decay.value();
  });
}

std::vector<ChannelTerms> KineticModel::channel_terms(int k, const KineticState& state) const {
  const Eigen::ArrayXd width = linewidth_ + state.excess;
  std::vector<ChannelTerms> out;
  for (const Channel& ch : channels(k)) {
    const double gamma = width(ch.q1 - 1) + width(ch.q2 - 1) + width(ch.p - 1) + width(k - 1);
    const double w = ch.base * broadened_delta(ch.detuning, gamma);
    out.push_back(terms(w, {state.n(k - 1), state.n(ch.p - 1), state.n(ch.q1 - 1), state.n(ch.q2 - 1)}));
  }
  return out;
}

double KineticModel::collision_integral(int k, const KineticState& state) const {
  const Eigen::ArrayXd width = linewidth_ + state.excess;
  CompensatedSum sum;
  for (const Channel& ch : channels(k)) {
    const double gamma = width(ch.q1 - 1) + width(ch.q2 - 1) + width(ch.p - 1) + width(k - 1);
    const double w = ch.base * broadened_delta(ch.detuning, gamma);
    sum.add(net_collision(w, {state.n(k - 1), state.n(ch.p - 1), state.n(ch.q1 - 1), state.n(ch.q2 - 1)}));
  }
  return sum.value();
}

double KineticModel::excess_linewidth(int k, const KineticState& state) const {
  const Eigen::ArrayXd width = linewidth_ + state.excess;
  CompensatedSum sum;
  for (const Channel& ch : channels(k)) {
    const double gamma = width(ch.q1 - 1) + width(ch.q2 - 1) + width(ch.p - 1) + width(k - 1);
    const double w = ch.base * broadened_delta(ch.detuning, gamma);
    sum.add(stimulated_decay(w, {state.n(k - 1), state.n(ch.p - 1), state.n(ch.q1 - 1), state.n(ch.q2 - 1)}));
  }
  return sum.value();
}

Eigen::ArrayXd KineticModel::collision_integrals(const KineticState& state) const {
  Eigen::ArrayXd out;
  sweep(state.n, channel_weights(state.excess), &out, nullptr);
  return out;
}

Eigen::ArrayXd KineticModel::excess_linewidths(const KineticState& state) const {
  Eigen::ArrayXd out;
  sweep(state.n, channel_weights(state.excess), nullptr, &out);
  return out;
}

Eigen::ArrayXd KineticModel::rates_with(const Eigen::ArrayXd& n, const Eigen::ArrayXd& weights) const {
  Eigen::ArrayXd coll;
  sweep(n, weights, &coll, nullptr);
  return -damping_ * (n - thermal_) + drive_ + coll;
}

Eigen::ArrayXd KineticModel::rates(const KineticState& state) const {
  return rates_with(state.n, channel_weights(state.excess));
}

KineticState KineticModel::advance(const KineticState& state, const Eigen::ArrayXd& weights, double dt) const {
  const Eigen::ArrayXd r = rates_with(state.n, weights);
  KineticState next = state;
  next.n = (state.n + dt * r).max(0.0);
  for (Eigen::Index i = 0; i < next.n.size(); ++i)
    if (!std::isfinite(next.n(i)))
      throw NumericError("non-finite occupation update for mode k=" + std::to_string(i + 1));
  next.steps = state.steps + 1;
  next.residual = (next.n - state.n).square().sum();
  next.dt = dt;
  return next;
}

KineticState KineticModel::step(const KineticState& state, double dt) const {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (state.n.size() != k_max() || state.excess.size() != k_max())
    throw ValidationError("state size does not match the mode table");
  return advance(state, channel_weights(state.excess), dt);
}

KineticState KineticModel::solve_ness(const std::optional<KineticState>& initial) const {
  KineticState state = initial ? *initial : thermal_state();
  if (state.n.size() != k_max()) throw ValidationError("initial state size does not match the mode table");
  if (state.excess.size() != k_max()) state.excess = Eigen::ArrayXd::Zero(k_max());
  double dt = default_dt();
  if (initial && initial->dt > 0.0) dt = std::min(dt, initial->dt);
  state.residual_history.clear();

  state.excess = clamped(excess_linewidths(state));
  Eigen::ArrayXd weights = channel_weights(state.excess);
  for (long i = 1;; ++i) {
    if (i > cfg_.max_steps)
      throw ConvergenceError("NESS did not converge within " + std::to_string(cfg_.max_steps) + " steps",
                             state.residual, state.steps);
    KineticState next = advance(state, weights, dt);
    if (cfg_.stability_guard) {
      // Retry with a halved step while any occupation jumps by more than half its value plus one.
      while (((next.n - state.n).abs() > 0.5 * state.n + 1.0).any()) {
        dt *= 0.5;
        if (dt < default_dt() * 1e-12) throw NumericError("time step underflow in stability guard");
        next = advance(state, weights, dt);
      }
    }
    state = std::move(next);
    const bool settled = state.residual <= cfg_.tolerance;
    double excess_change = 0.0;
    if (i % cfg_.linewidth_update_stride == 0 || settled) {
      state.residual_history.push_back(state.residual);
      const Eigen::ArrayXd refreshed = clamped(excess_linewidths(state));
      excess_change = relative_change(state.excess, refreshed);
      state.excess = refreshed;
      weights = channel_weights(state.excess);
    }
    // The occupations may settle before the linewidths are self-consistent; keep refreshing until both are.
    if (settled && excess_change <= kExcessConsistency) break;
  }
  return state;
}

DecayAnalysis KineticModel::decay_channels(int k, const KineticState& state) const {
  const Eigen::ArrayXd width = linewidth_ + state.excess;
  DecayAnalysis out;
  for (const Channel& ch : channels(k)) {
    const double gamma = width(ch.q1 - 1) + width(ch.q2 - 1) + width(ch.p - 1) + width(k - 1);
    const double w = ch.base * broadened_delta(ch.detuning, gamma);
    const double rate = stimulated_decay(w, {state.n(k - 1), state.n(ch.p - 1), state.n(ch.q1 - 1), state.n(ch.q2 - 1)});
    int s2 = 0, s3 = 0;
    for (int a : {1, -1})
      for (int b : {1, -1})
        if (k + ch.p + a * ch.q1 + b * ch.q2 == 0) s2 = a, s3 = b;
    out.channels.push_back({ch.q1, ch.q2, s2, s3, ch.p, 0.5 * rate});
    out.channels.push_back({ch.q2, ch.q1, s3, s2, ch.p, 0.5 * rate});
  }
  std::stable_sort(out.channels.begin(), out.channels.end(), [](const DecayChannel& a, const DecayChannel& b) {
    if (a.rate != b.rate) return a.rate > b.rate;
    if (a.s2 * a.q1 != b.s2 * b.q1) return a.s2 * a.q1 < b.s2 * b.q1;
    return a.s3 * a.q2 < b.s3 * b.q2;
  });
  CompensatedSum total;
  for (const auto& c : out.channels) total.add(c.rate);
  out.total = total.value();
  CompensatedSum running;
  out.count_95 = 0;
  for (const auto& c : out.channels) {
    running.add(c.rate);
    const double frac = out.total != 0.0 ? running.value() / out.total : 0.0;
    out.cumulative.push_back(frac);
    if (out.count_95 == 0 && frac >= 0.95) out.count_95 = static_cast<int>(out.cumulative.size());
  }
  out.distinct_count_95 = out.count_95 / 2.0;
  return out;
}

double collision_integral(int k, const KineticState& state, const KineticConfig& cfg) {
  return KineticModel(cfg).collision_integral(k, state);
}

double excess_linewidth(int k, const KineticState& state, const KineticConfig& cfg) {
  return KineticModel(cfg).excess_linewidth(k, state);
}

KineticState step(const KineticState& state, const KineticConfig& cfg, double dt) {
  return KineticModel(cfg).step(state, dt);
}

KineticState solve_ness(const KineticConfig& cfg, const std::optional<KineticState>& initial) {
  return KineticModel(cfg).solve_ness(initial);
}

DecayAnalysis decay_channels(int k, const KineticState& state, const KineticConfig& cfg) {
  return KineticModel(cfg).decay_channels(k, state);
}

}  // namespace jjchain
