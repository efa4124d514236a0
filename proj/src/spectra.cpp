#include "jjchain/spectra.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <string>

#include "jjchain/errors.hpp"
#include "jjchain/parallel.hpp"
#include "jjchain/wave_mixing.hpp"

namespace jjchain {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

TransmissionTrace make_trace(const Eigen::ArrayXd& omega_grid, std::string model) {
  TransmissionTrace t;
  t.freq_hz = omega_grid / kTwoPi;
  t.s21.resize(omega_grid.size());
  t.meta.model = std::move(model);
  t.meta.timestamp = utc_timestamp();
  return t;
}

void check_linewidths(double kappa, double kappa_ex) {
  if (!(kappa > 0.0)) throw ValidationError("kappa must be positive");
  if (!(kappa_ex > 0.0) || 2.0 * kappa_ex > kappa * (1.0 + 1e-12))
    throw ValidationError("kappa_ex must be positive with 2 kappa_ex <= kappa");
}

cd lorentz_denominator(double kappa, double detuning) { return cd{kappa / 2.0, -detuning}; }

}  // namespace

void DriveSpec::validate() const {
  if (p < 1 || q <= p) throw ValidationError("drive requires 1 <= p < q");
  if (n_p < 0.0 || n_q < 0.0) throw ValidationError("pump occupations must be non-negative");
}

void CascadeSystem::validate() const {
  if (k < 1 || i_max < 1) throw ValidationError("cascade requires k >= 1 and i_max >= 1");
  const Eigen::Index n = dimension();
  if (freqs_prime.size() != n || kappas.size() != n || couplings.size() != n - 1)
    throw ValidationError("cascade arrays must have lengths 2 i_max + 1, 2 i_max + 1 and 2 i_max");
  if ((kappas <= 0.0).any()) throw ValidationError("cascade linewidths must be positive");
}

TransmissionTrace s21_pairwise(const Eigen::ArrayXd& omega_grid, double omega_i, double omega_j, double delta,
                               double g, double kappa, double kappa_ex) {
  check_linewidths(kappa, kappa_ex);
  auto t = make_trace(omega_grid, "pairwise");
  for (Eigen::Index n = 0; n < omega_grid.size(); ++n) {
    const double w = omega_grid(n);
    t.s21(n) = kappa_ex / (lorentz_denominator(kappa, w - omega_i) + g * g / lorentz_denominator(kappa, w - omega_j - delta));
  }
  return t;
}

TransmissionTrace s21_two_neighbors(const Eigen::ArrayXd& omega_grid, double omega_k, double omega_km,
                                    double omega_kp, double delta, double g, double kappa, double kappa_ex) {
  check_linewidths(kappa, kappa_ex);
  auto t = make_trace(omega_grid, "neighbors");
  const double g2 = g * g;
  for (Eigen::Index n = 0; n < omega_grid.size(); ++n) {
    const double w = omega_grid(n);
    const cd denom = lorentz_denominator(kappa, w - omega_k) + g2 / lorentz_denominator(kappa, w - omega_km - delta) +
                     g2 / lorentz_denominator(kappa, w - omega_kp + delta);
    t.s21(n) = kappa_ex / denom;
  }
  return t;
}

Tridiagonal<cd> build_cascade_matrix(const CascadeSystem& sys, const DriveSpec& drive) {
  sys.validate();
  const Eigen::Index n = sys.dimension();
  Tridiagonal<cd> a;
  a.diag.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double j = static_cast<double>(r - sys.i_max);
    a.diag(r) = cd{sys.freqs_prime(r) - j * drive.delta, -sys.kappas(r) / 2.0};
  }
  a.lower = sys.couplings.cast<cd>().matrix();
  a.upper = a.lower;
  return a;
}

namespace {

cd readout_resolvent(const Tridiagonal<cd>& a, double w, Eigen::Index centre) {
  const auto m = a.shifted_negation(cd{w, 0.0});
  Tridiagonal<cd>::Vector rhs = Tridiagonal<cd>::Vector::Zero(a.size());
  rhs(centre) = 1.0;
  return solve_tridiagonal(m, rhs)(centre);
}

}  // namespace

TransmissionTrace s21_cascade(const Eigen::ArrayXd& omega_grid, const CascadeSystem& sys, const DriveSpec& drive,
                              double kappa_ex_k, int threads) {
  if (!(kappa_ex_k > 0.0)) throw ValidationError("kappa_ex_k must be positive");
  const auto a = build_cascade_matrix(sys, drive);
  auto t = make_trace(omega_grid, "cascade");
  t.meta.drive = drive;
  parallel_for(static_cast<std::size_t>(omega_grid.size()), threads, [&](std::size_t n) {
    const auto idx = static_cast<Eigen::Index>(n);
    t.s21(idx) = kI * kappa_ex_k * readout_resolvent(a, omega_grid(idx), sys.i_max);
  });
  return t;
}

Eigen::ArrayXd cascade_bond_elements(int k, int i_max, const DriveSpec& drive, const ChainParams& chain) {
  drive.validate();
  const int d = drive.spacing();
  if (k - i_max * d < 1) throw ValidationError("cascade ladder reaches mode index below 1");
  Eigen::ArrayXd elements(2 * i_max);
  for (int r = 1; r <= 2 * i_max; ++r) {
    const int j = r - i_max;
    elements(r - 1) = std::abs(matrix_element(drive.p, drive.q, k + j * d, k + (j - 1) * d, chain));
  }
  return elements;
}

CascadeSystem cascade_system_from_chain(int k, int i_max, const DriveSpec& drive, const ModeTable& modes,
                                        const ChainParams& chain) {
  const int d = drive.spacing();
  if (k + i_max * d > modes.k_max()) throw ValidationError("cascade ladder exceeds the mode table");
  CascadeSystem sys;
  sys.k = k;
  sys.i_max = i_max;
  sys.couplings = cascade_bond_elements(k, i_max, drive, chain) * std::sqrt(drive.n_p * drive.n_q);
  sys.freqs_prime.resize(2 * i_max + 1);
  sys.kappas.resize(2 * i_max + 1);
  for (int r = 0; r <= 2 * i_max; ++r) {
    const int mode = k + (r - i_max) * d;
    sys.freqs_prime(r) = modes.omega_of(mode);
    sys.kappas(r) = modes.kappa_of(mode);
  }
  return sys;
}

TransmissionMap s21_cascade_map(const Eigen::ArrayXd& omega_grid, const Eigen::ArrayXd& delta_grid,
                                const CascadeSystem& sys, const DriveSpec& drive, double kappa_ex_k, int threads) {
  if (!(kappa_ex_k > 0.0)) throw ValidationError("kappa_ex_k must be positive");
  sys.validate();
  TransmissionMap map;
  map.freq_hz = omega_grid / kTwoPi;
  map.delta_hz = delta_grid / kTwoPi;
  map.s21.resize(delta_grid.size(), omega_grid.size());
  parallel_for(static_cast<std::size_t>(delta_grid.size()), threads, [&](std::size_t row) {
    DriveSpec d = drive;
    d.delta = delta_grid(static_cast<Eigen::Index>(row));
    const auto a = build_cascade_matrix(sys, d);
    for (Eigen::Index n = 0; n < omega_grid.size(); ++n)
      map.s21(static_cast<Eigen::Index>(row), n) = kI * kappa_ex_k * readout_resolvent(a, omega_grid(n), sys.i_max);
  });
  return map;
}

TransmissionTrace s21_cascade_fit_model(const Eigen::ArrayXd& omega_grid, const CascadeSystem& sys,
                                        const DriveSpec& drive, const Eigen::ArrayXd& bond_elements,
                                        const CascadeFit& fit, double kappa_ex_k) {
  if (!(fit.kappa_fit > 0.0)) throw ValidationError("kappa_fit must be positive");
  if (bond_elements.size() != sys.dimension() - 1) throw ValidationError("bond element count must be 2 i_max");
  CascadeSystem fitted = sys;
  fitted.freqs_prime = sys.freqs_prime * (1.0 + fit.alpha_fit);
  fitted.kappas = Eigen::ArrayXd::Constant(sys.dimension(), fit.kappa_fit);
  fitted.couplings = bond_elements * fit.n_pump_fit;
  auto t = s21_cascade(omega_grid, fitted, drive, kappa_ex_k);
  t.s21 *= fit.s_fit * std::exp(kI * fit.phi_fit);
  t.meta.model = "cascade_fit";
  return t;
}

GuideLine resonance_guide(int i, const Eigen::ArrayXd& freqs_prime, PumpingSide side) {
  if (i == 0) throw DomainError("guide order must be nonzero");
  if (freqs_prime.size() % 2 != 1) throw ValidationError("freqs_prime must have odd length");
  const int i_max = static_cast<int>(freqs_prime.size() / 2);
  if (std::abs(i) > i_max) throw DomainError("guide order exceeds the available ladder");
  const double offset_hz = (freqs_prime(i_max + i) - freqs_prime(i_max)) / kTwoPi;
  const double sign = side == PumpingSide::above ? 1.0 : -1.0;
  return {i, -sign / i, sign * offset_hz / i};
}

std::vector<GuideLine> resonance_guides(const Eigen::ArrayXd& freqs_prime, PumpingSide side) {
  const int i_max = static_cast<int>(freqs_prime.size() / 2);
  std::vector<GuideLine> out;
  for (int i = -i_max; i <= i_max; ++i)
    if (i != 0) out.push_back(resonance_guide(i, freqs_prime, side));
  return out;
}

}  // namespace jjchain
