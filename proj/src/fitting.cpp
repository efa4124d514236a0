#include "jjchain/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "jjchain/errors.hpp"
#include "jjchain/units.hpp"

namespace jjchain {

using cd = std::complex<double>;

double FitResult::value(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return params(static_cast<Eigen::Index>(i));
  throw ValidationError("fit has no parameter named " + name);
}

double FitResult::std_error(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) {
      const auto j = static_cast<Eigen::Index>(i);
      return std::sqrt(std::max(covariance(j, j), 0.0));
    }
  throw ValidationError("fit has no parameter named " + name);
}

// ---------------------------------------------------------------------------
// Dispersion

FitResult fit_dispersion(std::span<const DispersionPoint> points, double length_m, const LmOptions& opt) {
  if (points.size() < 3) throw FitError("dispersion fit needs at least 3 points");
  if (!(length_m > 0.0)) throw ValidationError("chain length must be positive");
  std::set<int> distinct;
  for (const auto& pt : points) {
    if (pt.k < 1 || !(pt.f_hz > 0.0)) throw ValidationError("dispersion points need k >= 1 and f > 0");
    distinct.insert(pt.k);
  }
  if (distinct.size() != points.size()) throw FitError("dispersion fit needs distinct mode numbers");

  std::vector<DispersionPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.k < b.k; });
  const Eigen::Index m = static_cast<Eigen::Index>(sorted.size());
  Eigen::ArrayXd q(m), omega(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    q(i) = sorted[static_cast<std::size_t>(i)].k * std::numbers::pi / length_m;
    omega(i) = kTwoPi * sorted[static_cast<std::size_t>(i)].f_hz;
  }

  const double v0 = (omega(1) - omega(0)) / (q(1) - q(0));
  const double top = v0 * q(m - 1);
  const double wp0 = top > omega(m - 1) * 1.0001 ? v0 * q(m - 1) * omega(m - 1) / std::sqrt(top * top - omega(m - 1) * omega(m - 1))
                                                 : 10.0 * omega(m - 1);
  if (!(v0 > 0.0)) throw FitError("dispersion points are not increasing at the lowest modes");

  // Relative residuals in log-parameters keep both scales positive and comparably weighted.
  auto residual = [&](const Eigen::VectorXd& x) {
    const double v = std::exp(x(0)), wp = std::exp(x(1));
    Eigen::VectorXd r(m);
    for (Eigen::Index i = 0; i < m; ++i) r(i) = saturating_dispersion(v, wp, q(i)) / omega(i) - 1.0;
    return r;
  };
  Eigen::VectorXd x0(2);
  x0 << std::log(v0), std::log(wp0);
  const auto lm = levenberg_marquardt(residual, x0, opt);
  if (!lm.converged) throw FitError("dispersion fit did not converge", lm.residual_norm);

  FitResult out;
  out.names = {"v", "omega_p"};
  out.params = lm.params.array().exp().matrix();
  const Eigen::Matrix2d jac = out.params.asDiagonal();
  out.covariance = jac * lm.covariance * jac;
  out.residual_norm = lm.residual_norm;
  out.iterations = lm.iterations;
  return out;
}

// ---------------------------------------------------------------------------
// Avoided crossing

namespace {

struct PeakGuess {
  Eigen::Index index;
  double height;
};

std::vector<PeakGuess> local_maxima(const Eigen::ArrayXd& mag) {
  std::vector<PeakGuess> peaks;
  for (Eigen::Index i = 1; i + 1 < mag.size(); ++i)
    if (mag(i) > mag(i - 1) && mag(i) >= mag(i + 1)) peaks.push_back({i, mag(i)});
  std::sort(peaks.begin(), peaks.end(), [](auto& a, auto& b) { return a.height > b.height; });
  return peaks;
}

double full_width_half_max(const Eigen::ArrayXd& mag, const Eigen::ArrayXd& w, Eigen::Index peak) {
  const double half = mag(peak) / 2.0;
  Eigen::Index lo = peak, hi = peak;
  while (lo > 0 && mag(lo) > half) --lo;
  while (hi + 1 < mag.size() && mag(hi) > half) ++hi;
  return std::max(w(hi) - w(lo), w(1) - w(0));
}

// Boxcar average used only for the starting guesses, so noise does not produce spurious peaks.
Eigen::ArrayXd smoothed(const Eigen::ArrayXd& v, Eigen::Index half) {
  Eigen::ArrayXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - half), hi = std::min<Eigen::Index>(v.size() - 1, i + half);
    out(i) = v.segment(lo, hi - lo + 1).mean();
  }
  return out;
}

}  // namespace

FitResult fit_avoided_crossing(const TransmissionTrace& trace, double delta, const CrossingFitOptions& opt) {
  const Eigen::Index m = trace.freq_hz.size();
  if (m < 8 || trace.s21.size() != m) throw FitError("crossing fit needs at least 8 complex samples");
  const Eigen::ArrayXd w = trace.freq_hz * kTwoPi;
  const Eigen::ArrayXd mag = trace.s21.abs();

  // Work in units of the grid span around its centre to keep the normal equations well scaled.
  const double centre = 0.5 * (w(0) + w(m - 1));
  const double scale = std::max(std::abs(w(m - 1) - w(0)), 1.0);
  const Eigen::ArrayXd x = (w - centre) / scale;

  const Eigen::ArrayXd smooth = smoothed(mag, std::max<Eigen::Index>(1, m / 300));
  auto peaks = local_maxima(smooth);
  if (peaks.empty()) throw FitError("no resonance found in the trace");
  const double kappa0 = full_width_half_max(smooth, x, peaks[0].index);
  // Keep the strongest peak plus the strongest one clear of its linewidth.
  const auto second = std::find_if(peaks.begin() + 1, peaks.end(),
                                   [&](const PeakGuess& p) { return std::abs(x(p.index) - x(peaks[0].index)) > kappa0; });
  if (second != peaks.end()) peaks = {peaks[0], *second};
  else peaks.resize(1);

  struct Start {
    double g, wi, wj, kappa, kex;
  };
  std::vector<Start> starts;
  if (peaks.size() >= 2 && peaks[1].height > 0.1 * peaks[0].height) {
    const double a = x(peaks[0].index), b = x(peaks[1].index);
    const double mid = 0.5 * (a + b), half = 0.5 * std::abs(a - b);
    starts.push_back({half, mid, mid, kappa0, peaks[0].height * kappa0});
    starts.push_back({0.8 * half, a, mid, kappa0, peaks[0].height * kappa0});
    starts.push_back({0.8 * half, b, mid, kappa0, peaks[0].height * kappa0});
  }
  const double xp = x(peaks[0].index);
  starts.push_back({0.1 * kappa0, xp, xp, kappa0, 0.5 * peaks[0].height * kappa0});

  const Eigen::Index nparams = opt.complex_fit ? 6 : 5;
  auto model = [&](const Eigen::VectorXd& p, Eigen::Index i) {
    const double g = p(0), wi = p(1), wj = p(2), kappa = p(3), kex = p(4);
    const cd d1{kappa / 2.0, -(x(i) - wi)};
    const cd d2{kappa / 2.0, -(x(i) - wj)};
    cd s = kex / (d1 + g * g / d2);
    if (opt.complex_fit) s *= std::exp(cd{0.0, p(5)});
    return s;
  };
  auto residual = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(opt.complex_fit ? 2 * m : m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const cd s = model(p, i);
      if (opt.complex_fit) {
        r(2 * i) = s.real() - trace.s21(i).real();
        r(2 * i + 1) = s.imag() - trace.s21(i).imag();
      } else {
        r(i) = std::abs(s) - mag(i);
      }
    }
    return r;
  };

  LmResult best;
  best.residual_norm = std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    Eigen::VectorXd p0(nparams);
    p0.head<5>() << s.g, s.wi, s.wj, s.kappa, s.kex;
    if (opt.complex_fit) {
      const cd guess = model(p0, peaks[0].index);
      p0(5) = std::arg(trace.s21(peaks[0].index)) - std::arg(guess);
    }
    auto lm = levenberg_marquardt(residual, p0, opt.lm);
    if (lm.params.allFinite() && lm.residual_norm < best.residual_norm) best = std::move(lm);
  }
  if (!std::isfinite(best.residual_norm)) throw FitError("avoided-crossing fit failed");

  FitResult out;
  out.names = {"g", "omega_i", "omega_j", "kappa", "kappa_ex"};
  if (opt.complex_fit) out.names.push_back("phi");
  out.params.resize(nparams);
  // Map back from scaled coordinates; omega_j was fitted as omega_j + Delta.
  Eigen::VectorXd scales = Eigen::VectorXd::Constant(nparams, scale);
  if (opt.complex_fit) scales(5) = 1.0;
  out.params = best.params.cwiseProduct(scales);
  out.params(0) = std::abs(out.params(0));
  out.params(1) += centre;
  out.params(2) += centre - delta;
  out.params(3) = std::abs(out.params(3));
  out.covariance = scales.asDiagonal() * best.covariance * scales.asDiagonal();
  out.residual_norm = best.residual_norm;
  out.iterations = best.iterations;
  if (!best.converged) out.warnings.push_back("fit reached the iteration cap");
  if (out.params(0) < out.params(3) / 4.0) out.warnings.push_back("splitting unresolved: g < kappa/4");
  return out;
}

// ---------------------------------------------------------------------------
// Power law

FitResult fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("power-law inputs differ in length");
  if (x.size() < 2) throw FitError("power-law fit needs at least 2 points");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::VectorXd lx(n), ly(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = x[static_cast<std::size_t>(i)], yi = y[static_cast<std::size_t>(i)];
    if (!(xi > 0.0) || !(yi > 0.0)) throw DomainError("power-law fit requires positive x and y");
    lx(i) = std::log(xi);
    ly(i) = std::log(yi);
  }
  const double mx = lx.mean(), my = ly.mean();
  const Eigen::VectorXd dx = lx.array() - mx;
  const double sxx = dx.squaredNorm();
  if (!(sxx > 0.0)) throw FitError("power-law fit needs at least two distinct x values");
  const double slope = dx.dot(ly) / sxx;
  const double intercept = my - slope * mx;
  const Eigen::VectorXd resid = ly - (intercept + slope * lx.array()).matrix();
  const double s2 = n > 2 ? resid.squaredNorm() / static_cast<double>(n - 2) : 0.0;

  FitResult out;
  out.names = {"exponent", "prefactor"};
  out.params.resize(2);
  out.params << slope, std::exp(intercept);
  const double var_slope = s2 / sxx;
  const double var_icpt = s2 * (1.0 / n + mx * mx / sxx);
  const double cov_si = -s2 * mx / sxx;
  const double pref = out.params(1);
  out.covariance.resize(2, 2);
  out.covariance << var_slope, pref * cov_si, pref * cov_si, pref * pref * var_icpt;
  out.residual_norm = resid.norm();
  out.iterations = 1;
  return out;
}

// ---------------------------------------------------------------------------
// Background subtraction

TransmissionTrace subtract_background(const TransmissionTrace& signal, const TransmissionTrace& background) {
  if (signal.freq_hz.size() != background.freq_hz.size() || (signal.freq_hz != background.freq_hz).any())
    throw ValidationError("signal and background are sampled on different frequency grids");
  if (signal.s21.size() != signal.freq_hz.size() || background.s21.size() != background.freq_hz.size())
    throw ValidationError("trace values do not match their grids");
  TransmissionTrace out = signal;
  out.s21 = signal.s21 - background.s21;
  out.meta.history.push_back("background subtracted (linear units)" +
                             (background.meta.model.empty() ? std::string() : ": " + background.meta.model));
  return out;
}

// ---------------------------------------------------------------------------
// Gain calibration

FitResult calibrate_gain(std::span<const GainPoint> points, GainWindow window) {
  std::vector<GainPoint> used;
  for (const auto& pt : points)
    if (pt.temperature_k >= window.t_min && pt.temperature_k <= window.t_max) used.push_back(pt);
  if (used.size() < 2) throw FitError("gain calibration needs at least 2 points inside the temperature window");
  const auto n = static_cast<Eigen::Index>(used.size());
  Eigen::VectorXd t(n), p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    t(i) = used[static_cast<std::size_t>(i)].temperature_k;
    p(i) = used[static_cast<std::size_t>(i)].power_w;
  }
  const double mt = t.mean(), mp = p.mean();
  const Eigen::VectorXd dt = t.array() - mt;
  const double stt = dt.squaredNorm();
  if (!(stt > 0.0)) throw FitError("gain calibration needs at least two distinct temperatures");
  const double gain = dt.dot(p) / stt;
  const double offset = mp - gain * mt;  // G * T_add
  const Eigen::VectorXd resid = p - (offset + gain * t.array()).matrix();
  const double s2 = n > 2 ? resid.squaredNorm() / static_cast<double>(n - 2) : 0.0;

  const double var_g = s2 / stt;
  const double var_o = s2 * (1.0 / n + mt * mt / stt);
  const double cov_go = -s2 * mt / stt;
  const double t_add = offset / gain;
  // Delta method for T_add = offset / G.
  const double dtg = -offset / (gain * gain), dto = 1.0 / gain;

  FitResult out;
  out.names = {"G", "T_add"};
  out.params.resize(2);
  out.params << gain, t_add;
  out.covariance.resize(2, 2);
  const double cov_gt = dtg * var_g + dto * cov_go;
  out.covariance << var_g, cov_gt, cov_gt, dtg * dtg * var_g + 2.0 * dtg * dto * cov_go + dto * dto * var_o;
  out.residual_norm = resid.norm();
  out.iterations = 1;
  return out;
}

// ---------------------------------------------------------------------------
// Occupation estimates

PsdTrace make_psd_trace(Eigen::ArrayXd freq_hz, Eigen::ArrayXd psd, double centre_hz, double width_hz) {
  PsdTrace t;
  t.freq_hz = std::move(freq_hz);
  t.psd = std::move(psd);
  t.band_lo_hz = centre_hz - width_hz / 2.0;
  t.band_hi_hz = centre_hz + width_hz / 2.0;
  return t;
}

namespace {

double effective_kappa(double kappa_ex, KappaConvention c) {
  return c == KappaConvention::angular ? kappa_ex : kappa_ex / kTwoPi;
}

}  // namespace

double occupation_from_psd(const PsdTrace& trace, double kappa_ex, double gain, KappaConvention convention) {
  if (!(kappa_ex > 0.0) || !(gain > 0.0)) throw DomainError("kappa_ex and gain must be positive");
  const Eigen::Index m = trace.freq_hz.size();
  if (m < 2 || trace.psd.size() != m) throw ValidationError("PSD trace needs matching grid and values");
  const double lo = trace.band_lo_hz, hi = trace.band_hi_hz;
  if (!(hi > lo) || lo < trace.freq_hz(0) || hi > trace.freq_hz(m - 1))
    throw ValidationError("integration band lies outside the PSD grid");

  const Eigen::ArrayXd integrand = trace.psd / (gain * kPlanck * trace.freq_hz);
  auto interp = [&](double f) {
    const auto* begin = trace.freq_hz.data();
    const auto it = std::upper_bound(begin, begin + m, f);
    const Eigen::Index j = std::clamp<Eigen::Index>(it - begin, 1, m - 1);
    const double f0 = trace.freq_hz(j - 1), f1 = trace.freq_hz(j);
    const double t = (f - f0) / (f1 - f0);
    return (1.0 - t) * integrand(j - 1) + t * integrand(j);
  };
  // Trapezoid over [lo, hi] using the grid points inside and interpolated end values.
  double integral = 0.0;
  double prev_f = lo, prev_v = interp(lo);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double f = trace.freq_hz(i);
    if (f <= lo || f >= hi) continue;
    integral += 0.5 * (prev_v + integrand(i)) * (f - prev_f);
    prev_f = f;
    prev_v = integrand(i);
  }
  integral += 0.5 * (prev_v + interp(hi)) * (hi - prev_f);
  return integral / effective_kappa(kappa_ex, convention);
}

double scattered_photon_estimate(double p_n_watts, double gain, double kappa_ex, double f_n_hz,
                                 KappaConvention convention) {
  if (p_n_watts < 0.0 || !(gain > 0.0) || !(kappa_ex > 0.0) || !(f_n_hz > 0.0))
    throw DomainError("photon estimate needs P_N >= 0 and positive gain, kappa_ex, f_N");
  return p_n_watts / (gain * effective_kappa(kappa_ex, convention)) / (kPlanck * f_n_hz);
}

double cross_check_resonant_scattering(double n_k, double g, double kappa) {
  if (n_k < 0.0 || g < 0.0 || !(kappa > 0.0)) throw DomainError("resonant-scattering check needs n, g >= 0 and kappa > 0");
  return n_k * g / kappa;
}

}  // namespace jjchain
