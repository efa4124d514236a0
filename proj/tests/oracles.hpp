#pragma once

// Reference implementations used only by the tests. Each one is written from the defining
// formula with plain loops and no shared code paths with the library kernels.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

/// Number of sign triples with k + s1 l + s2 m + s3 n = 0, via subset sums of {l, m, n}:
/// a triple vanishes iff the positively signed subset sums to (l + m + n - k) / 2.
inline int multiplicity(int k, int l, int m, int n) {
  const int total = l + m + n - k;
  if (total < 0 || total % 2 != 0) return 0;
  const int target = total / 2;
  const std::array<int, 3> v{l, m, n};
  int count = 0;
  for (int mask = 0; mask < 8; ++mask) {
    int s = 0;
    for (int b = 0; b < 3; ++b)
      if (mask & (1 << b)) s += v[b];
    if (s == target) ++count;
  }
  return count;
}

/// Plain eight-way sign loop.
inline int multiplicity_loop(int k, int l, int m, int n) {
  int count = 0;
  for (int a : {1, -1})
    for (int b : {1, -1})
      for (int c : {1, -1})
        if (k + a * l + b * m + c * n == 0) ++count;
  return count;
}

/// K_klmn in rad/s: -(2 pi E_g) pi^2 sqrt(klmn) / (4 N^3) times the multiplicity.
inline double element(int k, int l, int m, int n, double e_g_hz, int n_junctions) {
  const double pi = std::numbers::pi;
  const double nn = n_junctions;
  return -2.0 * pi * e_g_hz * pi * pi / (4.0 * nn * nn * nn) *
         std::sqrt(double(k) * double(l) * double(m) * double(n)) * multiplicity(k, l, m, n);
}

inline double lorentzian(double x, double gamma) { return gamma / (std::numbers::pi * (gamma * gamma + x * x)); }

struct KineticResult {
  double collision = 0.0;
  double excess = 0.0;
};

/// Exhaustive triple loop over (p, q1, q2) for read-out mode k. Channels are the 2 -> 2 processes
/// (p, k) -> (q1, q2) with q1 > q2, neither equal to k, and q1 + q2 = k + p.
inline KineticResult kinetic_terms(int k, const Eigen::ArrayXd& n, const Eigen::ArrayXd& excess,
                                   const Eigen::ArrayXd& omega, const Eigen::ArrayXd& kappa, double e_g_hz,
                                   int n_junctions) {
  const int kmax = static_cast<int>(n.size());
  // Extended precision so the reference is tighter than the double-precision code under test.
  long double coll = 0.0L, exc = 0.0L;
  for (int p = 1; p <= kmax; ++p)
    for (int q1 = 1; q1 <= kmax; ++q1)
      for (int q2 = 1; q2 < q1; ++q2) {
        if (q1 == k || q2 == k || q1 + q2 != k + p) continue;
        const long double el = element(q1, q2, p, k, e_g_hz, n_junctions);
        long double gamma = 0.0L;
        for (int j : {q1, q2, p, k}) gamma += (long double)kappa(j - 1) + excess(j - 1);
        const long double dw = (long double)omega(q1 - 1) + omega(q2 - 1) - omega(p - 1) - omega(k - 1);
        const long double w = 2.0L * el * el * gamma / (gamma * gamma + dw * dw);
        const long double nk = n(k - 1), np = n(p - 1), n1 = n(q1 - 1), n2 = n(q2 - 1);
        coll += w * ((1 + np) * (1 + nk) * n1 * n2 - np * nk * (1 + n1) * (1 + n2));
        exc += w * (np * (1 + n1 + n2) - n1 * n2);
      }
  KineticResult r;
  r.collision = static_cast<double>(coll);
  r.excess = static_cast<double>(exc);
  return r;
}

/// i kappa_ex [(w - A)^-1]_cc by dense LU.
inline std::complex<double> resolvent_s21(const Eigen::MatrixXcd& a, double omega, double kappa_ex, Eigen::Index c) {
  const Eigen::Index d = a.rows();
  const Eigen::MatrixXcd m = std::complex<double>(omega, 0.0) * Eigen::MatrixXcd::Identity(d, d) - a;
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(d);
  e(c) = 1.0;
  const Eigen::VectorXcd x = m.partialPivLu().solve(e);
  return std::complex<double>(0.0, kappa_ex) * x(c);
}

}  // namespace oracle
