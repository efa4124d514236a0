#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "jjchain/errors.hpp"
#include "jjchain/fitting.hpp"
#include "jjchain/spectra.hpp"
#include "jjchain/units.hpp"
#include "oracles.hpp"

using namespace jjchain;
using cd = std::complex<double>;

namespace {

const ChainParams kChain{30e9, 17e9, 6.2e12, 1000, 5.0, 0.0};
const double kKappa = hz_to_angular(1.7e6);
const double kKappaEx = hz_to_angular(0.4e6);

double rel(cd a, cd b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Eigen::ArrayXd grid_around(double centre, double half_width, int points) {
  return Eigen::ArrayXd::LinSpaced(points, centre - half_width, centre + half_width);
}

// Local maxima of |S21| in descending height.
std::vector<double> peak_positions(const Eigen::ArrayXd& w, const Eigen::ArrayXcd& s) {
  std::vector<std::pair<double, double>> peaks;
  const Eigen::ArrayXd m = s.abs();
  for (Eigen::Index i = 1; i + 1 < m.size(); ++i)
    if (m(i) > m(i - 1) && m(i) >= m(i + 1)) {
      // parabolic refinement
      const double a = m(i - 1), b = m(i), c = m(i + 1);
      const double shift = 0.5 * (a - c) / (a - 2 * b + c);
      peaks.push_back({b, w(i) + shift * (w(1) - w(0))});
    }
  std::sort(peaks.begin(), peaks.end(), [](auto& x, auto& y) { return x.first > y.first; });
  std::vector<double> out;
  for (auto& p : peaks) out.push_back(p.second);
  return out;
}

CascadeSystem random_system(std::mt19937_64& rng, int i_max) {
  std::uniform_real_distribution<double> f(-50e6, 50e6), k(0.3e6, 3e6), g(0.0, 5e6);
  CascadeSystem sys;
  sys.k = 50;
  sys.i_max = i_max;
  const Eigen::Index d = 2 * i_max + 1;
  sys.freqs_prime.resize(d);
  sys.kappas.resize(d);
  sys.couplings.resize(d - 1);
  for (Eigen::Index j = 0; j < d; ++j) {
    sys.freqs_prime(j) = hz_to_angular(6e9 + (j - i_max) * 400e6 + f(rng));
    sys.kappas(j) = hz_to_angular(k(rng));
  }
  for (Eigen::Index j = 0; j + 1 < d; ++j) sys.couplings(j) = hz_to_angular(g(rng));
  return sys;
}

}  // namespace

TEST_CASE("pairwise model limits") {
  const double wi = hz_to_angular(6e9), wj = hz_to_angular(6.5e9), delta = wi - wj;
  Eigen::ArrayXd grid(1);
  grid << wi;
  const auto t0 = s21_pairwise(grid, wi, wj, delta, 0.0, kKappa, kKappaEx);
  CHECK(t0.s21(0).real() == doctest::Approx(2 * kKappaEx / kKappa).epsilon(1e-15));
  CHECK(t0.s21(0).imag() == 0.0);
  const auto tinf = s21_pairwise(grid, wi, wj, delta, 1e6 * kKappa, kKappa, kKappaEx);
  CHECK(std::abs(tinf.s21(0)) < 1e-12);
  CHECK_THROWS_AS(s21_pairwise(grid, wi, wj, delta, 0.0, kKappa, kKappa), ValidationError);
  CHECK_THROWS_AS(s21_pairwise(grid, wi, wj, delta, 0.0, 0.0, 0.0), ValidationError);
}

TEST_CASE("pairwise splitting on resonance is 2g") {
  const double kappa = hz_to_angular(0.5e6);
  for (double g_hz : {2e6, 4e6, 8e6}) {
    const double g = hz_to_angular(g_hz), wi = hz_to_angular(6e9), wj = hz_to_angular(6.3e9);
    const Eigen::ArrayXd grid = grid_around(wi, 3 * g, 20001);
    const auto t = s21_pairwise(grid, wi, wj, wi - wj, g, kappa, kappa / 4);
    const auto peaks = peak_positions(grid, t.s21);
    REQUIRE(peaks.size() >= 2);
    const double split = std::abs(peaks[0] - peaks[1]);
    CHECK(std::abs(split - 2 * g) < kappa / 10);
    CHECK(std::abs(split - 2 * g) < 0.02 * 2 * g);
  }
}

TEST_CASE("two-neighbour model") {
  const double wk = hz_to_angular(6e9), wkm = hz_to_angular(5.6e9), wkp = hz_to_angular(6.4e9);
  const Eigen::ArrayXd grid = grid_around(wk, 10 * kKappa, 2001);
  Eigen::ArrayXd one(1);
  one << 0.0;
  const auto bare = s21_pairwise(grid, wk, wkp, 0.0, 0.0, kKappa, kKappaEx);
  const auto decoupled = s21_two_neighbors(grid, wk, wkm, wkp, hz_to_angular(400e6), 0.0, kKappa, kKappaEx);
  for (Eigen::Index i = 0; i < grid.size(); ++i) CHECK(rel(decoupled.s21(i), bare.s21(i)) < 1e-15);

  // Delta 100 kappa away from both conditions w_km + Delta = w_k and w_kp - Delta = w_k.
  const double g = hz_to_angular(2e6);
  const double far = (wk - wkm) + 100 * kKappa;
  const auto detuned = s21_two_neighbors(grid, wk, wkm, wkp, far, g, kKappa, kKappaEx);
  const double peak = 2 * kKappaEx / kKappa;
  for (Eigen::Index i = 0; i < grid.size(); ++i) CHECK(std::abs(detuned.s21(i) - bare.s21(i)) < 0.01 * peak);
}

TEST_CASE("cascade matrix structure") {
  CascadeSystem sys;
  sys.k = 10;
  sys.i_max = 1;
  sys.freqs_prime.resize(3);
  sys.freqs_prime << 1.0e10, 1.2e10, 1.4e10;
  sys.kappas = Eigen::ArrayXd::Constant(3, kKappa);
  sys.couplings = Eigen::ArrayXd::Zero(2);
  DriveSpec drive{44, 47, 2.0e9, 1.0, 1.0};
  const auto a = build_cascade_matrix(sys, drive).to_dense();
  CHECK(a(0, 0) == cd(1.0e10 + 2.0e9, -kKappa / 2));
  CHECK(a(1, 1) == cd(1.2e10, -kKappa / 2));
  CHECK(a(2, 2) == cd(1.4e10 - 2.0e9, -kKappa / 2));
  CHECK(a.isDiagonal());

  std::mt19937_64 rng(3);
  for (int i_max : {1, 2, 4, 8}) {
    const CascadeSystem r = random_system(rng, i_max);
    const auto m = build_cascade_matrix(r, drive).to_dense();
    CHECK((m - m.transpose()).norm() == 0.0);
    DriveSpec shifted = drive;
    const double x = 1.234e7;
    shifted.delta += x;
    const auto m2 = build_cascade_matrix(r, shifted).to_dense();
    for (Eigen::Index n = 0; n < m.rows(); ++n)
      CHECK(std::abs((m2(n, n) - m(n, n)) - cd(-(static_cast<double>(n) - i_max) * x, 0.0)) <= 1e-6);
  }
}

TEST_CASE("decoupled cascade is a Lorentzian at the read-out mode") {
  std::mt19937_64 rng(11);
  for (int i_max : {1, 3, 6}) {
    CascadeSystem sys = random_system(rng, i_max);
    sys.couplings.setZero();
    const double wk = sys.freqs_prime(i_max), kk = sys.kappas(i_max);
    const Eigen::ArrayXd grid = grid_around(wk, 20 * kk, 501);
    const auto c = s21_cascade(grid, sys, {44, 47, hz_to_angular(123e6), 1, 1}, kk / 3);
    const auto l = s21_pairwise(grid, wk, wk, 0.0, 0.0, kk, kk / 3);
    for (Eigen::Index i = 0; i < grid.size(); ++i) CHECK(rel(c.s21(i), l.s21(i)) < 1e-12);
  }
}

TEST_CASE("tridiagonal solve equals dense LU") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dl(-500e6, 500e6);
  for (int trial = 0; trial < 40; ++trial) {
    const int i_max = 1 + trial % 8;
    const CascadeSystem sys = random_system(rng, i_max);
    const DriveSpec drive{44, 47, hz_to_angular(400e6 + dl(rng) / 10), 1, 1};
    Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(sys.dimension(), sys.dimension());
    for (Eigen::Index j = 0; j < sys.dimension(); ++j) {
      dense(j, j) = cd(sys.freqs_prime(j) - double(j - i_max) * drive.delta, -sys.kappas(j) / 2);
      if (j > 0) dense(j, j - 1) = dense(j - 1, j) = sys.couplings(j - 1);
    }
    const Eigen::ArrayXd grid = grid_around(sys.freqs_prime(i_max), hz_to_angular(60e6), 301);
    const auto t = s21_cascade(grid, sys, drive, kKappaEx);
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      REQUIRE(rel(t.s21(i), oracle::resolvent_s21(dense, grid(i), kKappaEx, i_max)) < 1e-12);
  }
}

TEST_CASE("cascade with one order equals the two-neighbour closed form") {
  const double wk = hz_to_angular(6e9), wkm = hz_to_angular(5.6e9), wkp = hz_to_angular(6.4e9);
  const double g = hz_to_angular(3e6);
  CascadeSystem sys;
  sys.k = 20;
  sys.i_max = 1;
  sys.freqs_prime.resize(3);
  sys.freqs_prime << wkm, wk, wkp;
  sys.kappas = Eigen::ArrayXd::Constant(3, kKappa);
  sys.couplings = Eigen::ArrayXd::Constant(2, g);
  for (double dhz : {395e6, 400e6, 401.5e6}) {
    const DriveSpec drive{23, 26, hz_to_angular(dhz), 1, 1};
    const Eigen::ArrayXd grid = grid_around(wk, hz_to_angular(30e6), 1000);
    const auto c = s21_cascade(grid, sys, drive, kKappaEx);
    const auto n = s21_two_neighbors(grid, wk, wkm, wkp, drive.delta, g, kKappa, kKappaEx);
    for (Eigen::Index i = 0; i < grid.size(); ++i) REQUIRE(rel(c.s21(i), n.s21(i)) < 1e-12);
  }
}

TEST_CASE("passivity") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    CascadeSystem sys = random_system(rng, 1 + trial % 6);
    const double kmin = sys.kappas.minCoeff();
    const double kex = kmin / 2;  // 2 kappa_ex <= kappa for the read-out mode
    const double bound = 2 * kex / sys.kappas(sys.i_max);
    const Eigen::ArrayXd grid = grid_around(sys.freqs_prime(sys.i_max), hz_to_angular(80e6), 4001);
    const auto t = s21_cascade(grid, sys, {44, 47, hz_to_angular(400e6), 1, 1}, kex);
    CHECK(t.s21.abs().maxCoeff() <= bound + 1e-9);
  }
  const Eigen::ArrayXd grid = grid_around(hz_to_angular(6e9), hz_to_angular(20e6), 2001);
  const auto p = s21_pairwise(grid, hz_to_angular(6e9), hz_to_angular(6.3e9), hz_to_angular(-300e6), hz_to_angular(2e6),
                              kKappa, kKappa / 2);
  CHECK(p.s21.abs().maxCoeff() <= 1.0 + 1e-9);
}

TEST_CASE("fit model reductions") {
  const DriveSpec drive{44, 47, hz_to_angular(507e6), 0.01, 0.01};
  const DispersionParams disp{3e6, hz_to_angular(20e9), 5e-3};
  const ModeTable modes = build_mode_table(disp, 173, kKappaEx, hz_to_angular(0.9e6));
  const CascadeSystem sys = cascade_system_from_chain(41, 4, drive, modes, kChain);
  const Eigen::ArrayXd elements = cascade_bond_elements(41, 4, drive, kChain);
  CHECK(elements.size() == 8);
  const Eigen::ArrayXd grid = grid_around(sys.freqs_prime(4), hz_to_angular(50e6), 801);

  const CascadeFit identity{kKappa, 0.0, std::sqrt(drive.n_p * drive.n_q), 1.0, 0.0};
  const auto ref = s21_cascade(grid, sys, drive, kKappaEx);
  const auto fit = s21_cascade_fit_model(grid, sys, drive, elements, identity, kKappaEx);
  for (Eigen::Index i = 0; i < grid.size(); ++i) CHECK(rel(fit.s21(i), ref.s21(i)) < 1e-12);

  CascadeFit rotated = identity;
  rotated.phi_fit = 0.7;
  const auto rot = s21_cascade_fit_model(grid, sys, drive, elements, rotated, kKappaEx);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(rot.s21(i)) == doctest::Approx(std::abs(ref.s21(i))).epsilon(1e-13));
    CHECK(rel(rot.s21(i), ref.s21(i) * std::polar(1.0, 0.7)) < 1e-13);
  }

  CascadeFit shifted = identity;
  shifted.alpha_fit = 0.01;
  shifted.n_pump_fit = 0.0;
  const auto sh = s21_cascade_fit_model(grid * 1.01, sys, drive, elements, shifted, kKappaEx);
  CascadeSystem bare = sys;
  bare.couplings.setZero();
  const auto ref_bare = s21_cascade(grid, bare, drive, kKappaEx);
  // With no couplings only the read-out diagonal matters; scaling it by 1.01 moves the peak to 1.01 w_k.
  const auto p_sh = peak_positions(grid * 1.01, sh.s21);
  const auto p_ref = peak_positions(grid, ref_bare.s21);
  CHECK(p_sh[0] == doctest::Approx(1.01 * p_ref[0]).epsilon(1e-9));
}

TEST_CASE("resonance guides") {
  Eigen::ArrayXd fp(9);
  for (int j = 0; j < 9; ++j) fp(j) = hz_to_angular(10e9 + (j - 4) * 500e6 - (j - 4) * (j - 4) * 8e6);
  CHECK(resonance_guide(1, fp, PumpingSide::above).slope == -1.0);
  CHECK(resonance_guide(-1, fp, PumpingSide::above).slope == 1.0);
  CHECK(resonance_guide(1, fp, PumpingSide::below).slope == 1.0);
  CHECK(std::abs(resonance_guide(3, fp, PumpingSide::above).slope) == doctest::Approx(1.0 / 3));
  CHECK(std::abs(resonance_guide(-3, fp, PumpingSide::below).slope) == doctest::Approx(1.0 / 3));
  CHECK(resonance_guide(2, fp, PumpingSide::above).intercept_hz == doctest::Approx((1000e6 - 32e6) / 2));
  CHECK(resonance_guides(fp, PumpingSide::above).size() == 8);
  CHECK_THROWS_AS(resonance_guide(0, fp, PumpingSide::above), DomainError);
  CHECK_THROWS_AS(resonance_guide(5, fp, PumpingSide::above), DomainError);
}

TEST_CASE("transmission minima follow the guide lines at four orders") {
  // Read-out mode 41, pumps on 44 and 47, couplings from the matrix elements (g/2pi of 6 to 10 MHz).
  const DriveSpec base{44, 47, 0.0, 0.3, 0.3};
  const DispersionParams disp{3e6, hz_to_angular(20e9), 5e-3};
  const ModeTable modes = build_mode_table(disp, 173, kKappaEx, hz_to_angular(0.9e6));
  const CascadeSystem sys = cascade_system_from_chain(41, 4, base, modes, kChain);
  const double fk = angular_to_hz(sys.freqs_prime(4));

  for (const auto& gl : resonance_guides(sys.freqs_prime, PumpingSide::above)) {
    std::vector<double> offsets, deltas;
    // Walk along the guide and keep the local minimum of |S21| nearest to it.
    for (double x = -150e6; x <= 150e6; x += 2e6) {
      if (std::abs(x) < 20e6) continue;
      const double d_hz = gl.slope * x + gl.intercept_hz;
      DriveSpec drive = base;
      drive.delta = hz_to_angular(d_hz);
      const Eigen::ArrayXd grid = grid_around(hz_to_angular(fk + x), hz_to_angular(4e6), 6001);
      const Eigen::ArrayXd m = s21_cascade(grid, sys, drive, kKappaEx).s21.abs();
      double nearest = 1e300;
      for (Eigen::Index i = 1; i + 1 < m.size(); ++i)
        if (m(i) < m(i - 1) && m(i) <= m(i + 1)) {
          const double off = angular_to_hz(grid(i)) - fk;
          if (std::abs(off - x) < std::abs(nearest - x)) nearest = off;
        }
      if (nearest < 1e299) {
        offsets.push_back(nearest);
        deltas.push_back(d_hz);
      }
    }
    INFO("order " << gl.order);
    REQUIRE(offsets.size() >= 10);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < offsets.size(); ++i) mx += offsets[i], my += deltas[i];
    mx /= offsets.size();
    my /= offsets.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      sxy += (offsets[i] - mx) * (deltas[i] - my);
      sxx += (offsets[i] - mx) * (offsets[i] - mx);
    }
    // Level repulsion from the neighbouring orders bends the branches by a few percent.
    CHECK(sxy / sxx == doctest::Approx(-1.0 / gl.order).epsilon(0.03));
  }
}
