#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "jjchain/chain_model.hpp"
#include "jjchain/errors.hpp"
#include "jjchain/units.hpp"

using namespace jjchain;

namespace {
const ChainParams kChain{30e9, 17e9, 6.2e12, 1000, 5.0, 0.0};
}

TEST_CASE("linear dispersion") {
  CHECK_THROWS_AS(linear_mode_frequency(0, kChain), DomainError);
  CHECK_THROWS_AS(linear_mode_frequency(1001, kChain), DomainError);
  // sqrt(2 * 6.2e12 * 30e9) * pi / 1000, evaluated by hand.
  CHECK(angular_to_hz(linear_mode_frequency(1, kChain)) == doctest::Approx(1916113993.791925).epsilon(1e-13));
  for (int k = 1; k <= 250; ++k) CHECK(linear_mode_frequency(2 * k, kChain) == 2.0 * linear_mode_frequency(k, kChain));
  for (int k = 1; k < 40; ++k)
    for (int l = 1; l < 40; ++l)
      CHECK(linear_mode_frequency(k + l, kChain) ==
            doctest::Approx(linear_mode_frequency(k, kChain) + linear_mode_frequency(l, kChain)).epsilon(1e-15));
}

TEST_CASE("saturating dispersion") {
  const DispersionParams d{3e6, hz_to_angular(20e9), 5e-3};
  const double vq1 = d.v * d.quasimomentum(1);
  const double omega_small = saturating_dispersion(d.v, vq1 * 1e6, d.quasimomentum(1));
  CHECK(omega_small / vq1 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(saturating_dispersion(d.omega_p, d.omega_p, 1.0) == doctest::Approx(d.omega_p / std::sqrt(2.0)).epsilon(1e-15));

  double prev = 0.0;
  for (int k = 1; k <= 5000; ++k) {
    const double w = sqrt_mode_frequency(k, d);
    CHECK(w > prev);
    CHECK(w < d.omega_p);
    CHECK(w <= std::min(d.v * d.quasimomentum(k), d.omega_p));
    prev = w;
  }
  CHECK(sqrt_mode_frequency(5'000'000, d) / d.omega_p == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(sqrt_mode_frequency(0, d), DomainError);
}

TEST_CASE("luttinger parameters") {
  const ChainParams unit{2.0e9, 1e9, 1.0e9, 100, 0, 0};
  CHECK(luttinger_params(unit).k_g == doctest::Approx(1.0).epsilon(1e-15));

  const LuttingerParams lp = luttinger_params(kChain);
  CHECK(lp.k_g == doctest::Approx(0.04918693768379647).epsilon(1e-13));
  CHECK(lp.v_s_hz == doctest::Approx(609918027279.0763).epsilon(1e-13));
  CHECK(lp.k_g * lp.v_s_hz == doctest::Approx(kChain.e_j_hz).epsilon(1e-15));
  CHECK(lp.v_s_hz / lp.k_g == doctest::Approx(2.0 * kChain.e_g_hz).epsilon(1e-15));

  const auto [ej, eg] = energies_from_luttinger(lp);
  CHECK(ej == doctest::Approx(kChain.e_j_hz).epsilon(1e-12));
  CHECK(eg == doctest::Approx(kChain.e_g_hz).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
  ChainParams bad = kChain;
  bad.e_c_hz = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = kChain;
  bad.n_junctions = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK_NOTHROW(kChain.validate());
}

TEST_CASE("mode table defaults and overrides") {
  const double kex = hz_to_angular(kDefaultKappaExHz), ki = hz_to_angular(kDefaultKappaIHz);
  const ModeTable t = build_mode_table(kChain, kDefaultKMax, kex, ki);
  CHECK(t.k_max() == 173);
  CHECK(angular_to_hz(t.mean_kappa()) == doctest::Approx(1.7e6).epsilon(1e-12));
  CHECK((t.kappa_ex == kex).all());
  CHECK((t.kappa_i == ki).all());
  CHECK((t.kappa_total() > 0.0).all());
  for (int k = 2; k <= t.k_max(); ++k) CHECK(t.omega_of(k) > t.omega_of(k - 1));

  const std::vector<ModeOverride> ov{{5, std::nullopt, hz_to_angular(0.6e6), std::nullopt}};
  const ModeTable t2 = build_mode_table(kChain, 20, kex, ki, ov);
  CHECK(angular_to_hz(t2.kappa_ex_of(5)) == doctest::Approx(0.6e6));
  CHECK(t2.kappa_ex_of(4) == kex);

  CHECK_THROWS_AS(build_mode_table(kChain, 1001, kex, ki), ValidationError);
  const std::vector<ModeOverride> unordered{{3, linear_mode_frequency(1, kChain), std::nullopt, std::nullopt}};
  CHECK_THROWS_AS(build_mode_table(kChain, 10, kex, ki, unordered), ValidationError);

  const DispersionParams d{3e6, hz_to_angular(20e9), 5e-3};
  const ModeTable ts = build_mode_table(d, 173, kex, ki);
  CHECK(ts.omega_of(50) == doctest::Approx(sqrt_mode_frequency(50, d)));
}
