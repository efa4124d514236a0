#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "jjchain/errors.hpp"
#include "jjchain/fitting.hpp"
#include "jjchain/units.hpp"
#include "jjchain/wave_mixing.hpp"
#include "oracles.hpp"

using namespace jjchain;

namespace {
const ChainParams kChain{30e9, 17e9, 6.2e12, 1000, 5.0, 0.0};
}

TEST_CASE("multiplicity examples") {
  CHECK(momentum_multiplicity(1, 2, 3, 4) >= 1);
  CHECK(momentum_multiplicity(1, 2, 3, 4) == 1);
  CHECK(momentum_multiplicity(1, 2, 4, 8) == 0);
  // Three sign triples vanish: (+,-,-), (-,+,-), (-,-,+).
  CHECK(momentum_multiplicity(1, 1, 1, 1) == 3);
  CHECK(momentum_multiplicity(41, 44, 29, 32) == 1);
  CHECK_THROWS_AS(momentum_multiplicity(0, 1, 1, 1), DomainError);
}

TEST_CASE("multiplicity equals subset-sum count on random quadruples") {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> idx(1, 60);
  for (int trial = 0; trial < 10000; ++trial) {
    const int k = idx(rng), l = idx(rng), m = idx(rng), n = idx(rng);
    const int got = momentum_multiplicity(k, l, m, n);
    REQUIRE(got == oracle::multiplicity(k, l, m, n));
    REQUIRE(got == oracle::multiplicity_loop(k, l, m, n));
    REQUIRE(got >= 0);
    REQUIRE(got <= 8);
  }
}

TEST_CASE("matrix element values") {
  CHECK(matrix_element(1, 2, 4, 8, kChain) == 0.0);
  // Independent hand evaluation for the cascade bond used in the examples.
  CHECK(matrix_element(41, 44, 29, 32, kChain) == doctest::Approx(-124366544.19075032).epsilon(1e-13));
  CHECK(angular_to_hz(matrix_element(41, 44, 29, 32, kChain)) == doctest::Approx(-19793550.263214555).epsilon(1e-13));
  CHECK(matrix_element(41, 44, 29, 32, kChain) == doctest::Approx(oracle::element(41, 44, 29, 32, 6.2e12, 1000)).epsilon(1e-14));
  CHECK(std::abs(matrix_element(2, 4, 6, 8, kChain) / matrix_element(1, 2, 3, 4, kChain)) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK_THROWS_AS(matrix_element(1, 2, 3, 1001, kChain), DomainError);
  const MixingProcess proc = mixing_process(1, 1, 1, 1, kChain);
  CHECK(proc.multiplicity == 3);
  CHECK(proc.element < 0.0);
}

TEST_CASE("matrix element permutation symmetry and zero pattern") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> idx(1, 40);
  for (int trial = 0; trial < 2000; ++trial) {
    const int k = idx(rng), l = idx(rng), m = idx(rng), n = idx(rng);
    const double e = matrix_element(k, l, m, n, kChain);
    REQUIRE((e == 0.0) == (momentum_multiplicity(k, l, m, n) == 0));
    REQUIRE(matrix_element(l, k, m, n, kChain) == doctest::Approx(e).epsilon(1e-14));
    REQUIRE(matrix_element(k, l, n, m, kChain) == doctest::Approx(e).epsilon(1e-14));
    REQUIRE(matrix_element(m, n, k, l, kChain) == doctest::Approx(e).epsilon(1e-14));
  }
}

TEST_CASE("effective coupling") {
  CHECK(effective_coupling(1e5, 0.0, 100.0) == 0.0);
  CHECK(angular_to_hz(effective_coupling(hz_to_angular(13e3), 100.0, 100.0)) == doctest::Approx(1.3e6).epsilon(1e-14));
  CHECK(effective_coupling(-2.0, 4.0, 9.0) == doctest::Approx(12.0));
  CHECK_THROWS_AS(effective_coupling(1.0, -1.0, 1.0), DomainError);

  std::vector<double> prod, g;
  for (int i = 1; i <= 30; ++i) {
    const double np = 3.0 * i, nq = 1.0 + i * i;
    prod.push_back(np * nq);
    g.push_back(effective_coupling(hz_to_angular(13e3), np, nq));
  }
  CHECK(fit_power_law(prod, g).value("exponent") == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("coupling grows close to linearly with k") {
  const int p = 41, delta = 3;
  std::vector<double> ks, mags;
  for (int k = 20; k <= 60; ++k) {
    ks.push_back(k);
    mags.push_back(std::abs(matrix_element(p, p + delta, k, k + delta, kChain)));
  }
  const double e = fit_power_law(ks, mags).value("exponent");
  CHECK(e >= 0.9);
  CHECK(e <= 1.1);
}
