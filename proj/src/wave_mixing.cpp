#include "jjchain/wave_mixing.hpp"

#include <cstdlib>
#include <string>

#include "jjchain/errors.hpp"

namespace jjchain {

int momentum_multiplicity(int k, int l, int m, int n) {
  if (k < 1 || l < 1 || m < 1 || n < 1) throw DomainError("mode indices must be >= 1");
  int count = 0;
  for (int s1 : {1, -1})
    for (int s2 : {1, -1})
      for (int s3 : {1, -1})
        if (k + s1 * l + s2 * m + s3 * n == 0) ++count;
  return count;
}

double matrix_element(int k, int l, int m, int n, const ChainParams& params) {
  for (int idx : {k, l, m, n})
    if (idx < 1 || idx > params.n_junctions)
      throw DomainError("mode index " + std::to_string(idx) + " outside 1.." + std::to_string(params.n_junctions));
  const int mult = momentum_multiplicity(k, l, m, n);
  if (mult == 0) return 0.0;
  const double nn = static_cast<double>(params.n_junctions);
  const double prefactor = kTwoPi * params.e_g_hz * std::numbers::pi * std::numbers::pi / (4.0 * nn * nn * nn);
  const double root = std::sqrt(static_cast<double>(k) * l * static_cast<double>(m) * n);
  return -prefactor * root * mult;
}

MixingProcess mixing_process(int k, int l, int m, int n, const ChainParams& params) {
  return {{k, l, m, n}, momentum_multiplicity(k, l, m, n), matrix_element(k, l, m, n, params)};
}

double effective_coupling(double element, double n_p, double n_q) {
  if (n_p < 0.0 || n_q < 0.0) throw DomainError("pump occupations must be non-negative");
  return std::abs(element) * std::sqrt(n_p * n_q);
}

}  // namespace jjchain
