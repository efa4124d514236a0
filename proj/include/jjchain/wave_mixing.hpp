#pragma once

#include <array>

#include "jjchain/chain_model.hpp"

namespace jjchain {

/// A four-mode scattering process with its quasimomentum multiplicity and matrix element.
struct MixingProcess {
  std::array<int, 4> modes{};
  int multiplicity = 0;
  double element = 0.0;  ///< rad/s per photon, signed (negative when nonzero)
};

/// Number of sign triples (s1, s2, s3) in {+1,-1}^3 with k + s1 l + s2 m + s3 n = 0.
/// Quasimomentum of standing waves is only conserved up to sign, hence the count.
int momentum_multiplicity(int k, int l, int m, int n);

/// Four-wave-mixing element K_klmn = -(2 pi e_g) pi^2 / (4 N^3) sqrt(klmn) * multiplicity, in rad/s.
///
/// Only |K| or K^2 is physically probed anywhere in this library; the sign is kept
/// for completeness. Self-decay exclusion is a property of the kinetic sums and is
/// not applied here.
double matrix_element(int k, int l, int m, int n, const ChainParams& params);

MixingProcess mixing_process(int k, int l, int m, int n, const ChainParams& params);

/// Pump-induced beam-splitter coupling g = |K| sqrt(n_p n_q).
double effective_coupling(double element, double n_p, double n_q);

}  // namespace jjchain
