#pragma once

// Learning-free feedback baseline: keep the leading delay taps of the
// space-delay representation and zero-pad them back at the receiver.

#include "csilab/common.hpp"

namespace csilab::baselines {

/// Right-multiplication by the unitary N_c-point inverse DFT:
/// out[a, m] = N_c^{-1/2} sum_c y[a, c] exp(+j 2 pi c m / N_c).
CMatrixD to_delay_domain(const CMatrixD& y);

/// Inverse of to_delay_domain (unitary forward DFT along the rows).
CMatrixD from_delay_domain(const CMatrixD& d);

struct DelayDomainCoeffs {
  CMatrixD coeffs;  // N_a x k
  int n_subcarriers = 0;

  std::size_t real_count() const { return 2 * static_cast<std::size_t>(coeffs.size()); }
};

/// First k delay taps of to_delay_domain(y).
DelayDomainCoeffs idft_compress(const CMatrixD& y, int k = 2);

/// Zero-pads taps k..N_c-1 and returns to the frequency domain.
CMatrixD idft_reconstruct(const DelayDomainCoeffs& c);

/// idft_reconstruct(idft_compress(y, k)) on single-precision channels.
CMatrix idft_feedback(const CMatrix& y, int k = 2);

}  // namespace csilab::baselines
