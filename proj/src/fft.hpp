#pragma once

#include <complex>
#include <span>

namespace spdeapprox::fft {

// Thin wrappers around FFTW with a per-size plan cache. Plans are created
// under a lock; execution uses the new-array interface and is thread-safe.

/// out[m] = sum_{k=0}^{M/2} in[k] e^{2 pi i k m / M} + c.c. (FFTW c2r convention),
/// in.size() == M/2 + 1. `in` is used as scratch.
void inverse_real(std::span<std::complex<double>> in, std::span<double> out);

/// out[k] = sum_m in[m] e^{-2 pi i k m / M}, k = 0..M/2. `in` is used as scratch.
void forward_real(std::span<double> in, std::span<std::complex<double>> out);

/// In-place complex transform, sign +1 (backward): x[m] <- sum_r x[r] e^{2 pi i r m / M}.
void backward_complex(std::span<std::complex<double>> data);

}  // namespace spdeapprox::fft
