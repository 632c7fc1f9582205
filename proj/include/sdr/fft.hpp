#pragma once

#include <complex>
#include <vector>

namespace sdr {

// In-place iterative radix-2 FFT. Size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a);

// Power spectrum |X_k|^2 of a real signal, bins 0..n/2 (inclusive).
// The input is zero-padded to n_fft samples.
std::vector<double> power_spectrum(const std::vector<double>& frame, std::size_t n_fft);

std::size_t next_pow2(std::size_t n);

}  // namespace sdr
