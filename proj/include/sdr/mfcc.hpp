#pragma once

#include <vector>

#include "sdr/feature_matrix.hpp"

namespace sdr {

struct MfccConfig {
  double sample_rate = 16000.0;
  int n_mels = 256;
  int n_coeffs = 256;
  double window_length = 0.025;  // seconds
  double hop_length = 0.010;     // seconds
  bool apply_cmvn = false;
  double log_floor = 1e-10;

  int window_samples() const { return static_cast<int>(std::lround(window_length * sample_rate)); }
  int hop_samples() const { return static_cast<int>(std::lround(hop_length * sample_rate)); }
  void validate() const;
};

// Framing (centered, reflect padding) -> Hann window -> power spectrum ->
// mel filterbank (HTK mel scale) -> log with floor -> orthonormal DCT-II,
// first n_coeffs kept. Output has ceil(N / hop) rows.
FeatureMatrix compute_mfcc(const std::vector<double>& waveform, const MfccConfig& config);

// Per-column standardization over time with population variance.
// Zero-variance columns map to all-zeros. Requires t >= 2.
FeatureMatrix cmvn(const FeatureMatrix& m);

// Triangular mel filterbank, n_mels x (n_fft/2 + 1), HTK mel scale over
// [0, sample_rate/2]. Exposed for the reference cross-checks in tests.
Mat mel_filterbank(int n_mels, std::size_t n_fft, double sample_rate);

// Orthonormal DCT-II basis, n_out x n_in. Row k maps an n_in-vector to its
// k-th DCT coefficient.
Mat dct2_basis(int n_out, int n_in);

}  // namespace sdr
