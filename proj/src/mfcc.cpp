#include "sdr/mfcc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sdr/fft.hpp"

namespace sdr {
namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Reflect (no edge repeat) sample lookup.
double sample_at(const std::vector<double>& w, long long idx) {
  const auto n = static_cast<long long>(w.size());
  if (idx < 0) idx = -idx;
  if (idx >= n) idx = 2 * n - 2 - idx;
  return w[static_cast<std::size_t>(idx)];
}

}  // namespace

void MfccConfig::validate() const {
  if (sample_rate <= 0) throw std::invalid_argument("MfccConfig: sample_rate must be positive");
  if (n_mels < 1) throw std::invalid_argument("MfccConfig: n_mels must be >= 1");
  if (n_coeffs < 1 || n_coeffs > n_mels) {
    throw std::invalid_argument("MfccConfig: require 1 <= n_coeffs <= n_mels");
  }
  if (!(hop_length > 0) || window_length < hop_length) {
    throw std::invalid_argument("MfccConfig: require window_length >= hop_length > 0");
  }
  if (log_floor <= 0) throw std::invalid_argument("MfccConfig: log_floor must be positive");
}

Mat mel_filterbank(int n_mels, std::size_t n_fft, double sample_rate) {
  const auto n_bins = static_cast<Eigen::Index>(n_fft / 2 + 1);
  Mat fb = Mat::Zero(n_mels, n_bins);
  const double mel_max = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(static_cast<std::size_t>(n_mels) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_max * static_cast<double>(i) / static_cast<double>(n_mels + 1));
  }
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[static_cast<std::size_t>(m)];
    const double mid = edges[static_cast<std::size_t>(m) + 1];
    const double hi = edges[static_cast<std::size_t>(m) + 2];
    for (Eigen::Index k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n_fft);
      double w = 0.0;
      if (f > lo && f < hi) {
        w = (f <= mid) ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
      }
      fb(m, k) = w;
    }
  }
  return fb;
}

Mat dct2_basis(int n_out, int n_in) {
  Mat basis(n_out, n_in);
  const double norm0 = std::sqrt(1.0 / n_in);
  const double norm = std::sqrt(2.0 / n_in);
  for (int k = 0; k < n_out; ++k) {
    for (int j = 0; j < n_in; ++j) {
      const double angle = std::numbers::pi * k * (2.0 * j + 1.0) / (2.0 * n_in);
      basis(k, j) = (k == 0 ? norm0 : norm) * std::cos(angle);
    }
  }
  return basis;
}

FeatureMatrix compute_mfcc(const std::vector<double>& waveform, const MfccConfig& config) {
  config.validate();
  const int win = config.window_samples();
  const int hop = config.hop_samples();
  const auto n = static_cast<long long>(waveform.size());
  if (n < win) {
    throw std::invalid_argument("compute_mfcc: waveform shorter than one window (" +
                                std::to_string(n) + " < " + std::to_string(win) + " samples)");
  }
  for (double v : waveform) {
    if (!std::isfinite(v)) throw std::invalid_argument("compute_mfcc: non-finite sample in waveform");
  }

  const auto t = static_cast<Eigen::Index>((n + hop - 1) / hop);  // ceil(N / hop)
  const std::size_t n_fft = next_pow2(static_cast<std::size_t>(win));
  const Mat fb = mel_filterbank(config.n_mels, n_fft, config.sample_rate);
  const Mat dct = dct2_basis(config.n_coeffs, config.n_mels);

  std::vector<double> hann(static_cast<std::size_t>(win));
  for (int j = 0; j < win; ++j) {
    hann[static_cast<std::size_t>(j)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * j / static_cast<double>(win));
  }

  FeatureMatrix out;
  out.modality = Modality::audio_mfcc;
  out.frame_rate = 1.0 / config.hop_length;
  out.data.resize(t, config.n_coeffs);

  std::vector<double> frame(static_cast<std::size_t>(win));
  const long long pad = win / 2;
  for (Eigen::Index i = 0; i < t; ++i) {
    const long long start = static_cast<long long>(i) * hop - pad;
    for (int j = 0; j < win; ++j) {
      frame[static_cast<std::size_t>(j)] = sample_at(waveform, start + j) * hann[static_cast<std::size_t>(j)];
    }
    const auto power = power_spectrum(frame, n_fft);
    Eigen::Map<const Vec> power_vec(power.data(), static_cast<Eigen::Index>(power.size()));
    Vec mel = fb * power_vec;
    for (Eigen::Index m = 0; m < mel.size(); ++m) mel(m) = std::log(std::max(mel(m), config.log_floor));
    out.data.row(i) = (dct * mel).transpose();
  }

  if (config.apply_cmvn) return cmvn(out);
  return out;
}

FeatureMatrix cmvn(const FeatureMatrix& m) {
  if (m.data.rows() < 2) throw std::invalid_argument("cmvn: need at least 2 frames");
  FeatureMatrix out = m;
  const auto t = static_cast<double>(m.data.rows());
  for (Eigen::Index c = 0; c < m.data.cols(); ++c) {
    const double mean = m.data.col(c).mean();
    const double var = (m.data.col(c).array() - mean).square().sum() / t;  // population
    const double sd = std::sqrt(var);
    if (sd <= 1e-12 * (std::abs(mean) + 1.0)) {
      out.data.col(c).setZero();
    } else {
      out.data.col(c) = (m.data.col(c).array() - mean) / sd;
    }
  }
  return out;
}

}  // namespace sdr
