#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "sdr/manifest.hpp"

namespace sdr {

// Test-fixture corpus with real ordinal structure. Each class k in 1..7 gets a
// prototype vector k * class_gap * 1/sqrt(n) per feature family, so the
// distance between class k and class k+d prototypes is exactly class_gap * d
// (strictly increasing in d). On top of the prototype every segment carries
// zero-mean within-segment texture — for audio, CMVN-normalized MFCC of a
// synthesized amplitude-modulated tone mixture; for visual, smooth sinusoidal
// curves — plus white Gaussian noise.
//
// snr is a power ratio: (variance of the prototype signal across classes,
// summed over feature dims) / (per-frame noise variance, summed over dims).
// The class index is uniform over {1..7} so the signal power is
// 4 * class_gap^2, giving sigma = 2 * class_gap / sqrt(n * snr). An infinite
// snr produces zero noise, in which case the per-file mean-pooled feature
// equals the class prototype up to rounding.
//
// This corpus is invented plumbing for desk-scale verification; it does not
// model any real recording conditions.
struct SyntheticSpec {
  std::array<int, kNumClasses> per_class = {10, 10, 10, 10, 10, 10, 10};

  double audio_seconds_min = 1.0;   // waveform length before MFCC
  double audio_seconds_max = 1.6;
  int visual_frames_min = 150;
  int visual_frames_max = 260;

  double snr = 9.0;                 // power ratio; infinity = noiseless
  double class_gap = 1.0;           // prototype spacing per ordinal step
  double texture_scale = 0.25;      // per-column sd of the within-segment texture

  int n_mfcc = 24;                  // audio dims (n_mels = n_coeffs)
  int n_face = 24;                  // per-frame face-embedding dims
  int n_au_gaze = 10;               // per-frame AU/gaze dims

  double missing_prob = 0.0;        // chance a visual frame is unobserved
  int n_participants = 10;          // cycled over records
  bool write_waveforms = false;     // also store raw waveforms (t x 1, 16 kHz)

  void validate() const;            // throws std::invalid_argument
  int total() const;
};

// Writes feature files under out_dir (audio/, visual/, optionally waveform/)
// plus out_dir/manifest.jsonl, and returns the records. Visual families are
// named "face" and "au_gaze" in the manifest. Deterministic per seed; each
// record is generated from its own derived stream, so record contents do not
// depend on generation order.
std::vector<SegmentRecord> generate_synthetic_corpus(const SyntheticSpec& spec,
                                                     std::uint64_t seed,
                                                     const std::filesystem::path& out_dir);

}  // namespace sdr
