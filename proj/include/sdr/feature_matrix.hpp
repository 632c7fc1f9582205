#pragma once

#include <Eigen/Core>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdr {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Feature families carried by the SDFM container. `audio_waveform` is the
// raw-sample carrier consumed by the MFCC stage; everything else is a
// per-frame feature family.
enum class Modality : std::uint32_t {
  audio_mfcc = 0,
  visual_face = 1,
  visual_au_gaze = 2,
  visual_pca = 3,
  audio_pretrained = 4,
  audio_waveform = 5,
};

const char* modality_name(Modality m);
Modality modality_from_name(const std::string& name);

// Time-major feature matrix: rows are frames, columns are feature
// dimensions. The optional mask marks which frames were observed
// (true) vs. missing and awaiting interpolation.
struct FeatureMatrix {
  Mat data;                          // t x n
  Modality modality = Modality::audio_mfcc;
  double frame_rate = 0.0;           // Hz
  std::optional<std::vector<bool>> mask;  // length t when present

  Eigen::Index frames() const { return data.rows(); }
  Eigen::Index dims() const { return data.cols(); }

  // Throws std::invalid_argument when shape/mask/finiteness invariants fail.
  void validate() const;
};

// Column means over all frames.
Vec mean_pool(const FeatureMatrix& m);

}  // namespace sdr
