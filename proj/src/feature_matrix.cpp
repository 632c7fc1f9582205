#include "sdr/feature_matrix.hpp"

#include <cmath>

namespace sdr {

const char* modality_name(Modality m) {
  switch (m) {
    case Modality::audio_mfcc: return "audio_mfcc";
    case Modality::visual_face: return "visual_face";
    case Modality::visual_au_gaze: return "visual_au_gaze";
    case Modality::visual_pca: return "visual_pca";
    case Modality::audio_pretrained: return "audio_pretrained";
    case Modality::audio_waveform: return "audio_waveform";
  }
  return "unknown";
}

Modality modality_from_name(const std::string& name) {
  for (auto m : {Modality::audio_mfcc, Modality::visual_face, Modality::visual_au_gaze,
                 Modality::visual_pca, Modality::audio_pretrained, Modality::audio_waveform}) {
    if (name == modality_name(m)) return m;
  }
  throw std::invalid_argument("unknown modality name: " + name);
}

void FeatureMatrix::validate() const {
  if (data.rows() < 1 || data.cols() < 1) {
    throw std::invalid_argument("FeatureMatrix must have t >= 1 and n >= 1, got " +
                                std::to_string(data.rows()) + "x" + std::to_string(data.cols()));
  }
  if (mask && static_cast<Eigen::Index>(mask->size()) != data.rows()) {
    throw std::invalid_argument("FeatureMatrix mask length " + std::to_string(mask->size()) +
                                " does not match frame count " + std::to_string(data.rows()));
  }
  if (!data.allFinite()) {
    throw std::invalid_argument("FeatureMatrix contains non-finite entries");
  }
}

Vec mean_pool(const FeatureMatrix& m) {
  if (m.data.rows() < 1) throw std::invalid_argument("mean_pool: empty matrix");
  return m.data.colwise().mean();
}

}  // namespace sdr
