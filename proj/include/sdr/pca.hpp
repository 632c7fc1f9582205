#pragma once

#include <filesystem>

#include "sdr/feature_matrix.hpp"

namespace sdr {

struct PcaModel {
  Vec mean;                      // length n
  Mat components;                // k x n, orthonormal rows
  Vec explained_variance_ratio;  // length k, non-increasing
  double target_variance = 0.99;

  Eigen::Index input_dim() const { return mean.size(); }
  Eigen::Index output_dim() const { return components.rows(); }

  void save(const std::filesystem::path& path) const;
  static PcaModel load(const std::filesystem::path& path);
};

// Fits on the given rows (train split only in the pipeline) and keeps the
// smallest k whose cumulative explained variance reaches target_variance.
PcaModel fit_pca(const Mat& rows, double target_variance);

// Maps every row to (row - mean) * components^T; modality becomes visual_pca.
FeatureMatrix apply_pca(const PcaModel& model, const FeatureMatrix& m);

// Inverse map y * components + mean (used by reconstruction checks).
Mat reconstruct_pca(const PcaModel& model, const Mat& projected);

}  // namespace sdr
