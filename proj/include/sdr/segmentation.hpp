#pragma once

#include <vector>

#include "sdr/feature_matrix.hpp"

namespace sdr {

// Fixed-shape segmented stack fed to one model stream: s segments of
// l/s frames each, n feature dims.
struct SegmentedTensor {
  std::vector<Mat> segments;  // s matrices, each (l/s) x n
  int segment_count() const { return static_cast<int>(segments.size()); }
  Eigen::Index frames_per_segment() const { return segments.empty() ? 0 : segments.front().rows(); }
  Eigen::Index dims() const { return segments.empty() ? 0 : segments.front().cols(); }
  Mat flatten() const;  // l x n, segments concatenated in order
};

// Center crop to exactly l frames when t > l (the extra frame is dropped
// on the right when t-l is odd); symmetric zero padding when t < l (the
// extra zero frame goes on the right).
FeatureMatrix crop_or_pad(const FeatureMatrix& m, int l);

// Splits the l rows into s contiguous segments. s must divide l.
SegmentedTensor segment_stack(const FeatureMatrix& m, int s);

}  // namespace sdr
