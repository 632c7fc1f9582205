#include "sdr/segmentation.hpp"

#include <stdexcept>

namespace sdr {

Mat SegmentedTensor::flatten() const {
  if (segments.empty()) return Mat();
  Mat out(frames_per_segment() * segment_count(), dims());
  for (int j = 0; j < segment_count(); ++j) {
    out.middleRows(j * frames_per_segment(), frames_per_segment()) = segments[static_cast<std::size_t>(j)];
  }
  return out;
}

FeatureMatrix crop_or_pad(const FeatureMatrix& m, int l) {
  if (l < 1) throw std::invalid_argument("crop_or_pad: l must be >= 1");
  m.validate();
  const auto t = m.data.rows();
  if (t == l) return m;

  FeatureMatrix out;
  out.modality = m.modality;
  out.frame_rate = m.frame_rate;
  if (t > l) {
    const auto start = (t - l) / 2;
    out.data = m.data.middleRows(start, l);
    if (m.mask) {
      out.mask = std::vector<bool>(m.mask->begin() + start, m.mask->begin() + start + l);
    }
  } else {
    const auto pad_left = (static_cast<Eigen::Index>(l) - t) / 2;
    out.data = Mat::Zero(l, m.data.cols());
    out.data.middleRows(pad_left, t) = m.data;
    if (m.mask) {
      std::vector<bool> mask(static_cast<std::size_t>(l), true);
      for (Eigen::Index i = 0; i < t; ++i)
        mask[static_cast<std::size_t>(pad_left + i)] = (*m.mask)[static_cast<std::size_t>(i)];
      out.mask = std::move(mask);
    }
  }
  return out;
}

SegmentedTensor segment_stack(const FeatureMatrix& m, int s) {
  if (s < 1) throw std::invalid_argument("segment_stack: s must be >= 1");
  const auto l = m.data.rows();
  if (l % s != 0) {
    throw std::invalid_argument("segment_stack: s=" + std::to_string(s) + " does not divide l=" +
                                std::to_string(l));
  }
  const auto per = l / s;
  SegmentedTensor out;
  out.segments.reserve(static_cast<std::size_t>(s));
  for (int j = 0; j < s; ++j) out.segments.push_back(m.data.middleRows(j * per, per));
  return out;
}

}  // namespace sdr
