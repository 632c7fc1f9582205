#include "sdr/train/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "sdr/manifest.hpp"

namespace sdr {

ClassificationMetrics evaluate_predictions(const std::vector<int>& truth,
                                           const std::vector<int>& predicted) {
  if (truth.empty()) throw std::invalid_argument("metrics: empty evaluation set");
  if (truth.size() != predicted.size()) {
    throw std::invalid_argument("metrics: truth/prediction length mismatch");
  }

  ClassificationMetrics out;
  out.confusion = Mat::Zero(kNumClasses, kNumClasses);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i], p = predicted[i];
    if (t < 1 || t > kNumClasses || p < 1 || p > kNumClasses) {
      throw std::invalid_argument("metrics: class outside 1..7");
    }
    out.confusion(t - 1, p - 1) += 1.0;
    out.mean_absolute_error += std::abs(t - p);
  }
  const auto n = static_cast<double>(truth.size());
  out.mean_absolute_error /= n;
  out.accuracy = out.confusion.diagonal().sum() / n;

  out.per_class_f1 = Vec::Zero(kNumClasses);
  double macro_sum = 0.0;
  int macro_classes = 0;
  double weighted_sum = 0.0;
  for (int k = 0; k < kNumClasses; ++k) {
    const double tp = out.confusion(k, k);
    const double support = out.confusion.row(k).sum();
    const double predicted_count = out.confusion.col(k).sum();
    if (support == 0.0 && predicted_count == 0.0) continue;  // class absent everywhere
    const double fp = predicted_count - tp;
    const double fn = support - tp;
    const double f1 = tp > 0.0 ? 2.0 * tp / (2.0 * tp + fp + fn) : 0.0;
    out.per_class_f1(k) = f1;
    macro_sum += f1;
    ++macro_classes;
    weighted_sum += f1 * support;
  }
  out.macro_f1 = macro_classes > 0 ? macro_sum / macro_classes : 0.0;
  out.weighted_f1 = weighted_sum / n;
  return out;
}

}  // namespace sdr
