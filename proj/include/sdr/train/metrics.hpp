#pragma once

#include <vector>

#include "sdr/feature_matrix.hpp"

namespace sdr {

struct ClassificationMetrics {
  Mat confusion;     // 7 x 7 counts, row = true class, column = predicted
  Vec per_class_f1;  // 7 entries; 0 for classes with no true or predicted examples
  double macro_f1 = 0.0;     // unweighted mean over classes present in truth or predictions
  double weighted_f1 = 0.0;  // weighted by true-class support
  double accuracy = 0.0;
  double mean_absolute_error = 0.0;  // |true - predicted| averaged, in score units
};

// Both vectors carry classes in 1..7 and must be the same nonempty length.
ClassificationMetrics evaluate_predictions(const std::vector<int>& truth,
                                           const std::vector<int>& predicted);

}  // namespace sdr
