#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sdr/feature_matrix.hpp"
#include "sdr/manifest.hpp"

namespace sdr {

struct SvmConfig {
  double c = 1.0;          // soft-margin upper bound on the dual coefficients
  double gamma = 0.0;      // RBF width; <= 0 selects the median heuristic per fold
  double tol = 1e-3;       // KKT violation tolerance
  int max_passes = 10;     // violation-free sweeps before the solver stops
  int smooth_window = 11;  // Savitzky-Golay settings for the smoothed variant
  int smooth_order = 3;
  void validate() const;
};

// Deterministic partition of [0, n) into 3 disjoint covering folds whose
// sizes differ by at most one.
std::array<std::vector<std::size_t>, 3> three_folds(std::size_t n, std::uint64_t seed);

// Column standardization fitted on training rows only. Constant columns are
// centered but left unscaled.
struct Standardizer {
  Vec mean;
  Vec scale;
  static Standardizer fit(const Mat& rows);
  Mat apply(const Mat& rows) const;
};

// Median of pairwise squared Euclidean distances (the median heuristic for
// the RBF width). Zero when all rows coincide.
double median_sq_distance(const Mat& rows);

// Soft-margin binary SVM with an RBF kernel, trained by sequential minimal
// optimization over random working pairs.
class BinarySvm {
 public:
  // y entries must be +1 or -1; gamma must be resolved (> 0) by the caller.
  void train(const Mat& x, const std::vector<int>& y, double gamma, const SvmConfig& config,
             std::uint64_t seed);
  double decision(const Vec& x) const;

  // Dual state, exposed for the optimality checks in tests.
  const Vec& alpha() const { return alpha_; }
  const std::vector<int>& labels() const { return y_; }
  double bias() const { return b_; }

 private:
  Mat x_;
  std::vector<int> y_;
  Vec alpha_;
  double b_ = 0.0;
  double gamma_ = 1.0;
};

// One-vs-one reduction over the classes present in the training labels.
// Each vote tie resolves toward the lower class index.
class OneVsOneSvm {
 public:
  void train(const Mat& x, const std::vector<int>& labels, double gamma, const SvmConfig& config,
             std::uint64_t seed);
  int predict(const Vec& x) const;

 private:
  struct PairClassifier {
    int lo = 0;
    int hi = 0;
    BinarySvm svm;
  };
  std::vector<PairClassifier> pairs_;
  std::vector<int> classes_;
};

struct BaselineResult {
  std::string feature_family;
  bool smoothed = false;
  std::array<double, 3> fold_f1{};
  double mean_f1 = 0.0;
  double sd_f1 = 0.0;  // population sd over the 3 folds
};

// Mean-pools one feature matrix per record (optionally interpolated and
// Savitzky-Golay smoothed first), then runs 3-fold cross-validation:
// standardize on the training folds, fit one-vs-one RBF SVMs, score the held
// -out fold with macro F1. family is "audio" or a visual family name.
BaselineResult svm_baseline(const std::vector<SegmentRecord>& records,
                            const std::string& feature_family, bool smoothed, std::uint64_t seed,
                            const SvmConfig& config = {});

// report.csv plus a grouped bar chart (family groups, smoothed/unsmoothed
// series, sd whiskers). Equal results produce byte-identical files.
void write_baseline_outputs(const std::vector<BaselineResult>& results,
                            const std::filesystem::path& dir);

}  // namespace sdr
