#pragma once

#include <vector>

#include "sdr/feature_matrix.hpp"

namespace sdr {

enum class LossKind { ce, ce_ls, mse, spce };

const char* loss_name(LossKind kind);
LossKind loss_from_name(const std::string& name);

struct LossConfig {
  LossKind kind = LossKind::ce;
  double alpha = 0.1;   // label smoothing mass, ce_ls only
  double lambda = 1.0;  // ordinal penalty weight, spce only
  double mu = 1.0;      // ordinal penalty exponent, spce only
  void validate() const;
};

// Numerically stable softmax (log-sum-exp based).
Vec softmax(const Vec& logits);
Mat softmax_rows(const Mat& logits);

// Predicted class in 1..7, ties broken toward the lower class. Works on
// logits or probabilities alike since softmax preserves the argmax.
int argmax_class(const Vec& scores);

// One-hot with mass alpha spread uniformly over all 7 classes:
// true class gets (1 - alpha) + alpha/7, every other class alpha/7.
Vec smooth_labels(int label, double alpha);

// All losses return the batch mean. When grad is non-null it receives
// d(loss)/d(outputs) with the same shape as the outputs argument.
//
// Classification losses take an N x 7 logit matrix and labels in 1..7.
double cross_entropy(const Mat& logits, const std::vector<int>& labels, Mat* grad = nullptr);
double label_smooth_ce(const Mat& logits, const std::vector<int>& labels, double alpha,
                       Mat* grad = nullptr);

// Ordinal-weighted cross-entropy: each example's CE term is scaled by
// 1 + lambda * |y - y_hat|^mu where y_hat is the argmax class. The scale is
// piecewise constant in the logits and is treated as a constant when
// differentiating, so away from argmax ties the gradient is the scaled CE
// gradient.
double spce_loss(const Mat& logits, const std::vector<int>& labels, double lambda, double mu,
                 Mat* grad = nullptr);

// Regression loss over an N x 1 prediction column.
double mse_loss(const Mat& pred, const std::vector<int>& targets, Mat* grad = nullptr);

// Dispatch on config.kind; outputs is N x 7 for classification kinds and
// N x 1 for mse.
double compute_loss(const LossConfig& config, const Mat& outputs, const std::vector<int>& labels,
                    Mat* grad = nullptr);

}  // namespace sdr
