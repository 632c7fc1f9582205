#include "sdr/nn/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sdr/manifest.hpp"

namespace sdr {

namespace {

void check_labels(const std::vector<int>& labels, Eigen::Index batch) {
  if (batch < 1) throw std::invalid_argument("loss: empty batch");
  if (static_cast<Eigen::Index>(labels.size()) != batch) {
    throw std::invalid_argument("loss: label count does not match batch size");
  }
  for (int y : labels) {
    if (y < 1 || y > kNumClasses) {
      throw std::invalid_argument("loss: label " + std::to_string(y) + " outside 1..7");
    }
  }
}

void check_logits(const Mat& logits) {
  if (logits.cols() != kNumClasses) throw std::invalid_argument("loss: logits must have 7 columns");
  if (!logits.allFinite()) throw std::invalid_argument("loss: non-finite logits");
}

// log softmax row, stable
Vec log_softmax(const Vec& logits) {
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return logits.array() - lse;
}

}  // namespace

const char* loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::ce: return "ce";
    case LossKind::ce_ls: return "ce_ls";
    case LossKind::mse: return "mse";
    case LossKind::spce: return "spce";
  }
  throw std::invalid_argument("loss: unknown kind");
}

LossKind loss_from_name(const std::string& name) {
  if (name == "ce") return LossKind::ce;
  if (name == "ce_ls") return LossKind::ce_ls;
  if (name == "mse") return LossKind::mse;
  if (name == "spce") return LossKind::spce;
  throw std::invalid_argument("loss: unknown kind '" + name + "'");
}

void LossConfig::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("loss: alpha outside [0,1)");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("loss: lambda must be finite and >= 0");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("loss: mu must be finite and > 0");
}

Vec softmax(const Vec& logits) {
  return log_softmax(logits).array().exp();
}

Mat softmax_rows(const Mat& logits) {
  Mat out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    out.row(i) = softmax(logits.row(i).transpose()).transpose();
  }
  return out;
}

int argmax_class(const Vec& scores) {
  if (!scores.allFinite()) throw std::invalid_argument("argmax_class: non-finite scores");
  int best = 0;
  for (int k = 1; k < static_cast<int>(scores.size()); ++k) {
    if (scores(k) > scores(best)) best = k;  // strict: ties keep the lower class
  }
  return best + 1;
}

Vec smooth_labels(int label, double alpha) {
  if (label < 1 || label > kNumClasses) throw std::invalid_argument("smooth_labels: label outside 1..7");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("smooth_labels: alpha outside [0,1)");
  Vec y = Vec::Constant(kNumClasses, alpha / kNumClasses);
  y(label - 1) += 1.0 - alpha;
  return y;
}

double cross_entropy(const Mat& logits, const std::vector<int>& labels, Mat* grad) {
  return label_smooth_ce(logits, labels, 0.0, grad);
}

double label_smooth_ce(const Mat& logits, const std::vector<int>& labels, double alpha, Mat* grad) {
  check_logits(logits);
  check_labels(labels, logits.rows());
  const auto n = static_cast<double>(logits.rows());
  if (grad) grad->setZero(logits.rows(), logits.cols());

  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const Vec target = smooth_labels(labels[static_cast<std::size_t>(i)], alpha);
    const Vec logp = log_softmax(logits.row(i).transpose());
    total -= target.dot(logp);
    if (grad) grad->row(i) = (logp.array().exp().matrix() - target).transpose() / n;
  }
  return total / n;
}

double spce_loss(const Mat& logits, const std::vector<int>& labels, double lambda, double mu,
                 Mat* grad) {
  check_logits(logits);
  check_labels(labels, logits.rows());
  if (!(lambda >= 0.0)) throw std::invalid_argument("spce: lambda must be >= 0");
  if (!(mu > 0.0)) throw std::invalid_argument("spce: mu must be > 0");
  const auto n = static_cast<double>(logits.rows());
  if (grad) grad->setZero(logits.rows(), logits.cols());

  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    const Vec row = logits.row(i).transpose();
    const int predicted = argmax_class(row);
    const double dist = std::abs(static_cast<double>(y - predicted));
    const double factor = 1.0 + (dist > 0.0 ? lambda * std::pow(dist, mu) : 0.0);
    const Vec logp = log_softmax(row);
    total += factor * -logp(y - 1);
    if (grad) {
      Vec g = logp.array().exp();
      g(y - 1) -= 1.0;
      grad->row(i) = (factor / n) * g.transpose();
    }
  }
  return total / n;
}

double mse_loss(const Mat& pred, const std::vector<int>& targets, Mat* grad) {
  if (pred.cols() != 1) throw std::invalid_argument("mse: predictions must be a single column");
  if (!pred.allFinite()) throw std::invalid_argument("mse: non-finite predictions");
  check_labels(targets, pred.rows());
  const auto n = static_cast<double>(pred.rows());
  if (grad) grad->setZero(pred.rows(), 1);

  double total = 0.0;
  for (Eigen::Index i = 0; i < pred.rows(); ++i) {
    const double diff = pred(i, 0) - static_cast<double>(targets[static_cast<std::size_t>(i)]);
    total += diff * diff;
    if (grad) (*grad)(i, 0) = 2.0 * diff / n;
  }
  return total / n;
}

double compute_loss(const LossConfig& config, const Mat& outputs, const std::vector<int>& labels,
                    Mat* grad) {
  config.validate();
  switch (config.kind) {
    case LossKind::ce: return cross_entropy(outputs, labels, grad);
    case LossKind::ce_ls: return label_smooth_ce(outputs, labels, config.alpha, grad);
    case LossKind::mse: return mse_loss(outputs, labels, grad);
    case LossKind::spce: return spce_loss(outputs, labels, config.lambda, config.mu, grad);
  }
  throw std::invalid_argument("loss: unknown kind");
}

}  // namespace sdr
