#include "sdr/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "sdr/conditioning.hpp"
#include "sdr/corpus.hpp"
#include "sdr/report/plot.hpp"
#include "sdr/sdfm.hpp"
#include "sdr/train/metrics.hpp"

namespace sdr {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

Mat rbf_kernel(const Mat& x, double gamma) {
  const Vec sq = x.rowwise().squaredNorm();
  Mat k = -2.0 * (x * x.transpose());
  k.colwise() += sq;
  k.rowwise() += sq.transpose();
  return (-gamma * k.array()).exp();
}

double rbf(const Vec& a, const Vec& b, double gamma) {
  return std::exp(-gamma * (a - b).squaredNorm());
}

}  // namespace

void SvmConfig::validate() const {
  if (!(c > 0.0)) throw std::invalid_argument("svm: c must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("svm: tol must be positive");
  if (max_passes < 1) throw std::invalid_argument("svm: max_passes must be positive");
  if (smooth_window < 3 || smooth_window % 2 == 0) {
    throw std::invalid_argument("svm: smooth_window must be odd and >= 3");
  }
  if (smooth_order < 1 || smooth_order >= smooth_window) {
    throw std::invalid_argument("svm: smooth_order must be in [1, smooth_window)");
  }
}

std::array<std::vector<std::size_t>, 3> three_folds(std::size_t n, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("svm: need at least 3 records for 3 folds");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(mix_seed(seed, 71));
  std::shuffle(order.begin(), order.end(), rng);
  std::array<std::vector<std::size_t>, 3> folds;
  for (std::size_t i = 0; i < n; ++i) folds[i % 3].push_back(order[i]);
  return folds;
}

Standardizer Standardizer::fit(const Mat& rows) {
  if (rows.rows() < 1) throw std::invalid_argument("svm: cannot standardize zero rows");
  Standardizer s;
  s.mean = rows.colwise().mean();
  const Mat centered = rows.rowwise() - s.mean.transpose();
  s.scale = (centered.array().square().colwise().mean()).sqrt();
  for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
    if (s.scale[j] == 0.0) s.scale[j] = 1.0;
  }
  return s;
}

Mat Standardizer::apply(const Mat& rows) const {
  if (rows.cols() != mean.size()) throw std::invalid_argument("svm: standardizer width mismatch");
  Mat out = rows.rowwise() - mean.transpose();
  out.array().rowwise() /= scale.transpose().array();
  return out;
}

double median_sq_distance(const Mat& rows) {
  const Eigen::Index n = rows.rows();
  if (n < 2) return 0.0;
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d.push_back((rows.row(i) - rows.row(j)).squaredNorm());
    }
  }
  std::sort(d.begin(), d.end());
  const std::size_t m = d.size();
  return m % 2 == 1 ? d[m / 2] : 0.5 * (d[m / 2 - 1] + d[m / 2]);
}

void BinarySvm::train(const Mat& x, const std::vector<int>& y, double gamma,
                      const SvmConfig& config, std::uint64_t seed) {
  config.validate();
  if (!(gamma > 0.0)) throw std::invalid_argument("svm: gamma must be resolved to > 0");
  const auto n = static_cast<std::size_t>(x.rows());
  if (n < 2 || y.size() != n) throw std::invalid_argument("svm: bad training set");
  for (int v : y) {
    if (v != 1 && v != -1) throw std::invalid_argument("svm: binary labels must be +/-1");
  }

  x_ = x;
  y_ = y;
  gamma_ = gamma;
  alpha_ = Vec::Zero(static_cast<Eigen::Index>(n));
  b_ = 0.0;

  const Mat k = rbf_kernel(x, gamma);
  const double c = config.c;
  std::mt19937_64 rng(mix_seed(seed, 17));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  auto f = [&](std::size_t i) {
    double s = b_;
    for (std::size_t j = 0; j < n; ++j) {
      if (alpha_[static_cast<Eigen::Index>(j)] > 0.0) {
        s += alpha_[static_cast<Eigen::Index>(j)] * y_[j] *
             k(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
      }
    }
    return s;
  };

  int passes = 0;
  int sweeps = 0;
  while (passes < config.max_passes && sweeps < 1000) {
    ++sweeps;
    int changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = f(i) - y_[i];
      const double ai = alpha_[static_cast<Eigen::Index>(i)];
      if (!((y_[i] * ei < -config.tol && ai < c) || (y_[i] * ei > config.tol && ai > 0.0))) {
        continue;
      }
      std::size_t j = pick(rng);
      while (j == i) j = pick(rng);
      const double ej = f(j) - y_[j];
      const double aj = alpha_[static_cast<Eigen::Index>(j)];

      double lo, hi;
      if (y_[i] != y_[j]) {
        lo = std::max(0.0, aj - ai);
        hi = std::min(c, c + aj - ai);
      } else {
        lo = std::max(0.0, ai + aj - c);
        hi = std::min(c, ai + aj);
      }
      if (lo >= hi) continue;

      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      const double eta = 2.0 * k(ii, jj) - k(ii, ii) - k(jj, jj);
      if (eta >= 0.0) continue;

      double aj_new = aj - y_[j] * (ei - ej) / eta;
      aj_new = std::clamp(aj_new, lo, hi);
      if (std::abs(aj_new - aj) < 1e-7) continue;
      const double ai_new = ai + y_[i] * y_[j] * (aj - aj_new);

      alpha_[ii] = ai_new;
      alpha_[jj] = aj_new;

      const double b1 =
          b_ - ei - y_[i] * (ai_new - ai) * k(ii, ii) - y_[j] * (aj_new - aj) * k(ii, jj);
      const double b2 =
          b_ - ej - y_[i] * (ai_new - ai) * k(ii, jj) - y_[j] * (aj_new - aj) * k(jj, jj);
      if (ai_new > 0.0 && ai_new < c) {
        b_ = b1;
      } else if (aj_new > 0.0 && aj_new < c) {
        b_ = b2;
      } else {
        b_ = 0.5 * (b1 + b2);
      }
      ++changed;
    }
    passes = changed == 0 ? passes + 1 : 0;
  }
}

double BinarySvm::decision(const Vec& x) const {
  if (x.size() != x_.cols()) throw std::invalid_argument("svm: decision width mismatch");
  double s = b_;
  for (Eigen::Index i = 0; i < alpha_.size(); ++i) {
    if (alpha_[i] > 0.0) {
      s += alpha_[i] * y_[static_cast<std::size_t>(i)] * rbf(x_.row(i).transpose(), x, gamma_);
    }
  }
  return s;
}

void OneVsOneSvm::train(const Mat& x, const std::vector<int>& labels, double gamma,
                        const SvmConfig& config, std::uint64_t seed) {
  if (static_cast<std::size_t>(x.rows()) != labels.size() || labels.empty()) {
    throw std::invalid_argument("svm: bad multi-class training set");
  }
  const std::set<int> present(labels.begin(), labels.end());
  if (present.size() < 2) throw std::invalid_argument("svm: training set has a single class");
  classes_.assign(present.begin(), present.end());

  pairs_.clear();
  std::uint64_t pair_index = 0;
  for (std::size_t a = 0; a < classes_.size(); ++a) {
    for (std::size_t b = a + 1; b < classes_.size(); ++b) {
      PairClassifier pc;
      pc.lo = classes_[a];
      pc.hi = classes_[b];
      std::vector<Eigen::Index> rows;
      std::vector<int> y;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == pc.lo || labels[i] == pc.hi) {
          rows.push_back(static_cast<Eigen::Index>(i));
          y.push_back(labels[i] == pc.lo ? 1 : -1);
        }
      }
      Mat sub(static_cast<Eigen::Index>(rows.size()), x.cols());
      for (std::size_t r = 0; r < rows.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
      pc.svm.train(sub, y, gamma, config, mix_seed(seed, 300 + pair_index));
      pairs_.push_back(std::move(pc));
      ++pair_index;
    }
  }
}

int OneVsOneSvm::predict(const Vec& x) const {
  if (pairs_.empty()) throw std::logic_error("svm: predict before train");
  std::map<int, int> votes;
  for (const auto& pc : pairs_) {
    votes[pc.svm.decision(x) >= 0.0 ? pc.lo : pc.hi] += 1;
  }
  int best_class = classes_.front();
  int best_votes = -1;
  for (int cls : classes_) {  // ascending, so ties keep the lower class
    const auto it = votes.find(cls);
    const int v = it == votes.end() ? 0 : it->second;
    if (v > best_votes) {
      best_votes = v;
      best_class = cls;
    }
  }
  return best_class;
}

BaselineResult svm_baseline(const std::vector<SegmentRecord>& records,
                            const std::string& feature_family, bool smoothed, std::uint64_t seed,
                            const SvmConfig& config) {
  config.validate();
  if (records.size() < 9) {
    throw std::invalid_argument("svm: need at least 9 records (3 per fold)");
  }

  Mat x;
  std::vector<int> y(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::filesystem::path path;
    if (feature_family == "audio") {
      path = records[i].resolved_audio;
    } else {
      const auto it = records[i].resolved_visual.find(feature_family);
      if (it == records[i].resolved_visual.end()) {
        throw std::invalid_argument("svm: record " + records[i].segment_id +
                                    " lacks feature family '" + feature_family + "'");
      }
      path = it->second;
    }
    FeatureMatrix m = sdfm::read_matrix(path);
    const bool any_missing =
        m.mask && std::any_of(m.mask->begin(), m.mask->end(), [](bool b) { return !b; });
    if (any_missing) m = interpolate_missing(m);
    if (smoothed) m = savgol_smooth(m, config.smooth_window, config.smooth_order);
    const Vec pooled = mean_pool(m);
    if (i == 0) x.resize(static_cast<Eigen::Index>(records.size()), pooled.size());
    if (pooled.size() != x.cols()) {
      throw std::invalid_argument("svm: inconsistent feature width across records");
    }
    x.row(static_cast<Eigen::Index>(i)) = pooled.transpose();
    y[i] = records[i].score;
  }

  const auto folds = three_folds(records.size(), seed);

  BaselineResult result;
  result.feature_family = feature_family;
  result.smoothed = smoothed;

  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<std::size_t> train_idx;
    for (std::size_t other = 0; other < 3; ++other) {
      if (other != k) train_idx.insert(train_idx.end(), folds[other].begin(), folds[other].end());
    }
    const auto& test_idx = folds[k];

    Mat xtr(static_cast<Eigen::Index>(train_idx.size()), x.cols());
    std::vector<int> ytr(train_idx.size());
    for (std::size_t r = 0; r < train_idx.size(); ++r) {
      xtr.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(train_idx[r]));
      ytr[r] = y[train_idx[r]];
    }
    const std::set<int> train_classes(ytr.begin(), ytr.end());
    if (train_classes.size() < 2) {
      throw std::invalid_argument("svm: fold " + std::to_string(k) +
                                  " training split has a single class");
    }

    const Standardizer stats = Standardizer::fit(xtr);
    const Mat xtr_std = stats.apply(xtr);

    double gamma = config.gamma;
    if (!(gamma > 0.0)) {
      const double med = median_sq_distance(xtr_std);
      gamma = med > 0.0 ? 1.0 / med : 1.0;
    }

    OneVsOneSvm model;
    model.train(xtr_std, ytr, gamma, config, mix_seed(seed, 1000 + k));

    std::vector<int> truth(test_idx.size());
    std::vector<int> predicted(test_idx.size());
    for (std::size_t r = 0; r < test_idx.size(); ++r) {
      const Vec row =
          stats.apply(x.row(static_cast<Eigen::Index>(test_idx[r]))).row(0).transpose();
      predicted[r] = model.predict(row);
      truth[r] = y[test_idx[r]];
    }
    result.fold_f1[k] = evaluate_predictions(truth, predicted).macro_f1;
  }

  result.mean_f1 = (result.fold_f1[0] + result.fold_f1[1] + result.fold_f1[2]) / 3.0;
  double var = 0.0;
  for (double f : result.fold_f1) var += (f - result.mean_f1) * (f - result.mean_f1);
  result.sd_f1 = std::sqrt(var / 3.0);
  return result;
}

void write_baseline_outputs(const std::vector<BaselineResult>& results,
                            const std::filesystem::path& dir) {
  if (results.empty()) throw std::invalid_argument("svm: no baseline results to write");
  std::filesystem::create_directories(dir);

  std::ofstream csv(dir / "report.csv", std::ios::binary);
  csv << "feature_family,smoothed,fold1_f1,fold2_f1,fold3_f1,mean_f1,sd_f1\n";
  for (const auto& r : results) {
    csv << r.feature_family << ',' << (r.smoothed ? "true" : "false") << ',' << fmt(r.fold_f1[0])
        << ',' << fmt(r.fold_f1[1]) << ',' << fmt(r.fold_f1[2]) << ',' << fmt(r.mean_f1) << ','
        << fmt(r.sd_f1) << '\n';
  }
  csv.close();

  std::vector<std::string> families;
  for (const auto& r : results) {
    if (std::find(families.begin(), families.end(), r.feature_family) == families.end()) {
      families.push_back(r.feature_family);
    }
  }
  BarChart chart;
  chart.title = "SVM BASELINES";
  chart.y_label = "MACRO F1";
  chart.group_labels = families;
  chart.series.resize(2);
  chart.series[0].name = "unsmoothed";
  chart.series[1].name = "smoothed";
  for (auto& s : chart.series) {
    s.values.assign(families.size(), 0.0);
    s.errors.assign(families.size(), 0.0);
  }
  for (const auto& r : results) {
    const auto gi = static_cast<std::size_t>(
        std::find(families.begin(), families.end(), r.feature_family) - families.begin());
    auto& s = chart.series[r.smoothed ? 1 : 0];
    s.values[gi] = r.mean_f1;
    s.errors[gi] = r.sd_f1;
  }
  save_bar_chart(dir / "f1_bars.png", chart);
}

}  // namespace sdr
