#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "sdr/svm.hpp"
#include "sdr/synthetic.hpp"

using namespace sdr;
namespace fs = std::filesystem;

namespace {

const std::vector<SegmentRecord>& noiseless_records() {
  static std::vector<SegmentRecord> records = [] {
    SyntheticSpec spec;
    // 63 segments, 21 per fold: at the default soft-margin budget (c = 1) the
    // tight adjacent-class pairs need ~6 training points per class per fold.
    spec.per_class.fill(9);
    spec.snr = std::numeric_limits<double>::infinity();
    const auto dir = fs::temp_directory_path() / "sdr_svm_fixture";
    fs::remove_all(dir);
    return generate_synthetic_corpus(spec, 808, dir);
  }();
  return records;
}

}  // namespace

TEST_SUITE("svm") {

TEST_CASE("three folds are deterministic, disjoint, covering, balanced") {
  const auto a = three_folds(20, 9);
  const auto b = three_folds(20, 9);
  for (int k = 0; k < 3; ++k) CHECK(a[k] == b[k]);

  std::set<std::size_t> seen;
  std::size_t total = 0;
  for (const auto& fold : a) {
    total += fold.size();
    seen.insert(fold.begin(), fold.end());
    CHECK(fold.size() >= 6);  // 20/3 rounded down
    CHECK(fold.size() <= 7);
  }
  CHECK(total == 20);
  CHECK(seen.size() == 20);  // disjoint + covering
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 19);

  const auto c = three_folds(20, 10);
  CHECK(a != c);

  CHECK_THROWS_AS(three_folds(2, 1), std::invalid_argument);
}

TEST_CASE("standardizer centers and scales on the fitted rows only") {
  Mat rows(4, 3);
  rows << 1, 5, 7, 3, 5, 7, 1, 5, 9, 3, 5, 9;
  const auto s = Standardizer::fit(rows);
  CHECK(s.mean[0] == doctest::Approx(2.0));
  CHECK(s.mean[1] == doctest::Approx(5.0));
  CHECK(s.mean[2] == doctest::Approx(8.0));
  CHECK(s.scale[0] == doctest::Approx(1.0));  // population sd of {1,3,1,3}
  CHECK(s.scale[1] == doctest::Approx(1.0));  // constant column passes through unscaled
  CHECK(s.scale[2] == doctest::Approx(1.0));

  const Mat out = s.apply(rows);
  CHECK(out.col(0).mean() == doctest::Approx(0.0));
  CHECK(out.col(1).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  // applying to new rows uses the fitted statistics, not the new rows' own
  Mat other(1, 3);
  other << 10, 10, 10;
  const Mat projected = s.apply(other);
  CHECK(projected(0, 0) == doctest::Approx(8.0));
  CHECK(projected(0, 1) == doctest::Approx(5.0));

  Mat wrong(1, 2);
  wrong << 0, 0;
  CHECK_THROWS_AS(s.apply(wrong), std::invalid_argument);
}

TEST_CASE("median squared distance matches hand arithmetic") {
  Mat rows(3, 1);
  rows << 0, 1, 3;  // squared distances: 1, 9, 4 -> median 4
  CHECK(median_sq_distance(rows) == doctest::Approx(4.0));

  Mat pair(2, 2);
  pair << 0, 0, 3, 4;
  CHECK(median_sq_distance(pair) == doctest::Approx(25.0));

  Mat same(5, 2);
  same.setConstant(2.0);
  CHECK(median_sq_distance(same) == doctest::Approx(0.0));

  Mat one(1, 2);
  one.setZero();
  CHECK(median_sq_distance(one) == doctest::Approx(0.0));
}

TEST_CASE("two-point dual solution matches the closed form") {
  // Symmetric two-point problem at x = +/-1, gamma = 1. The dual reduces to
  // maximizing 2a - a^2 (1 - K12) with K12 = exp(-4), so the unconstrained
  // optimum is a* = 1/(1 - exp(-4)) ~ 1.0187 and b = 0 by symmetry.
  Mat x(2, 1);
  x << 1, -1;
  const std::vector<int> y{1, -1};
  const double k12 = std::exp(-4.0);

  SvmConfig config;
  SUBCASE("box-constrained at c = 1") {
    BinarySvm svm;
    svm.train(x, y, 1.0, config, 4);
    CHECK(svm.alpha()[0] == doctest::Approx(1.0));  // clipped at c
    CHECK(svm.alpha()[1] == doctest::Approx(1.0));
    CHECK(svm.bias() == doctest::Approx(0.0).epsilon(0.05));
    CHECK(svm.decision(x.row(0).transpose()) == doctest::Approx(1.0 - k12).epsilon(0.02));
    CHECK(svm.decision(x.row(1).transpose()) == doctest::Approx(-(1.0 - k12)).epsilon(0.02));
  }
  SUBCASE("interior optimum at c = 10") {
    config.c = 10.0;
    BinarySvm svm;
    svm.train(x, y, 1.0, config, 4);
    const double a_star = 1.0 / (1.0 - k12);
    CHECK(svm.alpha()[0] == doctest::Approx(a_star).epsilon(0.02));
    CHECK(svm.alpha()[1] == doctest::Approx(a_star).epsilon(0.02));
    // unbounded support vectors sit exactly on the margin: y f(x) = 1
    CHECK(svm.decision(x.row(0).transpose()) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(svm.decision(x.row(1).transpose()) == doctest::Approx(-1.0).epsilon(0.02));
  }
}

TEST_CASE("dual feasibility holds on random data") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> gauss;
  Mat x(30, 3);
  std::vector<int> y(30);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = gauss(rng);
    y[static_cast<std::size_t>(i)] = i % 2 == 0 ? 1 : -1;
  }
  SvmConfig config;
  BinarySvm svm;
  svm.train(x, y, 0.5, config, 33);

  double constraint = 0.0;
  for (Eigen::Index i = 0; i < svm.alpha().size(); ++i) {
    CHECK(svm.alpha()[i] >= 0.0);
    CHECK(svm.alpha()[i] <= config.c + 1e-12);
    constraint += svm.alpha()[i] * svm.labels()[static_cast<std::size_t>(i)];
  }
  // pairwise updates preserve the equality constraint exactly
  CHECK(constraint == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("rbf svm separates an xor layout a linear rule cannot") {
  Mat x(4, 2);
  x << 1, 1, -1, -1, 1, -1, -1, 1;
  const std::vector<int> y{1, 1, -1, -1};
  SvmConfig config;
  BinarySvm svm;
  svm.train(x, y, 1.0, config, 6);
  for (int i = 0; i < 4; ++i) {
    const double d = svm.decision(x.row(i).transpose());
    CHECK(d * y[static_cast<std::size_t>(i)] > 0.0);
  }
}

TEST_CASE("one-vs-one classifies three separated clusters") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 0.05);
  Mat x(30, 2);
  std::vector<int> labels(30);
  const double centers[3][2] = {{0, 0}, {3, 0}, {0, 3}};
  for (int i = 0; i < 30; ++i) {
    const int cls = i % 3;
    x(i, 0) = centers[cls][0] + gauss(rng);
    x(i, 1) = centers[cls][1] + gauss(rng);
    labels[static_cast<std::size_t>(i)] = cls + 2;  // classes 2, 3, 4
  }
  SvmConfig config;
  OneVsOneSvm model;
  model.train(x, labels, 1.0, config, 12);
  for (int i = 0; i < 30; ++i) {
    CHECK(model.predict(x.row(i).transpose()) == labels[static_cast<std::size_t>(i)]);
  }

  std::vector<int> degenerate(30, 4);
  CHECK_THROWS_AS(model.train(x, degenerate, 1.0, config, 12), std::invalid_argument);
}

TEST_CASE("baseline reaches >= 0.95 mean f1 on a zero-noise corpus") {
  const auto& records = noiseless_records();
  for (const std::string family : {"face", "audio"}) {
    const auto result = svm_baseline(records, family, false, 31);
    CHECK(result.feature_family == family);
    CHECK(!result.smoothed);
    for (double f : result.fold_f1) {
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
    CHECK(result.mean_f1 >= 0.95);
  }
}

TEST_CASE("smoothed variant stays separable on the zero-noise corpus") {
  const auto result = svm_baseline(noiseless_records(), "face", true, 31);
  CHECK(result.smoothed);
  CHECK(result.mean_f1 >= 0.95);
}

TEST_CASE("label shuffling drops the baseline to chance") {
  auto records = noiseless_records();
  std::vector<int> scores;
  scores.reserve(records.size());
  for (const auto& r : records) scores.push_back(r.score);
  std::mt19937_64 rng(99);
  std::shuffle(scores.begin(), scores.end(), rng);
  // derangement-ish shuffle: mostly mismatched labels
  for (std::size_t i = 0; i < records.size(); ++i) records[i].score = scores[i];

  const auto result = svm_baseline(records, "face", false, 31);
  CHECK(result.mean_f1 <= 0.25);  // chance is ~1/7
}

TEST_CASE("baseline is deterministic for a fixed seed") {
  const auto a = svm_baseline(noiseless_records(), "face", false, 77);
  const auto b = svm_baseline(noiseless_records(), "face", false, 77);
  for (int k = 0; k < 3; ++k) CHECK(a.fold_f1[k] == b.fold_f1[k]);  // bitwise
  CHECK(a.mean_f1 == b.mean_f1);
  CHECK(a.sd_f1 == b.sd_f1);
}

TEST_CASE("missing family and tiny corpora are rejected") {
  const auto& records = noiseless_records();
  CHECK_THROWS_AS(svm_baseline(records, "thermal", false, 1), std::invalid_argument);

  std::vector<SegmentRecord> few(records.begin(), records.begin() + 8);
  CHECK_THROWS_AS(svm_baseline(few, "face", false, 1), std::invalid_argument);
}

TEST_CASE("single-class folds are rejected") {
  auto records = noiseless_records();
  for (auto& r : records) r.score = 4;
  CHECK_THROWS_AS(svm_baseline(records, "face", false, 1), std::invalid_argument);
}

TEST_CASE("config validation rejects bad settings") {
  SvmConfig config;
  config.c = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = {};
  config.smooth_window = 8;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = {};
  config.smooth_order = 11;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = {};
  config.max_passes = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("baseline outputs are written and byte-stable") {
  std::vector<BaselineResult> results(4);
  results[0] = {"face", false, {0.5, 0.6, 0.7}, 0.6, 0.081650};
  results[1] = {"face", true, {0.55, 0.65, 0.75}, 0.65, 0.081650};
  results[2] = {"au_gaze", false, {0.3, 0.4, 0.5}, 0.4, 0.081650};
  results[3] = {"au_gaze", true, {0.35, 0.45, 0.55}, 0.45, 0.081650};

  const auto dir_a = fs::temp_directory_path() / "sdr_svm_out_a";
  const auto dir_b = fs::temp_directory_path() / "sdr_svm_out_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  write_baseline_outputs(results, dir_a);
  write_baseline_outputs(results, dir_b);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const auto csv = slurp(dir_a / "report.csv");
  CHECK(csv.rfind("feature_family,smoothed,fold1_f1,fold2_f1,fold3_f1,mean_f1,sd_f1\n", 0) == 0);
  CHECK(csv.find("face,true,0.550000,0.650000,0.750000,0.650000,0.081650") != std::string::npos);
  CHECK(csv == slurp(dir_b / "report.csv"));
  CHECK(slurp(dir_a / "f1_bars.png") == slurp(dir_b / "f1_bars.png"));
  CHECK(fs::file_size(dir_a / "f1_bars.png") > 100);

  CHECK_THROWS_AS(write_baseline_outputs({}, dir_a), std::invalid_argument);
}

}  // TEST_SUITE
