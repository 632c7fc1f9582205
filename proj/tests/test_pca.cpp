#include <doctest.h>

#include <filesystem>
#include <random>

#include "sdr/pca.hpp"

using namespace sdr;

namespace {

// rows spanning an exact low-dimensional subspace of R^dim
Mat low_rank_rows(int n_rows, int dim, int rank, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Mat basis(rank, dim), coords(n_rows, rank);
  for (Eigen::Index i = 0; i < basis.rows(); ++i)
    for (Eigen::Index j = 0; j < basis.cols(); ++j) basis(i, j) = g(rng);
  for (Eigen::Index i = 0; i < coords.rows(); ++i)
    for (Eigen::Index j = 0; j < coords.cols(); ++j) coords(i, j) = g(rng);
  return coords * basis;
}

}  // namespace

TEST_SUITE("pca") {

TEST_CASE("exactly rank-3 data in 10 dims keeps k=3 at target 0.99") {
  auto rows = low_rank_rows(200, 10, 3, 42);
  auto model = fit_pca(rows, 0.99);
  CHECK(model.output_dim() == 3);
  // lossless reconstruction on exactly low-rank data
  FeatureMatrix m;
  m.data = rows;
  auto projected = apply_pca(model, m);
  auto back = reconstruct_pca(model, projected.data);
  CHECK((back - rows).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(projected.modality == Modality::visual_pca);
}

TEST_CASE("target 1.0 on full-rank data keeps every component") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  Mat rows(50, 6);
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index j = 0; j < rows.cols(); ++j) rows(i, j) = g(rng);
  auto model = fit_pca(rows, 1.0);
  CHECK(model.output_dim() == 6);
}

TEST_CASE("components are orthonormal and ratios non-increasing") {
  auto rows = low_rank_rows(120, 12, 12, 3) * 2.5;
  auto model = fit_pca(rows, 0.95);
  Mat gram = model.components * model.components.transpose();
  CHECK((gram - Mat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-6);
  for (Eigen::Index i = 0; i + 1 < model.explained_variance_ratio.size(); ++i) {
    CHECK(model.explained_variance_ratio(i) >= model.explained_variance_ratio(i + 1) - 1e-12);
  }
  CHECK(model.explained_variance_ratio.sum() >= 0.95 - 1e-9);
}

TEST_CASE("projecting the mean row gives the zero vector") {
  auto rows = low_rank_rows(60, 8, 8, 5);
  auto model = fit_pca(rows, 0.9);
  FeatureMatrix mean_row;
  mean_row.data = model.mean.transpose();
  auto projected = apply_pca(model, mean_row);
  CHECK(projected.data.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("projection never increases the centered norm") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    Mat rows(40, 9);
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
      for (Eigen::Index j = 0; j < rows.cols(); ++j) rows(i, j) = g(rng);
    auto model = fit_pca(rows, 0.8);
    FeatureMatrix m;
    m.data = rows;
    auto projected = apply_pca(model, m);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      const double centered = (rows.row(i) - model.mean.transpose()).squaredNorm();
      CHECK(projected.data.row(i).squaredNorm() <= centered + 1e-9);
    }
  }
}

TEST_CASE("save and load round-trip the model") {
  auto rows = low_rank_rows(80, 10, 4, 9);
  auto model = fit_pca(rows, 0.99);
  auto path = std::filesystem::temp_directory_path() / "sdr_test_pca.sdfm";
  model.save(path);
  auto back = PcaModel::load(path);
  CHECK((back.mean - model.mean).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.components - model.components).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.target_variance == model.target_variance);
  std::filesystem::remove(path);
}

TEST_CASE("degenerate inputs are rejected") {
  CHECK_THROWS_AS(fit_pca(Mat::Ones(1, 5), 0.9), std::invalid_argument);   // one row
  CHECK_THROWS_AS(fit_pca(Mat::Ones(20, 5), 0.9), std::invalid_argument);  // rank 0 after centering
  CHECK_THROWS_AS(fit_pca(Mat::Random(10, 5), 0.0), std::invalid_argument);
  auto model = fit_pca(low_rank_rows(20, 6, 6, 1), 0.9);
  FeatureMatrix wrong;
  wrong.data = Mat::Zero(4, 5);  // model expects 6 dims
  CHECK_THROWS_AS(apply_pca(model, wrong), std::invalid_argument);
}

}  // TEST_SUITE
