#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "sdr/sdfm.hpp"
#include "sdr/synthetic.hpp"

using namespace sdr;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const char* label) {
  auto dir = fs::temp_directory_path() / (std::string("sdr_synth_") + label);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SyntheticSpec tiny_spec() {
  SyntheticSpec spec;
  spec.per_class = {2, 2, 2, 2, 2, 2, 2};
  spec.audio_seconds_min = 0.4;
  spec.audio_seconds_max = 0.6;
  spec.visual_frames_min = 40;
  spec.visual_frames_max = 60;
  return spec;
}

Vec pooled(const fs::path& path) {
  auto m = sdfm::read_matrix(path);
  return m.data.colwise().mean().transpose();
}

std::vector<std::uint8_t> file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("synthetic") {

TEST_CASE("7 classes x 10 segments yields 70 records and all feature files") {
  auto dir = fresh_dir("counting");
  SyntheticSpec spec = tiny_spec();
  spec.per_class = {10, 10, 10, 10, 10, 10, 10};
  auto records = generate_synthetic_corpus(spec, 11, dir);
  REQUIRE(records.size() == 70);

  int audio_files = 0, visual_files = 0;
  for (const auto& e : fs::directory_iterator(dir / "audio")) audio_files += e.is_regular_file();
  for (const auto& e : fs::directory_iterator(dir / "visual")) visual_files += e.is_regular_file();
  CHECK(audio_files == 70);
  CHECK(visual_files == 140);  // face + au_gaze per record

  std::array<int, kNumClasses> counts{};
  for (const auto& r : records) counts[static_cast<std::size_t>(r.score - 1)]++;
  for (int c : counts) CHECK(c == 10);
  fs::remove_all(dir);
}

TEST_CASE("zero noise gives exact per-file prototypes in every family") {
  auto dir = fresh_dir("noiseless");
  SyntheticSpec spec = tiny_spec();
  spec.snr = std::numeric_limits<double>::infinity();
  auto records = generate_synthetic_corpus(spec, 5, dir);

  for (const auto& r : records) {
    const double k = static_cast<double>(r.score);
    auto check_family = [&](const fs::path& path, int dims) {
      Vec expect = Vec::Constant(dims, k * spec.class_gap / std::sqrt(static_cast<double>(dims)));
      CHECK((pooled(path) - expect).cwiseAbs().maxCoeff() < 1e-6);  // f32 storage
    };
    check_family(r.resolved_audio, spec.n_mfcc);
    check_family(r.resolved_visual.at("face"), spec.n_face);
    check_family(r.resolved_visual.at("au_gaze"), spec.n_au_gaze);
  }
  fs::remove_all(dir);
}

TEST_CASE("zero-noise class-mean distances grow strictly with ordinal distance") {
  auto dir = fresh_dir("ordinal");
  SyntheticSpec spec = tiny_spec();
  spec.snr = std::numeric_limits<double>::infinity();
  auto records = generate_synthetic_corpus(spec, 3, dir);

  // empirical class means of pooled audio features
  std::array<Vec, kNumClasses> mean;
  std::array<int, kNumClasses> count{};
  for (auto& m : mean) m = Vec::Zero(spec.n_mfcc);
  for (const auto& r : records) {
    mean[static_cast<std::size_t>(r.score - 1)] += pooled(r.resolved_audio);
    count[static_cast<std::size_t>(r.score - 1)]++;
  }
  for (int k = 0; k < kNumClasses; ++k) mean[static_cast<std::size_t>(k)] /= count[static_cast<std::size_t>(k)];

  for (int k = 0; k < kNumClasses; ++k) {
    double prev = 0.0;
    for (int d = 1; k + d < kNumClasses; ++d) {
      const double dist = (mean[static_cast<std::size_t>(k + d)] - mean[static_cast<std::size_t>(k)]).norm();
      CHECK(dist > prev + 0.5 * spec.class_gap);  // steps are ~class_gap apart
      CHECK(dist == doctest::Approx(spec.class_gap * d).epsilon(1e-4));
      prev = dist;
    }
  }
  fs::remove_all(dir);
}

TEST_CASE("least-squares probe separates classes at the default snr preset") {
  auto dir = fresh_dir("probe");
  SyntheticSpec spec;
  spec.per_class = {10, 10, 10, 10, 10, 10, 10};
  spec.audio_seconds_min = 0.4;
  spec.audio_seconds_max = 0.6;
  spec.visual_frames_min = 40;
  spec.visual_frames_max = 60;
  auto records = generate_synthetic_corpus(spec, 21, dir);

  const int n = static_cast<int>(records.size());
  const int dims = spec.n_mfcc + spec.n_face + spec.n_au_gaze;
  Mat x(n, dims + 1);
  Mat y = Mat::Zero(n, kNumClasses);
  for (int i = 0; i < n; ++i) {
    const auto& r = records[static_cast<std::size_t>(i)];
    x.row(i).segment(0, spec.n_mfcc) = pooled(r.resolved_audio).transpose();
    x.row(i).segment(spec.n_mfcc, spec.n_face) = pooled(r.resolved_visual.at("face")).transpose();
    x.row(i).segment(spec.n_mfcc + spec.n_face, spec.n_au_gaze) =
        pooled(r.resolved_visual.at("au_gaze")).transpose();
    x(i, dims) = 1.0;
    y(i, r.score - 1) = 1.0;
  }
  Mat w = x.colPivHouseholderQr().solve(y);
  Mat scores = x * w;

  // macro F1, computed right here so the oracle does not lean on the library
  Mat confusion = Mat::Zero(kNumClasses, kNumClasses);
  for (int i = 0; i < n; ++i) {
    int pred = 0;
    scores.row(i).maxCoeff(&pred);
    confusion(records[static_cast<std::size_t>(i)].score - 1, pred) += 1.0;
  }
  double f1_sum = 0.0;
  for (int k = 0; k < kNumClasses; ++k) {
    const double tp = confusion(k, k);
    const double fp = confusion.col(k).sum() - tp;
    const double fn = confusion.row(k).sum() - tp;
    f1_sum += tp > 0.0 ? 2.0 * tp / (2.0 * tp + fp + fn) : 0.0;
  }
  CHECK(f1_sum / kNumClasses >= 0.9);
  fs::remove_all(dir);
}

TEST_CASE("generation is deterministic per seed") {
  auto dir_a = fresh_dir("det_a");
  auto dir_b = fresh_dir("det_b");
  auto dir_c = fresh_dir("det_c");
  auto spec = tiny_spec();
  spec.missing_prob = 0.1;
  auto ra = generate_synthetic_corpus(spec, 77, dir_a);
  auto rb = generate_synthetic_corpus(spec, 77, dir_b);
  auto rc = generate_synthetic_corpus(spec, 78, dir_c);

  CHECK(file_bytes(dir_a / "manifest.jsonl") == file_bytes(dir_b / "manifest.jsonl"));
  bool all_equal = true, any_differs = false;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    all_equal &= file_bytes(ra[i].resolved_audio) == file_bytes(rb[i].resolved_audio);
    all_equal &= file_bytes(ra[i].resolved_visual.at("face")) == file_bytes(rb[i].resolved_visual.at("face"));
    any_differs |= file_bytes(ra[i].resolved_audio) != file_bytes(rc[i].resolved_audio);
  }
  CHECK(all_equal);
  CHECK(any_differs);
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  fs::remove_all(dir_c);
}

TEST_CASE("dropout masks mark frames unobserved and zero them") {
  auto dir = fresh_dir("missing");
  auto spec = tiny_spec();
  spec.missing_prob = 0.3;
  auto records = generate_synthetic_corpus(spec, 9, dir);

  int missing_total = 0, frames_total = 0;
  for (const auto& r : records) {
    auto face = sdfm::read_matrix(r.resolved_visual.at("face"));
    auto au = sdfm::read_matrix(r.resolved_visual.at("au_gaze"));
    REQUIRE(face.mask.has_value());
    REQUIRE(au.mask.has_value());
    CHECK(*face.mask == *au.mask);  // same detector dropout for both families
    for (Eigen::Index i = 0; i < face.data.rows(); ++i) {
      ++frames_total;
      if (!(*face.mask)[static_cast<std::size_t>(i)]) {
        ++missing_total;
        CHECK(face.data.row(i).cwiseAbs().maxCoeff() == 0.0);
        CHECK(au.data.row(i).cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }
  const double rate = static_cast<double>(missing_total) / frames_total;
  CHECK(rate > 0.15);
  CHECK(rate < 0.45);
  fs::remove_all(dir);
}

TEST_CASE("waveform carrier files round-trip through the container") {
  auto dir = fresh_dir("wave");
  auto spec = tiny_spec();
  spec.per_class = {1, 1, 1, 1, 1, 1, 1};
  spec.write_waveforms = true;
  auto records = generate_synthetic_corpus(spec, 13, dir);
  for (const auto& r : records) {
    auto wav = sdfm::read_matrix(dir / "waveform" / (r.segment_id + ".sdfm"));
    CHECK(wav.modality == Modality::audio_waveform);
    CHECK(wav.data.cols() == 1);
    CHECK(wav.frame_rate == doctest::Approx(16000.0));
    CHECK(wav.data.rows() >= 6400);  // at least 0.4 s
  }
  fs::remove_all(dir);
}

TEST_CASE("invalid specs are rejected") {
  SyntheticSpec spec = tiny_spec();
  spec.per_class[3] = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = tiny_spec();
  spec.n_face = -1;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = tiny_spec();
  spec.snr = 0.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = tiny_spec();
  spec.visual_frames_max = spec.visual_frames_min - 1;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

}  // TEST_SUITE
