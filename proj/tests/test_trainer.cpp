#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <vector>

#include "sdr/synthetic.hpp"
#include "sdr/train/trainer.hpp"

using namespace sdr;
namespace fs = std::filesystem;

namespace {

// One noiseless corpus shared by the suite: 6 segments per class, audio and
// visual prototypes exactly recoverable, so training should drive the fit
// error toward zero.
struct Fixture {
  std::vector<SegmentRecord> records;
  std::vector<PreparedExample> examples;  // face_only, default crop/pad
};

const Fixture& fixture() {
  static Fixture f = [] {
    SyntheticSpec spec;
    spec.per_class.fill(6);
    spec.snr = std::numeric_limits<double>::infinity();
    // lengths >= the model windows, so no zero-padding dilutes the prototypes
    spec.audio_seconds_min = 1.35;
    spec.visual_frames_min = 215;
    const auto dir = fs::temp_directory_path() / "sdr_trainer_fixture";
    fs::remove_all(dir);
    Fixture out;
    out.records = generate_synthetic_corpus(spec, 515, dir);
    out.examples = prepare_examples(out.records, DatasetOptions{});
    return out;
  }();
  return f;
}

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("prepared examples have the configured geometry") {
  const auto& f = fixture();
  REQUIRE(f.examples.size() == f.records.size());
  for (std::size_t i = 0; i < f.examples.size(); ++i) {
    const auto& ex = f.examples[i];
    CHECK(ex.label == f.records[i].score);
    CHECK(ex.segment_id == f.records[i].segment_id);
    REQUIRE(ex.audio.segments.size() == 4);  // s segments of l/s frames
    CHECK(ex.audio.segments.front().rows() == 32);
    CHECK(ex.audio.segments.front().cols() == 24);
    REQUIRE(ex.visual.segments.size() == 7);
    CHECK(ex.visual.segments.front().rows() == 30);
    CHECK(ex.visual.segments.front().cols() == 24);
  }
}

TEST_CASE("pca_fused preparation projects the concatenated families") {
  const auto& f = fixture();
  DatasetOptions options;
  options.feature_set = FeatureSet::pca_fused;
  CHECK_THROWS_AS(prepare_examples(f.records, options), std::invalid_argument);

  const Mat frames = gather_fusion_frames(f.records);
  CHECK(frames.cols() == 34);  // 24 face + 10 au/gaze
  options.pca = fit_pca(frames, 0.99);
  const auto examples = prepare_examples(f.records, options);
  REQUIRE(!examples.empty());
  CHECK(examples.front().visual.segments.front().cols() == options.pca->output_dim());
  CHECK(options.pca->output_dim() <= 34);
}

TEST_CASE("audio cmvn flag changes the prepared tensors") {
  const auto& f = fixture();
  DatasetOptions with_cmvn;
  with_cmvn.audio_cmvn = true;
  const auto normed = prepare_examples(f.records, with_cmvn);
  double max_diff = 0.0;
  for (std::size_t s = 0; s < normed.front().audio.segments.size(); ++s) {
    max_diff = std::max(max_diff, (normed.front().audio.segments[s] -
                                   f.examples.front().audio.segments[s])
                                      .cwiseAbs()
                                      .maxCoeff());
  }
  CHECK(max_diff > 1e-3);
}

TEST_CASE("training overfits a noiseless corpus") {
  const auto& f = fixture();
  TrainConfig config;
  config.loss.kind = LossKind::ce;
  config.epochs = 150;
  config.learning_rate = 1e-3;
  config.batch_size = 2;
  config.eval_every = 1;
  const TrainOutcome outcome = train_one(config, DatasetOptions{}, f.examples, f.examples, 7);

  REQUIRE(!outcome.run.aborted);
  REQUIRE(outcome.run.epoch_losses.size() == 150);
  CHECK(outcome.run.epoch_losses.back() < outcome.run.epoch_losses.front());

  // learning curves: one entry per epoch, and the fit gets there at some point
  REQUIRE(outcome.run.eval_epochs.size() == 150);
  CHECK(outcome.run.eval_epochs.front() == 1);
  CHECK(outcome.run.eval_epochs.back() == 150);
  double best_train = 0.0;
  for (double v : outcome.run.eval_train_f1) best_train = std::max(best_train, v);
  CHECK(best_train >= 0.95);
  // final-epoch entries agree with the reported final metrics
  CHECK(outcome.run.eval_train_f1.back() == outcome.run.train_metrics.macro_f1);
  CHECK(outcome.run.eval_test_f1.back() == outcome.run.test_metrics.macro_f1);

  // test split is the train split here, so metrics must coincide
  CHECK(outcome.run.test_metrics.macro_f1 == outcome.run.train_metrics.macro_f1);
  CHECK(outcome.run.test_metrics.accuracy == outcome.run.train_metrics.accuracy);

  const auto predictions = predict_all(outcome.model, f.examples);
  REQUIRE(predictions.size() == f.examples.size());
  for (int p : predictions) {
    CHECK(p >= 1);
    CHECK(p <= 7);
  }
}

TEST_CASE("regression framing trains under mse") {
  const auto& f = fixture();
  TrainConfig config;
  config.loss.kind = LossKind::mse;
  config.framing = Framing::regression;
  config.epochs = 30;
  const TrainOutcome outcome = train_one(config, DatasetOptions{}, f.examples, f.examples, 3);
  REQUIRE(!outcome.run.aborted);
  CHECK(outcome.run.epoch_losses.back() < outcome.run.epoch_losses.front());
  CHECK(outcome.run.train_metrics.mean_absolute_error < 3.0);
}

TEST_CASE("same seed reproduces the loss curve exactly; another seed does not") {
  const auto& f = fixture();
  TrainConfig config;
  config.epochs = 4;
  const auto a = train_one(config, DatasetOptions{}, f.examples, f.examples, 11);
  const auto b = train_one(config, DatasetOptions{}, f.examples, f.examples, 11);
  const auto c = train_one(config, DatasetOptions{}, f.examples, f.examples, 12);

  REQUIRE(!a.run.aborted);
  REQUIRE(a.run.epoch_losses.size() == b.run.epoch_losses.size());
  for (std::size_t e = 0; e < a.run.epoch_losses.size(); ++e) {
    CHECK(a.run.epoch_losses[e] == b.run.epoch_losses[e]);  // bitwise
  }
  CHECK(predict_all(a.model, f.examples) == predict_all(b.model, f.examples));

  bool any_diff = false;
  for (std::size_t e = 0; e < a.run.epoch_losses.size(); ++e) {
    any_diff = any_diff || a.run.epoch_losses[e] != c.run.epoch_losses[e];
  }
  CHECK(any_diff);
}

TEST_CASE("a non-finite activation aborts the run instead of throwing") {
  const auto& f = fixture();
  std::vector<PreparedExample> poisoned{f.examples.front()};
  poisoned.front().audio.segments[0](0, 0) = std::numeric_limits<double>::quiet_NaN();

  TrainConfig config;
  config.epochs = 2;
  const auto outcome = train_one(config, DatasetOptions{}, poisoned, poisoned, 5);
  CHECK(outcome.run.aborted);
  CHECK(outcome.run.abort_reason.find("forward failure") != std::string::npos);
  CHECK(outcome.run.epoch_losses.empty());
}

TEST_CASE("an out-of-range label aborts with a loss diagnostic") {
  const auto& f = fixture();
  std::vector<PreparedExample> bad{f.examples.front()};
  bad.front().label = 9;

  TrainConfig config;
  config.epochs = 2;
  const auto outcome = train_one(config, DatasetOptions{}, bad, bad, 5);
  CHECK(outcome.run.aborted);
  CHECK(outcome.run.abort_reason.find("loss failure") != std::string::npos);
}

TEST_CASE("config validation rejects inconsistent framing") {
  TrainConfig config;
  config.loss.kind = LossKind::mse;
  config.framing = Framing::classification;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);

  config.loss.kind = LossKind::ce;
  config.framing = Framing::regression;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);

  config.framing = Framing::classification;
  config.epochs = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);

  config.epochs = 10;
  config.batch_size = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);

  config.batch_size = 4;
  config.eval_every = -1;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("empty splits are rejected up front") {
  const auto& f = fixture();
  TrainConfig config;
  CHECK_THROWS_AS(train_one(config, DatasetOptions{}, {}, f.examples, 1), std::invalid_argument);
  CHECK_THROWS_AS(train_one(config, DatasetOptions{}, f.examples, {}, 1), std::invalid_argument);
}

}  // TEST_SUITE
