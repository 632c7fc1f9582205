#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdr/corpus.hpp"
#include "sdr/nn/losses.hpp"
#include "sdr/nn/model.hpp"
#include "sdr/pca.hpp"
#include "sdr/train/metrics.hpp"

namespace sdr {

// face_only: the visual stream consumes the "face" family directly.
// pca_fused: per-frame concat of "face" and "au_gaze", projected by a PCA
// model fitted on training-split frames only.
enum class FeatureSet { face_only, pca_fused };

const char* feature_set_name(FeatureSet fs);
FeatureSet feature_set_from_name(const std::string& name);

struct DatasetOptions {
  FeatureSet feature_set = FeatureSet::face_only;
  int audio_l = 128;
  int audio_s = 4;
  int visual_l = 210;
  int visual_s = 7;
  bool audio_cmvn = false;  // per-file CMVN on the MFCC matrix
  std::optional<PcaModel> pca;  // required iff feature_set == pca_fused
};

struct PreparedExample {
  std::string segment_id;
  SegmentedTensor audio;
  SegmentedTensor visual;
  int label = 1;
};

// Stacks per-frame [face | au_gaze] rows from the given records; the input
// for fitting the fusion PCA (call with the training split only).
Mat gather_fusion_frames(const std::vector<SegmentRecord>& records);

// Loads features, fills masked visual frames by interpolation, applies the
// feature-set transform, crops/pads, and segments.
std::vector<PreparedExample> prepare_examples(const std::vector<SegmentRecord>& records,
                                              const DatasetOptions& options);

struct TrainConfig {
  LossConfig loss;
  Framing framing = Framing::classification;
  EncoderKind audio_encoder = EncoderKind::conv_stub;
  EncoderKind visual_encoder = EncoderKind::conv_stub;
  int descriptor_width = 32;  // c for both streams
  int epochs = 100;
  double learning_rate = 0.01;
  int batch_size = 35;
  // > 0: additionally record macro-F1 learning curves every eval_every epochs
  // (plus the final epoch). Observation only — the reported train_metrics /
  // test_metrics always come from the final-epoch parameters.
  int eval_every = 0;
  void validate() const;
};

struct TrainRun {
  std::vector<double> epoch_losses;  // mean per-example loss, one entry per epoch
  // learning curves, filled only when eval_every > 0; parallel vectors
  std::vector<int> eval_epochs;  // 1-based epoch numbers
  std::vector<double> eval_train_f1;
  std::vector<double> eval_test_f1;
  ClassificationMetrics train_metrics;
  ClassificationMetrics test_metrics;
  bool aborted = false;
  std::string abort_reason;
};

struct TrainOutcome {
  Model model;
  TrainRun run;
};

// One full training: weighted with-replacement sampling (epoch = |train|
// draws), Adam, loss curve, then final-parameter evaluation on both splits.
// Everything (init, sampling) derives from `seed`. A non-finite loss or
// gradient aborts the run with a diagnostic instead of throwing.
TrainOutcome train_one(const TrainConfig& config, const DatasetOptions& data_options,
                       const std::vector<PreparedExample>& train,
                       const std::vector<PreparedExample>& test, std::uint64_t seed);

// Predictions for a prepared set under a trained model, in input order.
std::vector<int> predict_all(const Model& model, const std::vector<PreparedExample>& examples);

}  // namespace sdr
