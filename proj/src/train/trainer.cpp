#include "sdr/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sdr/conditioning.hpp"
#include "sdr/mfcc.hpp"
#include "sdr/sdfm.hpp"
#include "sdr/segmentation.hpp"

namespace sdr {

namespace {

bool has_missing(const FeatureMatrix& m) {
  if (!m.mask) return false;
  return std::any_of(m.mask->begin(), m.mask->end(), [](bool b) { return !b; });
}

FeatureMatrix load_visual(const SegmentRecord& record, const DatasetOptions& options) {
  auto face = sdfm::read_matrix(record.resolved_visual.at("face"));
  if (has_missing(face)) face = interpolate_missing(face);
  if (options.feature_set == FeatureSet::face_only) return face;

  auto au = sdfm::read_matrix(record.resolved_visual.at("au_gaze"));
  if (has_missing(au)) au = interpolate_missing(au);
  if (au.data.rows() != face.data.rows()) {
    throw std::runtime_error("trainer: face and au_gaze frame counts differ for segment " +
                             record.segment_id);
  }
  FeatureMatrix fused;
  fused.data.resize(face.data.rows(), face.data.cols() + au.data.cols());
  fused.data << face.data, au.data;
  fused.modality = Modality::visual_face;
  fused.frame_rate = face.frame_rate;
  if (!options.pca) throw std::invalid_argument("trainer: pca_fused needs a fitted PCA model");
  return apply_pca(*options.pca, fused);
}

}  // namespace

const char* feature_set_name(FeatureSet fs) {
  return fs == FeatureSet::face_only ? "face_only" : "pca_fused";
}

FeatureSet feature_set_from_name(const std::string& name) {
  if (name == "face_only") return FeatureSet::face_only;
  if (name == "pca_fused") return FeatureSet::pca_fused;
  throw std::invalid_argument("trainer: unknown feature set '" + name + "'");
}

Mat gather_fusion_frames(const std::vector<SegmentRecord>& records) {
  if (records.empty()) throw std::invalid_argument("trainer: no records to gather frames from");
  std::vector<Mat> parts;
  Eigen::Index total = 0, cols = 0;
  for (const auto& record : records) {
    auto face = sdfm::read_matrix(record.resolved_visual.at("face"));
    if (has_missing(face)) face = interpolate_missing(face);
    auto au = sdfm::read_matrix(record.resolved_visual.at("au_gaze"));
    if (has_missing(au)) au = interpolate_missing(au);
    Mat fused(face.data.rows(), face.data.cols() + au.data.cols());
    fused << face.data, au.data;
    total += fused.rows();
    cols = fused.cols();
    parts.push_back(std::move(fused));
  }
  Mat out(total, cols);
  Eigen::Index row = 0;
  for (const auto& p : parts) {
    out.middleRows(row, p.rows()) = p;
    row += p.rows();
  }
  return out;
}

std::vector<PreparedExample> prepare_examples(const std::vector<SegmentRecord>& records,
                                              const DatasetOptions& options) {
  std::vector<PreparedExample> out;
  out.reserve(records.size());
  for (const auto& record : records) {
    PreparedExample ex;
    ex.segment_id = record.segment_id;
    ex.label = record.score;

    auto audio = sdfm::read_matrix(record.resolved_audio);
    if (options.audio_cmvn) audio = cmvn(audio);
    ex.audio = segment_stack(crop_or_pad(audio, options.audio_l), options.audio_s);

    auto visual = load_visual(record, options);
    ex.visual = segment_stack(crop_or_pad(visual, options.visual_l), options.visual_s);

    out.push_back(std::move(ex));
  }
  return out;
}

void TrainConfig::validate() const {
  loss.validate();
  if ((framing == Framing::regression) != (loss.kind == LossKind::mse)) {
    throw std::invalid_argument("trainer: regression framing pairs exactly with the mse loss");
  }
  if (descriptor_width < 1) throw std::invalid_argument("trainer: descriptor width must be positive");
  if (epochs < 1) throw std::invalid_argument("trainer: epochs must be positive");
  if (batch_size < 1) throw std::invalid_argument("trainer: batch size must be positive");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("trainer: learning rate must be positive");
  if (eval_every < 0) throw std::invalid_argument("trainer: eval_every must be >= 0");
}

std::vector<int> predict_all(const Model& model, const std::vector<PreparedExample>& examples) {
  std::vector<int> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    out.push_back(predict_class(model.forward(ex.audio, ex.visual), model.config().framing));
  }
  return out;
}

TrainOutcome train_one(const TrainConfig& config, const DatasetOptions& data_options,
                       const std::vector<PreparedExample>& train,
                       const std::vector<PreparedExample>& test, std::uint64_t seed) {
  config.validate();
  if (train.empty() || test.empty()) throw std::invalid_argument("trainer: empty split");

  ModelConfig mc;
  mc.audio = {data_options.audio_l, data_options.audio_s,
              static_cast<int>(train.front().audio.segments.front().cols()),
              config.descriptor_width, config.audio_encoder};
  mc.visual = {data_options.visual_l, data_options.visual_s,
               static_cast<int>(train.front().visual.segments.front().cols()),
               config.descriptor_width, config.visual_encoder};
  mc.framing = config.framing;
  mc.init_seed = mix_seed(seed, 1);

  TrainOutcome outcome{Model(mc), {}};
  Model& model = outcome.model;
  TrainRun& run = outcome.run;

  std::vector<SegmentRecord> label_records(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) label_records[i].score = train[i].label;
  const SamplerWeights weights = sampler_weights(label_records);

  AdamConfig adam_config;
  adam_config.learning_rate = config.learning_rate;
  Adam adam(adam_config);

  std::vector<int> train_truth, test_truth;
  for (const auto& ex : train) train_truth.push_back(ex.label);
  for (const auto& ex : test) test_truth.push_back(ex.label);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    WeightedSampler sampler(weights, mix_seed(seed, 1000 + static_cast<std::uint64_t>(epoch)));
    const std::vector<std::size_t> order = sampler.draw_epoch();

    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(config.batch_size));
      const auto batch_n = static_cast<Eigen::Index>(end - begin);

      model.params().zero_grads();
      std::vector<ForwardCache> caches(static_cast<std::size_t>(batch_n));
      Mat outputs(batch_n, mc.head_outputs());
      std::vector<int> labels(static_cast<std::size_t>(batch_n));
      try {
        for (Eigen::Index b = 0; b < batch_n; ++b) {
          const PreparedExample& ex = train[order[begin + static_cast<std::size_t>(b)]];
          outputs.row(b) = model.forward(ex.audio, ex.visual, &caches[static_cast<std::size_t>(b)]).transpose();
          labels[static_cast<std::size_t>(b)] = ex.label;
        }
      } catch (const std::exception& e) {
        run.aborted = true;
        run.abort_reason = std::string("forward failure at epoch ") + std::to_string(epoch) + ": " + e.what();
        return outcome;
      }
      Mat dout;
      double loss = 0.0;
      try {
        loss = compute_loss(config.loss, outputs, labels, &dout);
      } catch (const std::exception& e) {
        run.aborted = true;
        run.abort_reason = std::string("loss failure at epoch ") + std::to_string(epoch) + ": " + e.what();
        return outcome;
      }
      if (!std::isfinite(loss)) {
        run.aborted = true;
        run.abort_reason = "non-finite loss at epoch " + std::to_string(epoch);
        return outcome;
      }
      for (Eigen::Index b = 0; b < batch_n; ++b) {
        const PreparedExample& ex = train[order[begin + static_cast<std::size_t>(b)]];
        model.backward(ex.audio, ex.visual, caches[static_cast<std::size_t>(b)], dout.row(b).transpose());
      }
      try {
        adam.step(model.params());
      } catch (const std::exception& e) {
        run.aborted = true;
        run.abort_reason = std::string("optimizer failure at epoch ") + std::to_string(epoch) + ": " + e.what();
        return outcome;
      }
      epoch_loss += loss * static_cast<double>(batch_n);
    }
    run.epoch_losses.push_back(epoch_loss / static_cast<double>(order.size()));

    if (config.eval_every > 0 &&
        ((epoch + 1) % config.eval_every == 0 || epoch + 1 == config.epochs)) {
      try {
        run.eval_epochs.push_back(epoch + 1);
        run.eval_train_f1.push_back(
            evaluate_predictions(train_truth, predict_all(model, train)).macro_f1);
        run.eval_test_f1.push_back(
            evaluate_predictions(test_truth, predict_all(model, test)).macro_f1);
      } catch (const std::exception& e) {
        run.aborted = true;
        run.abort_reason =
            std::string("evaluation failure at epoch ") + std::to_string(epoch) + ": " + e.what();
        return outcome;
      }
    }
  }

  try {
    run.train_metrics = evaluate_predictions(train_truth, predict_all(model, train));
    run.test_metrics = evaluate_predictions(test_truth, predict_all(model, test));
  } catch (const std::exception& e) {
    run.aborted = true;
    run.abort_reason = std::string("evaluation failure: ") + e.what();
  }
  return outcome;
}

}  // namespace sdr
