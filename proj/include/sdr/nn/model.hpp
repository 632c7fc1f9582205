#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sdr/nn/params.hpp"
#include "sdr/segmentation.hpp"

namespace sdr {

// conv_stub: stride-2 temporal convolution (kernel 3) + ReLU + mean over
//   time. Randomly initialized; stands in for the image-pretrained stacks,
//   whose exact checkpoints are not recoverable.
// bypass: mean over the segment's frames followed by a learned linear lift
//   to width c; for precomputed per-frame vectors such as PCA features.
// residual_stub: conv_stub plus one residual fully connected block on the
//   pooled descriptor.
enum class EncoderKind { conv_stub, bypass, residual_stub };

enum class Framing { classification, regression };

const char* encoder_name(EncoderKind kind);
EncoderKind encoder_from_name(const std::string& name);
const char* framing_name(Framing framing);
Framing framing_from_name(const std::string& name);

struct StreamConfig {
  int l = 128;  // frames after crop/pad
  int s = 4;    // segments; must divide l
  int n = 24;   // feature dims per frame
  int c = 32;   // descriptor width
  EncoderKind encoder = EncoderKind::conv_stub;
  void validate() const;
  int frames_per_segment() const { return l / s; }
};

struct ModelConfig {
  StreamConfig audio{128, 4, 24, 32, EncoderKind::conv_stub};
  StreamConfig visual{210, 7, 24, 32, EncoderKind::conv_stub};
  Framing framing = Framing::classification;
  std::uint64_t init_seed = 0;
  void validate() const;
  int head_outputs() const { return framing == Framing::classification ? 7 : 1; }
};

// Segment-wise attention: weights = ReLU(W1 (W2 F'^T)^T) where F' is the
// s x c descriptor stack, W1 is s x s and W2 is 1 x c. No biases, no
// normalization; weights are non-negative but need not sum to anything.
Vec attention_forward(const Mat& fprime, const Mat& w1, const Mat& w2);

struct StreamEmbedding {
  Vec embedding;  // length c: (1/s) * sum_j attention_j * F'_j
  Vec attention;  // length s, entries >= 0
};

enum class StreamId { audio, visual };

// Intermediate activations kept by a forward pass so backward() can run
// without recomputation.
struct StreamCache {
  std::vector<Mat> patches;    // conv encoders: per-segment patch matrix
  std::vector<Mat> pre_relu;   // conv encoders: pre-activation maps
  std::vector<Vec> pooled;     // bypass: per-segment frame means
  std::vector<Vec> res_in;     // residual block input descriptors
  std::vector<Vec> res_pre;    // residual block pre-activations
  Mat fprime;                  // s x c
  Vec proj;                    // F' W2^T
  Vec h;                       // W1 proj
  Vec attention;               // relu(h)
  Vec embedding;               // c
};

struct ForwardCache {
  StreamCache audio;
  StreamCache visual;
  Vec fused;  // concat of the two embeddings
};

// Two-stream temporal-attention network with a late-fusion linear head.
// Classification emits 7 logits; regression one unbounded real.
class Model {
 public:
  explicit Model(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // Returns raw head output (7 logits or 1 real). Fills cache when given.
  Vec forward(const SegmentedTensor& audio, const SegmentedTensor& visual,
              ForwardCache* cache = nullptr) const;

  // Accumulates parameter gradients for d(loss)/d(output) = dout. Call
  // params().zero_grads() before the first example of a batch.
  void backward(const SegmentedTensor& audio, const SegmentedTensor& visual,
                const ForwardCache& cache, const Vec& dout);

  // Softmax over classification logits; rejects regression outputs.
  Vec probabilities(const Vec& output) const;

  // One stream's descriptor stack, attention weights, and embedding.
  StreamEmbedding stream_embedding(const SegmentedTensor& x, StreamId which) const;

 private:
  ModelConfig config_;
  ParamStore params_;
};

// Predicted class in 1..7. Classification: argmax (lower-class tie-break),
// invariant to softmax and positive logit scaling. Regression: the scalar
// rounded half away from zero, clamped to [1, 7].
int predict_class(const Vec& output, Framing framing);

// Checkpoint = SDFM section container: "config" holds the ModelConfig as
// JSON text, "param/<block>" holds each tensor, and extra entries are stored
// verbatim under their own names (e.g. the training configuration).
void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const std::map<std::string, std::string>& extra = {});
Model load_checkpoint(const std::filesystem::path& path,
                      std::map<std::string, std::string>* extra = nullptr);

}  // namespace sdr
