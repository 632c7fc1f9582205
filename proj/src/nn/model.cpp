#include "sdr/nn/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "sdr/nn/losses.hpp"
#include "sdr/sdfm.hpp"

namespace sdr {

namespace {

constexpr int kKernel = 3;
constexpr int kStride = 2;

std::string prefix(StreamId which) { return which == StreamId::audio ? "audio." : "visual."; }

int conv_positions(int frames) { return (frames - kKernel) / kStride + 1; }

// patch matrix: row t' lists the kernel window at stride-2 position t',
// laid out offset-major (columns dt*n + j)
Mat make_patches(const Mat& segment) {
  const auto m = static_cast<int>(segment.rows());
  const auto n = static_cast<int>(segment.cols());
  const int t_out = conv_positions(m);
  Mat p(t_out, kKernel * n);
  for (int t = 0; t < t_out; ++t) {
    for (int dt = 0; dt < kKernel; ++dt) {
      p.row(t).segment(dt * n, n) = segment.row(t * kStride + dt);
    }
  }
  return p;
}

void check_stream(const SegmentedTensor& x, const StreamConfig& cfg, const char* label) {
  if (static_cast<int>(x.segments.size()) != cfg.s) {
    throw std::invalid_argument(std::string("model: ") + label + " stream expects " +
                                std::to_string(cfg.s) + " segments");
  }
  for (const auto& seg : x.segments) {
    if (seg.rows() != cfg.frames_per_segment() || seg.cols() != cfg.n) {
      throw std::invalid_argument(std::string("model: ") + label + " segment shape mismatch");
    }
  }
}

}  // namespace

const char* encoder_name(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::conv_stub: return "conv_stub";
    case EncoderKind::bypass: return "bypass";
    case EncoderKind::residual_stub: return "residual_stub";
  }
  throw std::invalid_argument("model: unknown encoder kind");
}

EncoderKind encoder_from_name(const std::string& name) {
  if (name == "conv_stub") return EncoderKind::conv_stub;
  if (name == "bypass") return EncoderKind::bypass;
  if (name == "residual_stub") return EncoderKind::residual_stub;
  throw std::invalid_argument("model: unknown encoder '" + name + "'");
}

const char* framing_name(Framing framing) {
  return framing == Framing::classification ? "classification" : "regression";
}

Framing framing_from_name(const std::string& name) {
  if (name == "classification") return Framing::classification;
  if (name == "regression") return Framing::regression;
  throw std::invalid_argument("model: unknown framing '" + name + "'");
}

void StreamConfig::validate() const {
  if (l < 1 || s < 1 || n < 1 || c < 1) throw std::invalid_argument("model: stream dims must be positive");
  if (l % s != 0) throw std::invalid_argument("model: segment count must divide sequence length");
  if (encoder != EncoderKind::bypass && frames_per_segment() < kKernel) {
    throw std::invalid_argument("model: conv encoders need at least 3 frames per segment");
  }
}

void ModelConfig::validate() const {
  audio.validate();
  visual.validate();
}

Vec attention_forward(const Mat& fprime, const Mat& w1, const Mat& w2) {
  if (w1.rows() != fprime.rows() || w1.cols() != fprime.rows()) {
    throw std::invalid_argument("attention: W1 must be s x s");
  }
  if (w2.rows() != 1 || w2.cols() != fprime.cols()) {
    throw std::invalid_argument("attention: W2 must be 1 x c");
  }
  const Vec proj = fprime * w2.transpose();  // (W2 F'^T)^T
  return (w1 * proj).cwiseMax(0.0);
}

Model::Model(const ModelConfig& config) : config_(config) {
  config_.validate();

  auto add_stream = [&](const StreamConfig& sc, StreamId which) {
    const std::string p = prefix(which);
    switch (sc.encoder) {
      case EncoderKind::conv_stub:
        params_.add(p + "enc.kernel", sc.c, kKernel * sc.n);
        params_.add(p + "enc.bias", sc.c, 1);
        break;
      case EncoderKind::bypass:
        params_.add(p + "enc.lift", sc.c, sc.n);
        params_.add(p + "enc.bias", sc.c, 1);
        break;
      case EncoderKind::residual_stub:
        params_.add(p + "enc.kernel", sc.c, kKernel * sc.n);
        params_.add(p + "enc.bias", sc.c, 1);
        params_.add(p + "enc.res_w", sc.c, sc.c);
        params_.add(p + "enc.res_b", sc.c, 1);
        break;
    }
    params_.add(p + "att.w1", sc.s, sc.s);
    params_.add(p + "att.w2", 1, sc.c);
  };
  add_stream(config_.audio, StreamId::audio);
  add_stream(config_.visual, StreamId::visual);
  params_.add("head.w", config_.head_outputs(), config_.audio.c + config_.visual.c);
  params_.add("head.b", config_.head_outputs(), 1);

  // deterministic init: one stream of draws over blocks in registration order
  std::mt19937_64 rng(config_.init_seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  auto fill = [&](Eigen::Map<Mat> m, double sd) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = sd * unit(rng);
  };
  for (const auto& block : params_.blocks()) {
    auto m = params_.value(block.name);
    if (block.name.ends_with(".bias") || block.name.ends_with(".res_b") || block.name == "head.b") {
      m.setZero();
    } else if (block.name.ends_with("att.w1")) {
      // near-identity start keeps early attention close to uniform weights
      fill(m, 0.05);
      m.diagonal().array() += 1.0;
    } else if (block.name.ends_with("att.w2")) {
      // Nonnegative start. Descriptors are ReLU means, so every segment's
      // score proj_j = w2 . F'_j shares the sign of w2 against the mean
      // descriptor; a negative draw would zero the whole attention vector
      // and cut all upstream gradients for good.
      fill(m, 1.0 / std::sqrt(static_cast<double>(m.cols())));
      m = m.cwiseAbs();
    } else if (block.name.ends_with("enc.kernel")) {
      fill(m, std::sqrt(2.0 / static_cast<double>(m.cols())));
    } else if (block.name.ends_with("enc.lift")) {
      fill(m, 1.0 / std::sqrt(static_cast<double>(m.cols())));
    } else if (block.name.ends_with("enc.res_w")) {
      fill(m, std::sqrt(2.0 / static_cast<double>(m.cols())));
    } else {  // head.w
      fill(m, std::sqrt(2.0 / static_cast<double>(m.rows() + m.cols())));
    }
  }
}

namespace {

// encoder forward for one stream; fills the cache stream slots
void encode_stream(const ParamStore& params, const StreamConfig& cfg, StreamId which,
                   const SegmentedTensor& x, StreamCache& cache) {
  const std::string p = prefix(which);
  cache.fprime.resize(cfg.s, cfg.c);
  cache.patches.clear();
  cache.pre_relu.clear();
  cache.pooled.clear();
  cache.res_in.clear();
  cache.res_pre.clear();

  for (int j = 0; j < cfg.s; ++j) {
    const Mat& seg = x.segments[static_cast<std::size_t>(j)];
    Vec d;
    if (cfg.encoder == EncoderKind::bypass) {
      Vec pooled = seg.colwise().mean().transpose();
      d = params.value(p + "enc.lift") * pooled + params.value(p + "enc.bias").col(0);
      cache.pooled.push_back(std::move(pooled));
    } else {
      Mat patches = make_patches(seg);
      Mat z = patches * params.value(p + "enc.kernel").transpose();
      z.rowwise() += params.value(p + "enc.bias").col(0).transpose();
      d = z.cwiseMax(0.0).colwise().mean().transpose();
      cache.patches.push_back(std::move(patches));
      cache.pre_relu.push_back(std::move(z));
      if (cfg.encoder == EncoderKind::residual_stub) {
        Vec pre = params.value(p + "enc.res_w") * d + params.value(p + "enc.res_b").col(0);
        cache.res_in.push_back(d);
        cache.res_pre.push_back(pre);
        d += pre.cwiseMax(0.0);
      }
    }
    cache.fprime.row(j) = d.transpose();
  }

  cache.proj = cache.fprime * params.value(p + "att.w2").transpose();
  cache.h = params.value(p + "att.w1") * cache.proj;
  cache.attention = cache.h.cwiseMax(0.0);
  cache.embedding = cache.fprime.transpose() * cache.attention / static_cast<double>(cfg.s);
}

// mirror of encode_stream; d_embed is d(loss)/d(embedding)
void backprop_stream(ParamStore& params, const StreamConfig& cfg, StreamId which,
                     const StreamCache& cache, const Vec& d_embed) {
  const std::string p = prefix(which);
  const double inv_s = 1.0 / static_cast<double>(cfg.s);

  Mat d_fprime = inv_s * cache.attention * d_embed.transpose();
  const Vec d_att = inv_s * cache.fprime * d_embed;
  const Vec relu_mask = (cache.h.array() > 0.0).cast<double>();
  const Vec d_h = d_att.cwiseProduct(relu_mask);
  params.grad(p + "att.w1") += d_h * cache.proj.transpose();
  const Vec d_proj = params.value(p + "att.w1").transpose() * d_h;
  params.grad(p + "att.w2") += d_proj.transpose() * cache.fprime;
  d_fprime += d_proj * params.value(p + "att.w2");

  for (int j = 0; j < cfg.s; ++j) {
    Vec d_desc = d_fprime.row(j).transpose();
    if (cfg.encoder == EncoderKind::bypass) {
      params.grad(p + "enc.lift") += d_desc * cache.pooled[static_cast<std::size_t>(j)].transpose();
      params.grad(p + "enc.bias").col(0) += d_desc;
      continue;
    }
    if (cfg.encoder == EncoderKind::residual_stub) {
      const Vec& pre = cache.res_pre[static_cast<std::size_t>(j)];
      const Vec q = d_desc.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
      params.grad(p + "enc.res_w") += q * cache.res_in[static_cast<std::size_t>(j)].transpose();
      params.grad(p + "enc.res_b").col(0) += q;
      d_desc += params.value(p + "enc.res_w").transpose() * q;
    }
    const Mat& z = cache.pre_relu[static_cast<std::size_t>(j)];
    const double inv_t = 1.0 / static_cast<double>(z.rows());
    // column f of the pre-activation grad is inv_t * d_desc(f) on positive entries
    Mat d_z = (z.array() > 0.0).cast<double>().matrix() * (inv_t * d_desc).asDiagonal();
    params.grad(p + "enc.kernel") += d_z.transpose() * cache.patches[static_cast<std::size_t>(j)];
    params.grad(p + "enc.bias").col(0) += d_z.colwise().sum().transpose();
  }
}

}  // namespace

Vec Model::forward(const SegmentedTensor& audio, const SegmentedTensor& visual,
                   ForwardCache* cache) const {
  check_stream(audio, config_.audio, "audio");
  check_stream(visual, config_.visual, "visual");
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;

  encode_stream(params_, config_.audio, StreamId::audio, audio, c.audio);
  encode_stream(params_, config_.visual, StreamId::visual, visual, c.visual);

  c.fused.resize(config_.audio.c + config_.visual.c);
  c.fused.head(config_.audio.c) = c.audio.embedding;
  c.fused.tail(config_.visual.c) = c.visual.embedding;

  Vec out = params_.value("head.w") * c.fused + params_.value("head.b").col(0);
  if (!out.allFinite()) throw std::runtime_error("model: non-finite activations");
  return out;
}

void Model::backward(const SegmentedTensor& audio, const SegmentedTensor& visual,
                     const ForwardCache& cache, const Vec& dout) {
  if (dout.size() != config_.head_outputs()) throw std::invalid_argument("model: bad dout length");
  params_.grad("head.w") += dout * cache.fused.transpose();
  params_.grad("head.b").col(0) += dout;
  const Vec d_fused = params_.value("head.w").transpose() * dout;

  backprop_stream(params_, config_.audio, StreamId::audio, cache.audio,
                  d_fused.head(config_.audio.c));
  backprop_stream(params_, config_.visual, StreamId::visual, cache.visual,
                  d_fused.tail(config_.visual.c));
  (void)audio;
  (void)visual;
}

Vec Model::probabilities(const Vec& output) const {
  if (config_.framing != Framing::classification) {
    throw std::invalid_argument("model: probabilities need the classification framing");
  }
  if (output.size() != 7) throw std::invalid_argument("model: expected 7 logits");
  return softmax(output);
}

StreamEmbedding Model::stream_embedding(const SegmentedTensor& x, StreamId which) const {
  check_stream(x, which == StreamId::audio ? config_.audio : config_.visual,
               which == StreamId::audio ? "audio" : "visual");
  StreamCache cache;
  encode_stream(params_, which == StreamId::audio ? config_.audio : config_.visual, which, x, cache);
  return {cache.embedding, cache.attention};
}

int predict_class(const Vec& output, Framing framing) {
  if (!output.allFinite()) throw std::invalid_argument("predict_class: non-finite output");
  if (framing == Framing::classification) {
    if (output.size() != 7) throw std::invalid_argument("predict_class: expected 7 scores");
    return argmax_class(output);
  }
  if (output.size() != 1) throw std::invalid_argument("predict_class: expected a scalar");
  const double rounded = std::round(output(0));  // half away from zero
  return static_cast<int>(std::min(7.0, std::max(1.0, rounded)));
}

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const std::map<std::string, std::string>& extra) {
  const ModelConfig& cfg = model.config();
  nlohmann::json j;
  auto stream_json = [](const StreamConfig& sc) {
    return nlohmann::json{{"l", sc.l}, {"s", sc.s}, {"n", sc.n}, {"c", sc.c},
                          {"encoder", encoder_name(sc.encoder)}};
  };
  j["audio"] = stream_json(cfg.audio);
  j["visual"] = stream_json(cfg.visual);
  j["framing"] = framing_name(cfg.framing);
  j["init_seed"] = cfg.init_seed;

  sdfm::SectionMap sections;
  const std::string text = j.dump();
  sections["config"].is_raw = true;
  sections["config"].bytes.assign(text.begin(), text.end());
  for (const auto& block : model.params().blocks()) {
    sections["param/" + block.name].matrix = model.params().value(block.name);
  }
  for (const auto& [name, value] : extra) {
    if (sections.count(name)) throw std::invalid_argument("checkpoint: reserved section '" + name + "'");
    sections[name].is_raw = true;
    sections[name].bytes.assign(value.begin(), value.end());
  }
  sdfm::write_sections(path, sections);
}

Model load_checkpoint(const std::filesystem::path& path,
                      std::map<std::string, std::string>* extra) {
  auto sections = sdfm::read_sections(path);
  auto cfg_it = sections.find("config");
  if (cfg_it == sections.end() || !cfg_it->second.is_raw) {
    throw std::runtime_error("checkpoint: missing config section");
  }
  nlohmann::json j = nlohmann::json::parse(
      std::string(cfg_it->second.bytes.begin(), cfg_it->second.bytes.end()));

  auto stream_cfg = [&](const nlohmann::json& sj) {
    StreamConfig sc;
    sc.l = sj.at("l").get<int>();
    sc.s = sj.at("s").get<int>();
    sc.n = sj.at("n").get<int>();
    sc.c = sj.at("c").get<int>();
    sc.encoder = encoder_from_name(sj.at("encoder").get<std::string>());
    return sc;
  };
  ModelConfig cfg;
  cfg.audio = stream_cfg(j.at("audio"));
  cfg.visual = stream_cfg(j.at("visual"));
  cfg.framing = framing_from_name(j.at("framing").get<std::string>());
  cfg.init_seed = j.at("init_seed").get<std::uint64_t>();

  Model model(cfg);
  for (const auto& block : model.params().blocks()) {
    auto it = sections.find("param/" + block.name);
    if (it == sections.end() || it->second.is_raw) {
      throw std::runtime_error("checkpoint: missing tensor for block " + block.name);
    }
    if (it->second.matrix.rows() != block.rows || it->second.matrix.cols() != block.cols) {
      throw std::runtime_error("checkpoint: shape mismatch for block " + block.name);
    }
    model.params().value(block.name) = it->second.matrix;
  }
  if (extra) {
    extra->clear();
    for (const auto& [name, section] : sections) {
      if (name != "config" && section.is_raw) {
        (*extra)[name] = std::string(section.bytes.begin(), section.bytes.end());
      }
    }
  }
  return model;
}

}  // namespace sdr
