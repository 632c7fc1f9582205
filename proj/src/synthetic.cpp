#include "sdr/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "sdr/corpus.hpp"
#include "sdr/mfcc.hpp"
#include "sdr/sdfm.hpp"

namespace sdr {

namespace {

constexpr double kSampleRate = 16000.0;

double noise_sigma(const SyntheticSpec& spec, int dims) {
  if (std::isinf(spec.snr)) return 0.0;
  return 2.0 * spec.class_gap / std::sqrt(static_cast<double>(dims) * spec.snr);
}

// class prototype: score * gap along the unit all-ones direction
Vec prototype(int score, int dims, double gap) {
  return Vec::Constant(dims, static_cast<double>(score) * gap / std::sqrt(static_cast<double>(dims)));
}

// Amplitude-modulated three-tone mixture; the slow modulation keeps the
// short-time spectrum moving so CMVN does not flatten the MFCC texture.
std::vector<double> synth_waveform(double seconds, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> freq(150.0, 3500.0);
  std::uniform_real_distribution<double> mod(0.8, 3.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> jitter(0.7, 1.3);
  const double base_amp[3] = {0.6, 0.3, 0.1};
  double f[3], g[3], ph[3], psi[3], a[3];
  for (int i = 0; i < 3; ++i) {
    f[i] = freq(rng);
    g[i] = mod(rng);
    ph[i] = phase(rng);
    psi[i] = phase(rng);
    a[i] = base_amp[i] * jitter(rng);
  }
  const auto n = static_cast<std::size_t>(std::llround(seconds * kSampleRate));
  std::vector<double> wav(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    double v = 0.0;
    for (int c = 0; c < 3; ++c) {
      v += a[c] * (1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * g[c] * t + psi[c])) *
           std::sin(2.0 * std::numbers::pi * f[c] * t + ph[c]);
    }
    wav[i] = v;
  }
  return wav;
}

// Smooth per-column sinusoids, explicitly zero-meaned per column.
Mat visual_texture(int t, int dims, double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> cycles(0.5, 3.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  Mat out(t, dims);
  const double amp = scale * std::numbers::sqrt2;  // sinusoid sd = amp / sqrt(2)
  for (int j = 0; j < dims; ++j) {
    const double f1 = cycles(rng), f2 = cycles(rng);
    const double p1 = phase(rng), p2 = phase(rng);
    for (int i = 0; i < t; ++i) {
      const double x = static_cast<double>(i) / static_cast<double>(t);
      out(i, j) = amp * (0.8 * std::sin(2.0 * std::numbers::pi * f1 * x + p1) +
                         0.2 * std::sin(2.0 * std::numbers::pi * f2 * x + p2));
    }
  }
  out.rowwise() -= out.colwise().mean();
  return out;
}

void add_noise(Mat& m, double sigma, std::mt19937_64& rng) {
  if (sigma == 0.0) return;
  std::normal_distribution<double> g(0.0, sigma);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) += g(rng);
}

}  // namespace

void SyntheticSpec::validate() const {
  for (int c : per_class) {
    if (c <= 0) throw std::invalid_argument("synthetic spec: per-class count must be positive");
  }
  if (n_mfcc <= 0 || n_face <= 0 || n_au_gaze <= 0) {
    throw std::invalid_argument("synthetic spec: feature dims must be positive");
  }
  if (audio_seconds_min < 0.05 || audio_seconds_max < audio_seconds_min) {
    throw std::invalid_argument("synthetic spec: bad audio duration range");
  }
  if (visual_frames_min < 2 || visual_frames_max < visual_frames_min) {
    throw std::invalid_argument("synthetic spec: bad visual frame range");
  }
  if (!(snr > 0.0)) throw std::invalid_argument("synthetic spec: snr must be positive");
  if (class_gap <= 0.0) throw std::invalid_argument("synthetic spec: class gap must be positive");
  if (texture_scale < 0.0) throw std::invalid_argument("synthetic spec: negative texture scale");
  if (missing_prob < 0.0 || missing_prob > 0.9) {
    throw std::invalid_argument("synthetic spec: missing probability outside [0, 0.9]");
  }
  if (n_participants <= 0) throw std::invalid_argument("synthetic spec: need participants");
}

int SyntheticSpec::total() const {
  int n = 0;
  for (int c : per_class) n += c;
  return n;
}

std::vector<SegmentRecord> generate_synthetic_corpus(const SyntheticSpec& spec,
                                                     std::uint64_t seed,
                                                     const std::filesystem::path& out_dir) {
  spec.validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "audio");
  fs::create_directories(out_dir / "visual");
  if (spec.write_waveforms) fs::create_directories(out_dir / "waveform");

  MfccConfig mfcc_cfg;
  mfcc_cfg.n_mels = spec.n_mfcc;
  mfcc_cfg.n_coeffs = spec.n_mfcc;

  std::vector<SegmentRecord> records;
  records.reserve(static_cast<std::size_t>(spec.total()));

  int index = 0;
  for (int score = 1; score <= kNumClasses; ++score) {
    for (int rep = 0; rep < spec.per_class[static_cast<std::size_t>(score - 1)]; ++rep, ++index) {
      std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(index)));

      char id[32];
      std::snprintf(id, sizeof(id), "seg%04d_k%d", index, score);

      // audio: CMVN-normalized MFCC texture around the class prototype
      std::uniform_real_distribution<double> dur(spec.audio_seconds_min, spec.audio_seconds_max);
      auto wav = synth_waveform(dur(rng), rng);
      auto audio = cmvn(compute_mfcc(wav, mfcc_cfg));
      audio.data *= spec.texture_scale;
      audio.data.rowwise() += prototype(score, spec.n_mfcc, spec.class_gap).transpose();
      add_noise(audio.data, noise_sigma(spec, spec.n_mfcc), rng);

      // visual: one frame count and one dropout mask shared by both families
      std::uniform_int_distribution<int> frames(spec.visual_frames_min, spec.visual_frames_max);
      const int t_v = frames(rng);

      FeatureMatrix face;
      face.data = visual_texture(t_v, spec.n_face, spec.texture_scale, rng);
      face.data.rowwise() += prototype(score, spec.n_face, spec.class_gap).transpose();
      add_noise(face.data, noise_sigma(spec, spec.n_face), rng);
      face.modality = Modality::visual_face;
      face.frame_rate = 30.0;

      FeatureMatrix au;
      au.data = visual_texture(t_v, spec.n_au_gaze, spec.texture_scale, rng);
      au.data.rowwise() += prototype(score, spec.n_au_gaze, spec.class_gap).transpose();
      add_noise(au.data, noise_sigma(spec, spec.n_au_gaze), rng);
      au.modality = Modality::visual_au_gaze;
      au.frame_rate = 30.0;

      if (spec.missing_prob > 0.0) {
        std::bernoulli_distribution miss(spec.missing_prob);
        std::vector<bool> mask(static_cast<std::size_t>(t_v));
        int observed = 0;
        for (int i = 0; i < t_v; ++i) {
          mask[static_cast<std::size_t>(i)] = !miss(rng);
          observed += mask[static_cast<std::size_t>(i)] ? 1 : 0;
        }
        for (int i = 0; i < t_v && observed < 4; ++i) {  // keep interpolation well-posed
          if (!mask[static_cast<std::size_t>(i)]) {
            mask[static_cast<std::size_t>(i)] = true;
            ++observed;
          }
        }
        for (int i = 0; i < t_v; ++i) {
          if (!mask[static_cast<std::size_t>(i)]) {
            face.data.row(i).setZero();
            au.data.row(i).setZero();
          }
        }
        face.mask = mask;
        au.mask = mask;
      }

      SegmentRecord rec;
      rec.segment_id = id;
      rec.participant_id = "p" + std::to_string(index % spec.n_participants + 1);
      rec.session_index = (index / spec.n_participants) % 10 + 1;
      rec.score = score;
      rec.audio_feature_path = std::string("audio/") + id + ".sdfm";
      rec.visual_feature_paths["face"] = std::string("visual/") + id + "_face.sdfm";
      rec.visual_feature_paths["au_gaze"] = std::string("visual/") + id + "_au_gaze.sdfm";

      sdfm::write_matrix(out_dir / rec.audio_feature_path, audio);
      sdfm::write_matrix(out_dir / rec.visual_feature_paths["face"], face);
      sdfm::write_matrix(out_dir / rec.visual_feature_paths["au_gaze"], au);

      if (spec.write_waveforms) {
        FeatureMatrix carrier;
        carrier.data = Eigen::Map<const Vec>(wav.data(), static_cast<Eigen::Index>(wav.size()));
        carrier.modality = Modality::audio_waveform;
        carrier.frame_rate = kSampleRate;
        const auto path = std::string("waveform/") + id + ".sdfm";
        sdfm::write_matrix(out_dir / path, carrier);
      }

      records.push_back(std::move(rec));
    }
  }

  save_manifest(out_dir / "manifest.jsonl", records);
  return load_manifest(out_dir / "manifest.jsonl");  // round-trip validates what we wrote
}

}  // namespace sdr
