#include "sdr/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sdr {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

namespace {

void check_split_args(std::size_t n, double ratio) {
  if (n < 2) throw std::invalid_argument("split_corpus: need at least 2 records, got " + std::to_string(n));
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("split_corpus: ratio must lie in (0,1), got " + std::to_string(ratio));
  }
}

}  // namespace

CorpusSplit split_corpus(const std::vector<SegmentRecord>& records, double ratio, std::uint64_t seed) {
  check_split_args(records.size(), ratio);
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(records.size())));
  n_train = std::clamp<std::size_t>(n_train, 1, records.size() - 1);

  CorpusSplit split;
  split.seed = seed;
  split.train.reserve(n_train);
  split.test.reserve(records.size() - n_train);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? split.train : split.test).push_back(records[order[i]]);
  }
  return split;
}

CorpusSplit split_corpus_by_participant(const std::vector<SegmentRecord>& records, double ratio,
                                        std::uint64_t seed) {
  check_split_args(records.size(), ratio);
  std::vector<std::string> participants;
  for (const auto& r : records) {
    if (std::find(participants.begin(), participants.end(), r.participant_id) == participants.end()) {
      participants.push_back(r.participant_id);
    }
  }
  if (participants.size() < 2) {
    throw std::invalid_argument("participant-level split needs at least 2 participants");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(participants.begin(), participants.end(), rng);

  const auto target = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(records.size())));
  std::vector<std::string> train_participants;
  std::size_t train_count = 0;
  for (const auto& p : participants) {
    if (train_count >= target || train_participants.size() + 1 == participants.size()) break;
    train_participants.push_back(p);
    for (const auto& r : records) {
      if (r.participant_id == p) ++train_count;
    }
  }

  CorpusSplit split;
  split.seed = seed;
  for (const auto& r : records) {
    bool in_train = std::find(train_participants.begin(), train_participants.end(), r.participant_id) !=
                    train_participants.end();
    (in_train ? split.train : split.test).push_back(r);
  }
  if (split.train.empty() || split.test.empty()) {
    throw std::runtime_error("participant-level split produced an empty side; adjust ratio");
  }
  return split;
}

SamplerWeights sampler_weights(const std::vector<SegmentRecord>& train) {
  if (train.empty()) throw std::invalid_argument("sampler_weights: empty train set");
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& r : train) counts[static_cast<std::size_t>(r.score - 1)]++;
  SamplerWeights w;
  w.weights.reserve(train.size());
  const auto total = static_cast<double>(train.size());
  for (const auto& r : train) {
    const auto c = static_cast<double>(counts[static_cast<std::size_t>(r.score - 1)]);
    w.weights.push_back(total / (static_cast<double>(kNumClasses) * c));
  }
  return w;
}

WeightedSampler::WeightedSampler(SamplerWeights weights, std::uint64_t seed)
    : weights_(std::move(weights)),
      rng_(seed),
      dist_(weights_.weights.begin(), weights_.weights.end()) {
  if (weights_.weights.empty()) throw std::invalid_argument("WeightedSampler: no weights");
}

std::size_t WeightedSampler::draw() { return dist_(rng_); }

std::vector<std::size_t> WeightedSampler::draw_epoch() {
  std::vector<std::size_t> idx(weights_.weights.size());
  for (auto& i : idx) i = draw();
  return idx;
}

}  // namespace sdr
