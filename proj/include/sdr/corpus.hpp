#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sdr/manifest.hpp"

namespace sdr {

struct CorpusSplit {
  std::vector<SegmentRecord> train;
  std::vector<SegmentRecord> test;
  std::uint64_t seed = 0;
};

// Shuffles then splits at segment granularity. Train size is
// floor(ratio * n), clamped so both sides stay non-empty.
CorpusSplit split_corpus(const std::vector<SegmentRecord>& records, double ratio, std::uint64_t seed);

// Splits at participant granularity: whole participants go to one side.
// Participants are added to train in shuffled order until the train
// fraction reaches `ratio`.
CorpusSplit split_corpus_by_participant(const std::vector<SegmentRecord>& records, double ratio,
                                        std::uint64_t seed);

struct SamplerWeights {
  std::vector<double> weights;  // parallel to the train records
};

// Inverse class-frequency weights: weight of record r is
// |train| / (7 * count(r.score)). Expected class frequency under
// with-replacement sampling is then uniform over the classes present.
SamplerWeights sampler_weights(const std::vector<SegmentRecord>& train);

// With-replacement weighted index sampler, epoch length = |train|.
class WeightedSampler {
 public:
  WeightedSampler(SamplerWeights weights, std::uint64_t seed);

  std::size_t draw();
  std::vector<std::size_t> draw_epoch();   // |weights| draws

 private:
  SamplerWeights weights_;
  std::mt19937_64 rng_;
  std::discrete_distribution<std::size_t> dist_;
};

// splitmix64 step; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace sdr
