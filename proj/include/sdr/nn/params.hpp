#pragma once

#include <map>
#include <string>
#include <vector>

#include "sdr/feature_matrix.hpp"

namespace sdr {

// Flat parameter/gradient storage with named matrix views. Every trainable
// tensor lives in one contiguous vector so the optimizer and the
// finite-difference checks can treat the whole model as a single flat
// vector, while forward/backward code addresses blocks by name.
class ParamStore {
 public:
  struct Block {
    std::string name;
    Eigen::Index offset = 0;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
  };

  // Registers a block and returns its index. Names must be unique.
  std::size_t add(const std::string& name, Eigen::Index rows, Eigen::Index cols);

  Eigen::Map<Mat> value(const std::string& name);
  Eigen::Map<const Mat> value(const std::string& name) const;
  Eigen::Map<Mat> grad(const std::string& name);
  Eigen::Map<const Mat> grad(const std::string& name) const;

  Vec& values() { return values_; }
  const Vec& values() const { return values_; }
  Vec& grads() { return grads_; }
  const Vec& grads() const { return grads_; }

  const std::vector<Block>& blocks() const { return blocks_; }
  Eigen::Index size() const { return values_.size(); }
  bool has(const std::string& name) const { return by_name_.count(name) != 0; }

  void zero_grads() { grads_.setZero(); }

 private:
  const Block& find(const std::string& name) const;

  Vec values_;
  Vec grads_;
  std::vector<Block> blocks_;
  std::map<std::string, std::size_t> by_name_;
};

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Standard Adam with bias correction; no weight decay, no schedule.
class Adam {
 public:
  explicit Adam(const AdamConfig& config) : config_(config) {}

  // Applies one update from store.grads() to store.values().
  void step(ParamStore& store);

  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  Vec m_, v_;
  long long t_ = 0;
};

}  // namespace sdr
