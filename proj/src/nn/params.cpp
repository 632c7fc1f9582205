#include "sdr/nn/params.hpp"

#include <cmath>
#include <stdexcept>

namespace sdr {

std::size_t ParamStore::add(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("params: block '" + name + "' has empty shape");
  if (by_name_.count(name)) throw std::invalid_argument("params: duplicate block '" + name + "'");
  Block b;
  b.name = name;
  b.offset = values_.size();
  b.rows = rows;
  b.cols = cols;
  const Eigen::Index n = values_.size() + rows * cols;
  values_.conservativeResize(n);
  grads_.conservativeResize(n);
  values_.tail(rows * cols).setZero();
  grads_.tail(rows * cols).setZero();
  by_name_[name] = blocks_.size();
  blocks_.push_back(b);
  return blocks_.size() - 1;
}

const ParamStore::Block& ParamStore::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw std::invalid_argument("params: no block '" + name + "'");
  return blocks_[it->second];
}

Eigen::Map<Mat> ParamStore::value(const std::string& name) {
  const Block& b = find(name);
  return {values_.data() + b.offset, b.rows, b.cols};
}

Eigen::Map<const Mat> ParamStore::value(const std::string& name) const {
  const Block& b = find(name);
  return {values_.data() + b.offset, b.rows, b.cols};
}

Eigen::Map<Mat> ParamStore::grad(const std::string& name) {
  const Block& b = find(name);
  return {grads_.data() + b.offset, b.rows, b.cols};
}

Eigen::Map<const Mat> ParamStore::grad(const std::string& name) const {
  const Block& b = find(name);
  return {grads_.data() + b.offset, b.rows, b.cols};
}

void Adam::step(ParamStore& store) {
  if (m_.size() != store.size()) {
    m_ = Vec::Zero(store.size());
    v_ = Vec::Zero(store.size());
    t_ = 0;
  }
  ++t_;
  const Vec& g = store.grads();
  if (!g.allFinite()) throw std::runtime_error("adam: non-finite gradient");
  m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * g;
  v_ = config_.beta2 * v_.array().matrix() + (1.0 - config_.beta2) * g.array().square().matrix();
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  store.values().array() -= config_.learning_rate * (m_.array() / bc1) /
                            ((v_.array() / bc2).sqrt() + config_.epsilon);
}

}  // namespace sdr
