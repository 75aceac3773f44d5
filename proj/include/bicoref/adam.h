#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "bicoref/parameters.h"

namespace bicoref {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamConfig config) : config_(config) {}

  // One bias-corrected update over every parameter using Parameter::grad.
  // Throws std::runtime_error (leaving parameters untouched) if any gradient is
  // not finite.
  void step(ParameterStore& store);

  std::int64_t steps() const { return step_; }
  AdamConfig& config() { return config_; }
  const Matrix& first_moment(const std::string& name) const { return m_.at(name); }
  const Matrix& second_moment(const std::string& name) const { return v_.at(name); }

 private:
  AdamConfig config_;
  std::int64_t step_ = 0;
  std::map<std::string, Matrix> m_;
  std::map<std::string, Matrix> v_;
};

}  // namespace bicoref
