#pragma once

#include <random>
#include <string>
#include <vector>

#include "bicoref/autodiff.h"
#include "bicoref/parameters.h"

namespace bicoref {

// Stack of ReLU hidden layers, each followed by dropout. The output is the
// last hidden layer; callers add their own projection.
class Ffnn {
 public:
  Ffnn(ParameterStore& store, const std::string& prefix, std::size_t input_dim, std::size_t hidden,
       std::size_t layers, std::mt19937_64& rng);

  Tensor operator()(ComputationGraph& cg, Tensor x, double dropout_rate, bool training) const;
  std::size_t output_dim() const { return output_dim_; }

 private:
  std::vector<Parameter*> weights_;
  std::vector<Parameter*> biases_;
  std::size_t output_dim_;
};

}  // namespace bicoref
