#include "bicoref/layers.h"

namespace bicoref {

Ffnn::Ffnn(ParameterStore& store, const std::string& prefix, std::size_t input_dim, std::size_t hidden,
           std::size_t layers, std::mt19937_64& rng)
    : output_dim_(layers == 0 ? input_dim : hidden) {
  std::size_t in = input_dim;
  for (std::size_t l = 0; l < layers; ++l) {
    weights_.push_back(&store.add(prefix + "/W" + std::to_string(l), in, hidden, rng));
    biases_.push_back(&store.add(prefix + "/b" + std::to_string(l), 1, hidden, rng, /*zero=*/true));
    in = hidden;
  }
}

Tensor Ffnn::operator()(ComputationGraph& cg, Tensor x, double dropout_rate, bool training) const {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    x = relu(add_bias(matmul(x, cg.parameter(*weights_[l])), cg.parameter(*biases_[l])));
    x = dropout(x, dropout_rate, training);
  }
  return x;
}

}  // namespace bicoref
