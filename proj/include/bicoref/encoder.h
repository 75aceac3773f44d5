#pragma once

#include <random>
#include <string>
#include <vector>

#include "bicoref/autodiff.h"
#include "bicoref/config.h"
#include "bicoref/document.h"
#include "bicoref/parameters.h"

namespace bicoref {

inline constexpr int kDistanceBuckets = 9;

// Buckets [1], [2], [3], [4], [5-7], [8-15], [16-31], [32-63], [64+] -> 0..8.
// Throws std::invalid_argument for d < 1.
int bucket_distance(int d);

// Fixed (untrained) word vectors: the two pretrained tables concatenated.
struct FixedEmbeddings {
  EmbeddingTable word;
  EmbeddingTable small_word;

  // T x (word_dim + small_word_dim) constant matrix for the given tokens.
  Matrix lookup(const std::vector<std::string>& tokens) const;
};

FixedEmbeddings load_fixed_embeddings(const ModelConfig& config);

// Byte-level character CNN: one convolution per window size, max-pooled over
// positions, outputs concatenated.
class CharCnn {
 public:
  static constexpr int kPadChar = 256;

  CharCnn(ParameterStore& store, const ModelConfig& config, std::mt19937_64& rng);

  Tensor embed(ComputationGraph& cg, const std::string& word) const;
  std::size_t output_dim() const { return kernels_.size() * kernel_count_; }

 private:
  Parameter* chars_;
  std::vector<Parameter*> kernels_;
  std::vector<Parameter*> biases_;
  std::vector<int> windows_;
  std::size_t char_dim_;
  std::size_t kernel_count_;
};

// Standard LSTM (input, forget, output gates; tanh cell), zero initial state.
class Lstm {
 public:
  Lstm(ParameterStore& store, const std::string& prefix, std::size_t input_dim, std::size_t hidden,
       std::mt19937_64& rng);

  // L x input -> L x hidden. With reverse set, the recurrence runs from the
  // last row to the first; row t of the output is still the state at token t.
  Tensor run(ComputationGraph& cg, Tensor inputs, bool reverse) const;
  std::size_t hidden() const { return hidden_; }

 private:
  Parameter* w_input_;
  Parameter* w_hidden_;
  Parameter* bias_;
  std::size_t hidden_;
};

// Learned 20-dim tables for span width, antecedent distance, genre and
// same-speaker, plus the linear projection that turns pair features into a
// score.
struct FeatureEmbeddings {
  static const std::vector<std::string>& genres();
  static int genre_index(const std::string& genre);

  FeatureEmbeddings(ParameterStore& store, const ModelConfig& config, std::mt19937_64& rng);

  Parameter* width;
  Parameter* distance;
  Parameter* genre;
  Parameter* same_speaker;
  Parameter* pair_projection;  // (3 * feature_dim) x 1
};

struct EncodedDocument {
  Tensor tokens;      // T x token_dim, after embedding dropout
  Tensor contextual;  // T x 2*hidden, after hidden dropout
};

class Encoder {
 public:
  Encoder(ParameterStore& store, const ModelConfig& config, std::mt19937_64& rng);

  // Token representations before dropout: [fixed vectors, char CNN].
  Tensor token_representations(ComputationGraph& cg, const std::vector<std::string>& tokens,
                               const FixedEmbeddings& fixed) const;
  // BiLSTM over one sentence: L x token_dim -> L x 2*hidden.
  Tensor encode_sentence(ComputationGraph& cg, Tensor tokens) const;
  EncodedDocument encode(ComputationGraph& cg, const Document& doc, const FixedEmbeddings& fixed,
                         bool training) const;

  const CharCnn& char_cnn() const { return char_cnn_; }
  const Lstm& forward_lstm() const { return forward_; }
  const Lstm& backward_lstm() const { return backward_; }

 private:
  ModelConfig config_;
  CharCnn char_cnn_;
  Lstm forward_;
  Lstm backward_;
};

}  // namespace bicoref
