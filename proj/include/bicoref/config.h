#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bicoref/adam.h"

namespace bicoref {

// Architecture hyperparameters. Defaults are the published settings.
struct ModelConfig {
  std::string word_embeddings;        // path, may be empty (all zeros)
  std::size_t word_dim = 300;
  std::string small_word_embeddings;  // path, may be empty (all zeros)
  std::size_t small_word_dim = 50;
  std::size_t char_dim = 8;
  std::size_t char_kernels = 50;
  std::vector<int> char_windows = {3, 4, 5};
  std::size_t lstm_hidden = 200;
  std::size_t ffnn_hidden = 150;
  std::size_t ffnn_layers = 2;
  std::size_t feature_dim = 20;
  int max_span_width = 10;
  int max_antecedents = 250;
  double prune_ratio = 0.4;
  double embedding_dropout = 0.5;
  double hidden_dropout = 0.2;
  bool biaffine = true;
  bool pair_features = true;
  std::uint64_t init_seed = 1;

  std::size_t char_output_dim() const { return char_kernels * char_windows.size(); }
  std::size_t token_dim() const { return word_dim + small_word_dim + char_output_dim(); }
  std::size_t span_dim() const { return 4 * lstm_hidden + token_dim() + feature_dim; }
};

struct TrainConfig {
  double lambda_detection = 0.1;
  AdamConfig adam;
  int max_steps = 2000;
  std::uint64_t seed = 1;
  int eval_every = 0;         // 0 disables periodic dev evaluation
  double grad_clip = 0.0;     // global L2 norm; 0 disables
  double lr_decay_rate = 1.0;
  int lr_decay_steps = 0;     // 0 disables decay
  bool shuffle = true;
};

using KeyValues = std::map<std::string, std::string>;

// `key = value` lines; '#' starts a comment.
KeyValues parse_key_values(const std::string& text);
KeyValues read_key_value_file(const std::filesystem::path& path);
std::string format_key_values(const KeyValues& kv);

// Applies recognized keys; returns the keys that were not recognized. Throws
// std::invalid_argument on malformed values.
std::vector<std::string> apply(const KeyValues& kv, ModelConfig& model);
std::vector<std::string> apply(const KeyValues& kv, TrainConfig& train);

KeyValues to_key_values(const ModelConfig& model);
KeyValues to_key_values(const TrainConfig& train);

}  // namespace bicoref
