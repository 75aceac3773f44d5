#include "bicoref/encoder.h"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace bicoref {

int bucket_distance(int d) {
  if (d < 1) throw std::invalid_argument("bucket_distance: distance must be >= 1, got " + std::to_string(d));
  if (d <= 4) return d - 1;
  if (d <= 7) return 4;
  if (d <= 15) return 5;
  if (d <= 31) return 6;
  if (d <= 63) return 7;
  return 8;
}

Matrix FixedEmbeddings::lookup(const std::vector<std::string>& tokens) const {
  const auto wd = static_cast<Eigen::Index>(word.dimension());
  const auto sd = static_cast<Eigen::Index>(small_word.dimension());
  Matrix out(static_cast<Eigen::Index>(tokens.size()), wd + sd);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto r = static_cast<Eigen::Index>(t);
    const auto a = word.lookup(tokens[t]);
    const auto b = small_word.lookup(tokens[t]);
    for (Eigen::Index c = 0; c < wd; ++c) out(r, c) = a[static_cast<std::size_t>(c)];
    for (Eigen::Index c = 0; c < sd; ++c) out(r, wd + c) = b[static_cast<std::size_t>(c)];
  }
  return out;
}

FixedEmbeddings load_fixed_embeddings(const ModelConfig& config) {
  FixedEmbeddings fixed{EmbeddingTable(config.word_dim), EmbeddingTable(config.small_word_dim)};
  if (!config.word_embeddings.empty()) fixed.word = load_embeddings(config.word_embeddings, config.word_dim);
  if (!config.small_word_embeddings.empty())
    fixed.small_word = load_embeddings(config.small_word_embeddings, config.small_word_dim);
  return fixed;
}

CharCnn::CharCnn(ParameterStore& store, const ModelConfig& config, std::mt19937_64& rng)
    : windows_(config.char_windows), char_dim_(config.char_dim), kernel_count_(config.char_kernels) {
  chars_ = &store.add_uniform("encoder/char_embeddings", kPadChar + 1, char_dim_, 0.5, rng);
  for (int w : windows_) {
    const std::string p = "encoder/char_cnn/w" + std::to_string(w);
    kernels_.push_back(&store.add(p + "/kernel", static_cast<std::size_t>(w) * char_dim_, kernel_count_, rng));
    biases_.push_back(&store.add(p + "/bias", 1, kernel_count_, rng, /*zero=*/true));
  }
}

Tensor CharCnn::embed(ComputationGraph& cg, const std::string& word) const {
  if (word.empty()) throw std::invalid_argument("char_cnn: empty word");
  const Tensor table = cg.parameter(*chars_);
  std::vector<Tensor> pooled;
  for (std::size_t k = 0; k < windows_.size(); ++k) {
    const auto w = static_cast<std::size_t>(windows_[k]);
    // Right-pad words shorter than the window.
    const std::size_t len = std::max(word.size(), w);
    std::vector<int> ids(len, kPadChar);
    for (std::size_t i = 0; i < word.size(); ++i) ids[i] = static_cast<unsigned char>(word[i]);
    const Tensor chars = gather_rows(table, ids);
    const std::size_t positions = len - w + 1;
    std::vector<Tensor> shifted;
    for (std::size_t o = 0; o < w; ++o) shifted.push_back(slice_rows(chars, o, positions));
    const Tensor windows = concat_cols(shifted);
    const Tensor conv = add_bias(matmul(windows, cg.parameter(*kernels_[k])), cg.parameter(*biases_[k]));
    pooled.push_back(max_over_rows(conv));
  }
  return concat_cols(pooled);
}

Lstm::Lstm(ParameterStore& store, const std::string& prefix, std::size_t input_dim, std::size_t hidden,
           std::mt19937_64& rng)
    : hidden_(hidden) {
  w_input_ = &store.add(prefix + "/W_input", input_dim, 4 * hidden, rng);
  w_hidden_ = &store.add(prefix + "/W_hidden", hidden, 4 * hidden, rng);
  bias_ = &store.add(prefix + "/bias", 1, 4 * hidden, rng, /*zero=*/true);
}

Tensor Lstm::run(ComputationGraph& cg, Tensor inputs, bool reverse) const {
  const std::size_t n = inputs.rows();
  const std::size_t h = hidden_;
  // Input contributions for every position at once: L x 4H, gate order i, f, o, g.
  const Tensor projected = add_bias(matmul(inputs, cg.parameter(*w_input_)), cg.parameter(*bias_));
  const Tensor w_hidden = cg.parameter(*w_hidden_);
  std::vector<Tensor> states(n);
  Tensor hidden_state, cell;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = reverse ? n - 1 - step : step;
    Tensor gates = slice_rows(projected, t, 1);
    if (step > 0) gates = add(gates, matmul(hidden_state, w_hidden));
    const Tensor in_gate = sigmoid(slice_cols(gates, 0, h));
    const Tensor out_gate = sigmoid(slice_cols(gates, 2 * h, h));
    const Tensor candidate = tanh(slice_cols(gates, 3 * h, h));
    if (step == 0) {
      cell = cmul(in_gate, candidate);
    } else {
      const Tensor forget_gate = sigmoid(slice_cols(gates, h, h));
      cell = add(cmul(forget_gate, cell), cmul(in_gate, candidate));
    }
    hidden_state = cmul(out_gate, tanh(cell));
    states[t] = hidden_state;
  }
  return concat_rows(states);
}

const std::vector<std::string>& FeatureEmbeddings::genres() {
  static const std::vector<std::string> kGenres = {"bc", "bn", "mz", "nw", "pt", "tc", "wb"};
  return kGenres;
}

int FeatureEmbeddings::genre_index(const std::string& genre) {
  const auto& g = genres();
  auto it = std::find(g.begin(), g.end(), genre);
  return it == g.end() ? static_cast<int>(g.size()) : static_cast<int>(it - g.begin());
}

FeatureEmbeddings::FeatureEmbeddings(ParameterStore& store, const ModelConfig& config, std::mt19937_64& rng) {
  const std::size_t d = config.feature_dim;
  width = &store.add_uniform("features/width", kDistanceBuckets, d, 0.5, rng);
  distance = &store.add_uniform("features/distance", kDistanceBuckets, d, 0.5, rng);
  genre = &store.add_uniform("features/genre", genres().size() + 1, d, 0.5, rng);
  same_speaker = &store.add_uniform("features/same_speaker", 2, d, 0.5, rng);
  pair_projection = &store.add("features/pair_projection", 3 * d, 1, rng);
}

Encoder::Encoder(ParameterStore& store, const ModelConfig& config, std::mt19937_64& rng)
    : config_(config),
      char_cnn_(store, config, rng),
      forward_(store, "encoder/lstm_forward", config.token_dim(), config.lstm_hidden, rng),
      backward_(store, "encoder/lstm_backward", config.token_dim(), config.lstm_hidden, rng) {}

Tensor Encoder::token_representations(ComputationGraph& cg, const std::vector<std::string>& tokens,
                                      const FixedEmbeddings& fixed) const {
  // Character features are computed once per word type and reused.
  std::map<std::string, Tensor> by_type;
  std::vector<Tensor> rows;
  rows.reserve(tokens.size());
  for (const auto& tok : tokens) {
    auto it = by_type.find(tok);
    if (it == by_type.end()) it = by_type.emplace(tok, char_cnn_.embed(cg, tok)).first;
    rows.push_back(it->second);
  }
  const Tensor chars = concat_rows(rows);
  if (fixed.word.dimension() + fixed.small_word.dimension() == 0) return chars;
  const Tensor pretrained = cg.constant(fixed.lookup(tokens));
  const Tensor parts[] = {pretrained, chars};
  return concat_cols(parts);
}

Tensor Encoder::encode_sentence(ComputationGraph& cg, Tensor tokens) const {
  const Tensor parts[] = {forward_.run(cg, tokens, false), backward_.run(cg, tokens, true)};
  return concat_cols(parts);
}

EncodedDocument Encoder::encode(ComputationGraph& cg, const Document& doc, const FixedEmbeddings& fixed,
                                bool training) const {
  const Tensor tokens = dropout(token_representations(cg, doc.flat_tokens(), fixed),
                                config_.embedding_dropout, training);
  std::vector<Tensor> sentences;
  std::size_t offset = 0;
  for (const auto& s : doc.sentences) {
    sentences.push_back(encode_sentence(cg, slice_rows(tokens, offset, s.size())));
    offset += s.size();
  }
  const Tensor contextual = dropout(concat_rows(sentences), config_.hidden_dropout, training);
  return {tokens, contextual};
}

}  // namespace bicoref
