#include "bicoref/antecedent_model.h"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace bicoref {

std::vector<int> candidates(int i, int max_antecedents) {
  std::vector<int> out;
  for (int j = std::max(0, i - max_antecedents); j < i; ++j) out.push_back(j);
  return out;
}

AntecedentScores AntecedentOutput::values() const {
  AntecedentScores out;
  out.candidates = candidates;
  const Matrix& s = logits.value();
  const Matrix& c = compat.value();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::vector<double> si, ci;
    for (int j : candidates[i]) {
      si.push_back(s(static_cast<Eigen::Index>(i), j + 1));
      ci.push_back(c(static_cast<Eigen::Index>(i), j));
    }
    out.scores.push_back(std::move(si));
    out.compat.push_back(std::move(ci));
  }
  return out;
}

AntecedentScorer::AntecedentScorer(ParameterStore& store, const ModelConfig& config,
                                   const FeatureEmbeddings& features, std::mt19937_64& rng)
    : config_(config),
      features_(features),
      anaphora_ffnn_(store, "antecedent/anaphora_ffnn", config.span_dim(), config.ffnn_hidden,
                     config.ffnn_layers, rng),
      antecedent_ffnn_(store, "antecedent/antecedent_ffnn", config.span_dim(), config.ffnn_hidden,
                       config.ffnn_layers, rng) {
  const std::size_t reduced = anaphora_ffnn_.output_dim();
  if (config.biaffine) {
    u_bi_ = &store.add("antecedent/U_bi", reduced, reduced, rng);
    v_bi_ = &store.add("antecedent/v_bi", reduced, 1, rng);
  } else {
    pair_ffnn_ = std::make_unique<Ffnn>(store, "antecedent/pair_ffnn", 2 * reduced, config.ffnn_hidden,
                                        config.ffnn_layers, rng);
    pair_projection_ = &store.add("antecedent/pair_projection", pair_ffnn_->output_dim(), 1, rng);
  }
}

Tensor AntecedentScorer::biaffine(ComputationGraph& cg, Tensor representations, bool training) const {
  const Tensor anaphora = anaphora_ffnn_(cg, representations, config_.hidden_dropout, training);
  const Tensor antecedent = antecedent_ffnn_(cg, representations, config_.hidden_dropout, training);
  // Row i of (anaphora U^T) dotted with row j of antecedent is s_hat_j^T U s_hat_i.
  const Tensor left = matmul(anaphora, transpose(cg.parameter(*u_bi_)));
  const Tensor compat = matmul(left, transpose(antecedent));
  const Tensor prior = matmul(anaphora, cg.parameter(*v_bi_));
  return add(compat, broadcast_cols(prior, representations.rows()));
}

Tensor AntecedentScorer::pairwise_ffnn(ComputationGraph& cg, Tensor representations,
                                       const std::vector<std::pair<int, int>>& pairs, bool training) const {
  const Tensor anaphora = anaphora_ffnn_(cg, representations, config_.hidden_dropout, training);
  const Tensor antecedent = antecedent_ffnn_(cg, representations, config_.hidden_dropout, training);
  const std::size_t k = representations.rows();
  if (pairs.empty()) return cg.constant(Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
  std::vector<int> is, js;
  for (auto [i, j] : pairs) {
    is.push_back(i);
    js.push_back(j);
  }
  const Tensor parts[] = {gather_rows(anaphora, is), gather_rows(antecedent, js)};
  const Tensor hidden = (*pair_ffnn_)(cg, concat_cols(parts), config_.hidden_dropout, training);
  const Tensor values = matmul(hidden, cg.parameter(*pair_projection_));
  return scatter_elements(values, pairs, k, k);
}

Tensor AntecedentScorer::pair_feature_term(ComputationGraph& cg, const PairContext& ctx,
                                           const std::vector<std::pair<int, int>>& pairs, bool training) const {
  const std::size_t k = ctx.spans.size();
  if (pairs.empty()) return cg.constant(Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
  const std::size_t d = config_.feature_dim;
  const Tensor projection = cg.parameter(*features_.pair_projection);
  auto table_scores = [&](Parameter* table, std::size_t block) {
    const Tensor emb = dropout(cg.parameter(*table), config_.hidden_dropout, training);
    return matmul(emb, slice_rows(projection, block * d, d));
  };
  const Tensor distance = table_scores(features_.distance, 0);
  const Tensor speaker = table_scores(features_.same_speaker, 1);
  const Tensor genre = table_scores(features_.genre, 2);
  const int genre_id = FeatureEmbeddings::genre_index(ctx.genre);
  std::vector<std::pair<int, int>> dist_at, speaker_at, genre_at;
  for (auto [i, j] : pairs) {
    dist_at.emplace_back(bucket_distance(i - j), 0);
    const bool same = ctx.speakers[static_cast<std::size_t>(i)] == ctx.speakers[static_cast<std::size_t>(j)];
    speaker_at.emplace_back(same ? 1 : 0, 0);
    genre_at.emplace_back(genre_id, 0);
  }
  const Tensor values = add(add(gather_elements(distance, dist_at), gather_elements(speaker, speaker_at)),
                            gather_elements(genre, genre_at));
  return scatter_elements(values, pairs, k, k);
}

AntecedentOutput AntecedentScorer::score(ComputationGraph& cg, Tensor representations, Tensor mention_scores,
                                         const PairContext& ctx, bool training) const {
  AntecedentOutput out;
  const std::size_t k = representations.rows();
  const auto kk = static_cast<Eigen::Index>(k);
  std::vector<std::pair<int, int>> pairs;
  out.candidate_mask = Mask::Constant(kk, kk + 1, false);
  for (std::size_t i = 0; i < k; ++i) {
    out.candidates.push_back(candidates(static_cast<int>(i), config_.max_antecedents));
    out.candidate_mask(static_cast<Eigen::Index>(i), 0) = true;
    for (int j : out.candidates.back()) {
      pairs.emplace_back(static_cast<int>(i), j);
      out.candidate_mask(static_cast<Eigen::Index>(i), j + 1) = true;
    }
  }
  Tensor compat = config_.biaffine ? biaffine(cg, representations, training)
                                   : pairwise_ffnn(cg, representations, pairs, training);
  if (config_.pair_features) compat = add(compat, pair_feature_term(cg, ctx, pairs, training));
  out.compat = compat;
  const Tensor both = add(broadcast_cols(mention_scores, k), broadcast_rows(transpose(mention_scores), k));
  const Tensor real = add(both, compat);
  const Tensor parts[] = {cg.constant(Matrix::Zero(kk, 1)), real};
  out.logits = concat_cols(parts);
  return out;
}

void write_antecedent_dump(std::ostream& os, const Document& doc, const std::vector<Span>& kept,
                           const AntecedentScores& scores, std::size_t k) {
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& cands = scores.candidates[i];
    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores.scores[i][a] > scores.scores[i][b]; });
    if (order.size() > k) order.resize(k);
    const std::string anaphor = doc.span_text(kept[i].tokens());
    for (std::size_t c : order) {
      const auto& j = kept[static_cast<std::size_t>(cands[c])];
      os << anaphor << '\t' << doc.span_text(j.tokens()) << '\t' << scores.compat[i][c] << '\t'
         << scores.scores[i][c] << '\n';
    }
  }
}

}  // namespace bicoref
