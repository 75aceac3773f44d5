#include "bicoref/span_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace bicoref {

std::vector<Span> enumerate_spans(const Document& doc, int max_width) {
  std::vector<Span> spans;
  int offset = 0;
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const int len = static_cast<int>(doc.sentences[s].size());
    for (int start = 0; start < len; ++start)
      for (int end = start; end < len && end - start + 1 <= max_width; ++end)
        spans.push_back({offset + start, offset + end, static_cast<int>(s)});
    offset += len;
  }
  return spans;
}

std::size_t span_count(const Document& doc, int max_width) {
  std::size_t n = 0;
  for (const auto& s : doc.sentences) {
    const int len = static_cast<int>(s.size());
    for (int w = 1; w <= std::min(len, max_width); ++w) n += static_cast<std::size_t>(len - w + 1);
  }
  return n;
}

std::size_t kept_span_count(std::size_t tokens, double ratio) {
  const auto k = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(tokens)));
  return std::max<std::size_t>(1, k);
}

PrunedSpans prune(std::span<const double> mention_scores, std::size_t keep) {
  PrunedSpans out;
  out.original_count = mention_scores.size();
  std::vector<int> order(mention_scores.size());
  std::iota(order.begin(), order.end(), 0);
  keep = std::min(keep, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](int a, int b) {
                      if (mention_scores[a] != mention_scores[b]) return mention_scores[a] > mention_scores[b];
                      return a < b;
                    });
  out.kept.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
  std::sort(out.kept.begin(), out.kept.end());
  return out;
}

SpanScorer::SpanScorer(ParameterStore& store, const ModelConfig& config, const FeatureEmbeddings& features,
                       std::mt19937_64& rng)
    : config_(config),
      features_(features),
      attention_ffnn_(store, "span/attention_ffnn", 2 * config.lstm_hidden, config.ffnn_hidden,
                      config.ffnn_layers, rng),
      attention_projection_(&store.add("span/attention_projection", attention_ffnn_.output_dim(), 1, rng)),
      mention_ffnn_(store, "span/mention_ffnn", config.span_dim(), config.ffnn_hidden, config.ffnn_layers, rng),
      mention_projection_(&store.add("span/mention_projection", mention_ffnn_.output_dim(), 1, rng)) {}

Tensor SpanScorer::attention_logits(ComputationGraph& cg, Tensor contextual, bool training) const {
  const Tensor hidden = attention_ffnn_(cg, contextual, config_.hidden_dropout, training);
  return matmul(hidden, cg.parameter(*attention_projection_));
}

Tensor SpanScorer::head_attention_weights(Tensor token_logits, const std::vector<Span>& spans) {
  const std::size_t n_tokens = token_logits.rows();
  Mask mask = Mask::Constant(static_cast<Eigen::Index>(spans.size()), static_cast<Eigen::Index>(n_tokens), false);
  for (std::size_t i = 0; i < spans.size(); ++i)
    for (int t = spans[i].start; t <= spans[i].end; ++t) mask(static_cast<Eigen::Index>(i), t) = true;
  const Tensor logits = broadcast_rows(transpose(token_logits), spans.size());
  return masked_softmax(logits, mask);
}

Tensor SpanScorer::mention_score(ComputationGraph& cg, Tensor representations, bool training) const {
  const Tensor hidden = mention_ffnn_(cg, representations, config_.hidden_dropout, training);
  return matmul(hidden, cg.parameter(*mention_projection_));
}

SpanScores SpanScorer::score(ComputationGraph& cg, const EncodedDocument& encoded, std::vector<Span> spans,
                             bool training) const {
  SpanScores out;
  out.spans = std::move(spans);
  std::vector<int> starts, ends, widths;
  for (const Span& s : out.spans) {
    starts.push_back(s.start);
    ends.push_back(s.end);
    widths.push_back(bucket_distance(s.width()));
  }
  out.attention = head_attention_weights(attention_logits(cg, encoded.contextual, training), out.spans);
  const Tensor head = matmul(out.attention, encoded.tokens);
  const Tensor width = dropout(gather_rows(cg.parameter(*features_.width), widths), config_.hidden_dropout,
                               training);
  const Tensor parts[] = {gather_rows(encoded.contextual, starts), gather_rows(encoded.contextual, ends), head,
                          width};
  out.representations = concat_cols(parts);
  out.mention_scores = mention_score(cg, out.representations, training);
  return out;
}

void write_span_dump(std::ostream& os, const Document& doc, const std::vector<Span>& spans,
                     std::span<const double> mention_scores) {
  std::vector<std::size_t> order(spans.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mention_scores[a] > mention_scores[b]; });
  for (std::size_t i : order)
    os << spans[i].start << '\t' << spans[i].end << '\t' << doc.span_text(spans[i].tokens()) << '\t'
       << mention_scores[i] << '\n';
}

}  // namespace bicoref
