#pragma once

#include <iosfwd>
#include <random>
#include <vector>

#include "bicoref/autodiff.h"
#include "bicoref/config.h"
#include "bicoref/document.h"
#include "bicoref/encoder.h"
#include "bicoref/layers.h"

namespace bicoref {

struct Span {
  int start = 0;
  int end = 0;  // inclusive
  int sentence = 0;

  int width() const { return end - start + 1; }
  TokenSpan tokens() const { return {start, end}; }
  auto operator<=>(const Span&) const = default;
};

// All within-sentence spans of width <= max_width, ordered by (start, end).
std::vector<Span> enumerate_spans(const Document& doc, int max_width);

// Closed form: sum over sentences of sum_{w=1..min(L, max_width)} (L - w + 1).
std::size_t span_count(const Document& doc, int max_width);

struct PrunedSpans {
  std::vector<int> kept;  // indices into the enumerated spans, ascending
  std::size_t original_count = 0;
};

// Number of spans kept for a document of T tokens: max(1, floor(ratio * T)).
std::size_t kept_span_count(std::size_t tokens, double ratio);

// Keeps the `keep` highest scores; ties go to the earlier span. Survivors are
// returned in span order.
PrunedSpans prune(std::span<const double> mention_scores, std::size_t keep);

struct SpanScores {
  std::vector<Span> spans;
  Tensor attention;       // N x T head-attention weights
  Tensor representations; // N x span_dim
  Tensor mention_scores;  // N x 1
};

class SpanScorer {
 public:
  SpanScorer(ParameterStore& store, const ModelConfig& config, const FeatureEmbeddings& features,
             std::mt19937_64& rng);

  // Head-attention logits per token: T x 1.
  Tensor attention_logits(ComputationGraph& cg, Tensor contextual, bool training) const;
  // Softmax over each span's tokens of the attention logits: N x T.
  static Tensor head_attention_weights(Tensor token_logits, const std::vector<Span>& spans);
  SpanScores score(ComputationGraph& cg, const EncodedDocument& encoded, std::vector<Span> spans,
                   bool training) const;
  // Mention scores for rows of span representations: N x 1.
  Tensor mention_score(ComputationGraph& cg, Tensor representations, bool training) const;

  Parameter& mention_projection() const { return *mention_projection_; }

 private:
  ModelConfig config_;
  const FeatureEmbeddings& features_;
  Ffnn attention_ffnn_;
  Parameter* attention_projection_;
  Ffnn mention_ffnn_;
  Parameter* mention_projection_;
};

// Tab-separated debug listing: start, end, text, mention score; best first.
void write_span_dump(std::ostream& os, const Document& doc, const std::vector<Span>& spans,
                     std::span<const double> mention_scores);

}  // namespace bicoref
