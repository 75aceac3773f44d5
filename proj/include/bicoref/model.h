#pragma once

#include <filesystem>
#include <memory>
#include <random>

#include "bicoref/antecedent_model.h"
#include "bicoref/config.h"
#include "bicoref/document.h"
#include "bicoref/encoder.h"
#include "bicoref/parameters.h"
#include "bicoref/span_model.h"

namespace bicoref {

struct ForwardResult {
  std::vector<Span> spans;       // all enumerated spans
  Tensor mention_scores;         // N x 1
  PrunedSpans pruned;
  std::vector<Span> kept_spans;  // span order
  Tensor kept_representations;   // K x span_dim
  Tensor kept_mention_scores;    // K x 1
  AntecedentOutput antecedents;
};

// The full span-ranking scorer: encoder, span scorer and antecedent scorer
// over one shared parameter store.
class CorefModel {
 public:
  CorefModel(ModelConfig config, FixedEmbeddings fixed);
  CorefModel(const CorefModel&) = delete;
  CorefModel& operator=(const CorefModel&) = delete;

  ForwardResult forward(ComputationGraph& cg, const Document& doc, bool training) const;

  ParameterStore& parameters() { return store_; }
  const ParameterStore& parameters() const { return store_; }
  const ModelConfig& config() const { return config_; }
  const FixedEmbeddings& fixed_embeddings() const { return fixed_; }
  const Encoder& encoder() const { return encoder_; }
  const SpanScorer& span_scorer() const { return span_scorer_; }
  const AntecedentScorer& antecedent_scorer() const { return antecedent_scorer_; }
  const FeatureEmbeddings& features() const { return features_; }

  void save(const std::filesystem::path& path) const;

 private:
  ModelConfig config_;
  FixedEmbeddings fixed_;
  ParameterStore store_;
  std::mt19937_64 init_rng_;
  FeatureEmbeddings features_;
  Encoder encoder_;
  SpanScorer span_scorer_;
  AntecedentScorer antecedent_scorer_;
};

// Builds a model with embeddings loaded from the paths in `config`.
std::unique_ptr<CorefModel> make_model(const ModelConfig& config);
// Restores config and parameters from a checkpoint. Fixed embeddings come from
// `fixed` when given, otherwise from the paths recorded in the checkpoint.
std::unique_ptr<CorefModel> load_model(const std::filesystem::path& checkpoint,
                                       const FixedEmbeddings* fixed = nullptr);

}  // namespace bicoref
