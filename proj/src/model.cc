#include "bicoref/model.h"

#include <stdexcept>

namespace bicoref {

CorefModel::CorefModel(ModelConfig config, FixedEmbeddings fixed)
    : config_(std::move(config)),
      fixed_(std::move(fixed)),
      init_rng_(config_.init_seed),
      features_(store_, config_, init_rng_),
      encoder_(store_, config_, init_rng_),
      span_scorer_(store_, config_, features_, init_rng_),
      antecedent_scorer_(store_, config_, features_, init_rng_) {
  if (fixed_.word.dimension() != config_.word_dim || fixed_.small_word.dimension() != config_.small_word_dim)
    throw std::invalid_argument("fixed embedding dimensions do not match the model config");
}

ForwardResult CorefModel::forward(ComputationGraph& cg, const Document& doc, bool training) const {
  ForwardResult out;
  const EncodedDocument encoded = encoder_.encode(cg, doc, fixed_, training);
  SpanScores scored = span_scorer_.score(cg, encoded, enumerate_spans(doc, config_.max_span_width), training);
  out.spans = std::move(scored.spans);
  out.mention_scores = scored.mention_scores;

  const Matrix& m = out.mention_scores.value();
  const std::size_t keep = kept_span_count(doc.token_count(), config_.prune_ratio);
  out.pruned = prune(std::span<const double>(m.data(), static_cast<std::size_t>(m.size())), keep);

  PairContext ctx;
  ctx.genre = doc.genre;
  const auto speakers = doc.flat_speakers();
  for (int idx : out.pruned.kept) {
    const Span& s = out.spans[static_cast<std::size_t>(idx)];
    out.kept_spans.push_back(s);
    ctx.speakers.push_back(speakers[static_cast<std::size_t>(s.start)]);
  }
  ctx.spans = out.kept_spans;
  out.kept_representations = gather_rows(scored.representations, out.pruned.kept);
  out.kept_mention_scores = gather_rows(out.mention_scores, out.pruned.kept);
  out.antecedents =
      antecedent_scorer_.score(cg, out.kept_representations, out.kept_mention_scores, ctx, training);
  return out;
}

void CorefModel::save(const std::filesystem::path& path) const {
  write_checkpoint(path, format_key_values(to_key_values(config_)), store_);
}

std::unique_ptr<CorefModel> make_model(const ModelConfig& config) {
  return std::make_unique<CorefModel>(config, load_fixed_embeddings(config));
}

std::unique_ptr<CorefModel> load_model(const std::filesystem::path& checkpoint, const FixedEmbeddings* fixed) {
  const CheckpointData data = read_checkpoint(checkpoint);
  ModelConfig config;
  const auto unknown = bicoref::apply(parse_key_values(data.metadata), config);
  if (!unknown.empty()) throw CheckpointError("checkpoint metadata has unknown key " + unknown.front());
  auto model = fixed ? std::make_unique<CorefModel>(config, *fixed) : make_model(config);
  load_into(data, model->parameters());
  return model;
}

}  // namespace bicoref
