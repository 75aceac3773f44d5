#pragma once

#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "bicoref/autodiff.h"
#include "bicoref/config.h"
#include "bicoref/encoder.h"
#include "bicoref/layers.h"
#include "bicoref/span_model.h"

namespace bicoref {

// Candidate antecedents of kept span `i` (position in the kept list): the at
// most `max_antecedents` nearest preceding kept spans, in span order. The
// dummy antecedent is implicit.
std::vector<int> candidates(int i, int max_antecedents);

// s(i, j) = m(i) + m(j) + c(i, j) for a real antecedent.
inline double final_score(double mention_i, double mention_j, double compat) {
  return mention_i + mention_j + compat;
}
// s(i, dummy) is fixed at zero.
inline constexpr double kDummyScore = 0.0;
// Stands for the dummy antecedent wherever a kept-list position is expected.
inline constexpr int kDummy = -1;

// Plain-value view of one document's antecedent scores, consumed by the
// decoder and debug dumps.
struct AntecedentScores {
  std::vector<std::vector<int>> candidates;    // per kept span, ascending
  std::vector<std::vector<double>> scores;     // s(i, j), aligned with candidates
  std::vector<std::vector<double>> compat;     // c(i, j) incl. pair-feature term

  std::size_t size() const { return candidates.size(); }
  static double dummy_score() { return kDummyScore; }
};

struct PairContext {
  std::vector<Span> spans;            // kept spans, span order
  std::vector<std::string> speakers;  // speaker of each span's first token
  std::string genre;
};

struct AntecedentOutput {
  std::vector<std::vector<int>> candidates;
  Tensor compat;   // K x K, c(i, j) (+ pair features) at candidate positions
  Tensor logits;   // K x (K + 1): column 0 is the dummy (exactly 0), column j + 1 is s(i, j)
  Mask candidate_mask;  // K x (K + 1): dummy and real candidates

  AntecedentScores values() const;
};

class AntecedentScorer {
 public:
  AntecedentScorer(ParameterStore& store, const ModelConfig& config, const FeatureEmbeddings& features,
                   std::mt19937_64& rng);

  // c(i, j) = s_hat_j^T U s_hat_i + v^T s_hat_i for all (i, j): K x K.
  Tensor biaffine(ComputationGraph& cg, Tensor representations, bool training) const;
  // Ablation: c(i, j) = v^T FFNN([s_hat_i, s_hat_j]) at the listed pairs.
  Tensor pairwise_ffnn(ComputationGraph& cg, Tensor representations,
                       const std::vector<std::pair<int, int>>& pairs, bool training) const;
  // Linear score of [distance, same-speaker, genre] embeddings at the listed
  // pairs, scattered into K x K.
  Tensor pair_feature_term(ComputationGraph& cg, const PairContext& ctx,
                           const std::vector<std::pair<int, int>>& pairs, bool training) const;

  AntecedentOutput score(ComputationGraph& cg, Tensor representations, Tensor mention_scores,
                         const PairContext& ctx, bool training) const;

  Parameter& u_bi() const { return *u_bi_; }
  Parameter& v_bi() const { return *v_bi_; }

 private:
  ModelConfig config_;
  const FeatureEmbeddings& features_;
  Ffnn anaphora_ffnn_;
  Ffnn antecedent_ffnn_;
  Parameter* u_bi_ = nullptr;
  Parameter* v_bi_ = nullptr;
  std::unique_ptr<Ffnn> pair_ffnn_;
  Parameter* pair_projection_ = nullptr;
};

// Tab-separated debug listing per kept span: anaphor, candidate, c, s; the
// top `k` candidates by s.
void write_antecedent_dump(std::ostream& os, const Document& doc, const std::vector<Span>& kept,
                           const AntecedentScores& scores, std::size_t k);

}  // namespace bicoref
