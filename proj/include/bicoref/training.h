#pragma once

#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "bicoref/adam.h"
#include "bicoref/antecedent_model.h"
#include "bicoref/config.h"
#include "bicoref/model.h"

namespace bicoref {

// GOLD(i) for every kept span, as kept-list positions of gold antecedents, or
// {kDummy}. Never empty.
struct GoldAntecedentSets {
  std::vector<std::vector<int>> sets;

  std::size_t size() const { return sets.size(); }
  bool is_dummy(std::size_t i) const { return sets[i].size() == 1 && sets[i][0] == kDummy; }
};

GoldAntecedentSets build_gold_sets(const std::vector<Span>& kept, const std::vector<std::vector<int>>& candidates,
                                   const std::vector<Cluster>& gold);

// y_i per enumerated span, N x 1.
Matrix mention_labels(const std::vector<Span>& spans, const std::vector<Cluster>& gold);

// Sum over kept spans of log P(GOLD(i)) with the dummy scored 0. Throws
// std::logic_error if some gold antecedent is not a candidate.
double cluster_loss(const AntecedentScores& scores, const GoldAntecedentSets& gold);
// Sum over spans of y log p + (1 - y) log(1 - p), p = clamped sigmoid(m).
double detect_loss(std::span<const double> mention_scores, std::span<const double> labels);

// Differentiable forms: per kept span (K x 1) and per enumerated span (N x 1).
Tensor cluster_log_likelihood(const AntecedentOutput& antecedents, const GoldAntecedentSets& gold);
Tensor detection_log_likelihood(Tensor mention_scores, const Matrix& labels);

struct LossTerms {
  ForwardResult forward;
  GoldAntecedentSets gold;
  Tensor detect_sum;   // sum of L_detect, <= 0
  Tensor cluster_sum;  // sum of L_cluster, <= 0
  Tensor loss;         // -lambda * detect_sum - cluster_sum
};

LossTerms combined_loss(ComputationGraph& cg, const CorefModel& model, const Document& doc, double lambda_detection,
                        bool training);

struct StepLog {
  std::int64_t step = 0;
  double detect_sum = 0;
  double cluster_sum = 0;
  double loss = 0;
};

void write_loss_header(std::ostream& os);
void write_loss_row(std::ostream& os, const StepLog& row);

class NonFiniteLossError : public std::runtime_error {
 public:
  explicit NonFiniteLossError(std::int64_t step)
      : std::runtime_error("non-finite loss at step " + std::to_string(step)), step_(step) {}
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

struct TrainCallbacks {
  std::function<void(const StepLog&)> on_step;
  // Called after every eval_every-th update.
  std::function<void(std::int64_t step)> on_eval;
};

// One Adam update per document; documents are visited in a seeded shuffled
// order per epoch. A non-finite loss or gradient throws NonFiniteLossError
// before the parameters change.
class Trainer {
 public:
  Trainer(CorefModel& model, TrainConfig config);

  StepLog step(const Document& doc);
  std::vector<StepLog> train(const std::vector<Document>& docs, const TrainCallbacks& callbacks = {});

  std::int64_t steps_taken() const { return step_; }
  const Adam& optimizer() const { return adam_; }

 private:
  double current_learning_rate() const;

  CorefModel& model_;
  TrainConfig config_;
  Adam adam_;
  std::mt19937_64 order_rng_;
  std::int64_t step_ = 0;
};

// Seed of the dropout stream used for training step `step`.
std::uint64_t step_seed(std::uint64_t seed, std::int64_t step);

}  // namespace bicoref
