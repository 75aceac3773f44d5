#include "bicoref/training.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

namespace bicoref {

namespace {

std::map<TokenSpan, int> cluster_ids(const std::vector<Cluster>& gold) {
  std::map<TokenSpan, int> ids;
  for (std::size_t c = 0; c < gold.size(); ++c)
    for (const TokenSpan& s : gold[c]) ids[s] = static_cast<int>(c);
  return ids;
}

double log_sum_exp(const std::vector<double>& xs) {
  const double hi = *std::max_element(xs.begin(), xs.end());
  double total = 0;
  for (double x : xs) total += std::exp(x - hi);
  return hi + std::log(total);
}

}  // namespace

GoldAntecedentSets build_gold_sets(const std::vector<Span>& kept, const std::vector<std::vector<int>>& candidates,
                                   const std::vector<Cluster>& gold) {
  const auto ids = cluster_ids(gold);
  auto id_of = [&](const Span& s) {
    auto it = ids.find(TokenSpan{s.start, s.end});
    return it == ids.end() ? -1 : it->second;
  };
  GoldAntecedentSets out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    std::vector<int> set;
    const int id = id_of(kept[i]);
    if (id >= 0)
      for (int j : candidates[i])
        if (id_of(kept[static_cast<std::size_t>(j)]) == id) set.push_back(j);
    if (set.empty()) set.push_back(kDummy);
    out.sets.push_back(std::move(set));
  }
  return out;
}

Matrix mention_labels(const std::vector<Span>& spans, const std::vector<Cluster>& gold) {
  const auto ids = cluster_ids(gold);
  Matrix y(static_cast<Eigen::Index>(spans.size()), 1);
  for (std::size_t i = 0; i < spans.size(); ++i)
    y(static_cast<Eigen::Index>(i), 0) = ids.count(TokenSpan{spans[i].start, spans[i].end}) ? 1.0 : 0.0;
  return y;
}

double cluster_loss(const AntecedentScores& scores, const GoldAntecedentSets& gold) {
  if (gold.size() != scores.size()) throw std::logic_error("gold sets and scores disagree in length");
  double total = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::vector<double> all{kDummyScore};
    all.insert(all.end(), scores.scores[i].begin(), scores.scores[i].end());
    std::vector<double> good;
    for (int j : gold.sets[i]) {
      if (j == kDummy) {
        good.push_back(kDummyScore);
        continue;
      }
      const auto& cands = scores.candidates[i];
      auto it = std::find(cands.begin(), cands.end(), j);
      if (it == cands.end()) throw std::logic_error("gold antecedent is not a candidate");
      good.push_back(scores.scores[i][static_cast<std::size_t>(it - cands.begin())]);
    }
    total += log_sum_exp(good) - log_sum_exp(all);
  }
  return total;
}

double detect_loss(std::span<const double> mention_scores, std::span<const double> labels) {
  if (mention_scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
  double total = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(1.0 / (1.0 + std::exp(-mention_scores[i])), 1e-12, 1.0 - 1e-12);
    total += labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
  }
  return total;
}

Tensor cluster_log_likelihood(const AntecedentOutput& antecedents, const GoldAntecedentSets& gold) {
  const Mask& candidates = antecedents.candidate_mask;
  if (gold.size() != static_cast<std::size_t>(candidates.rows()))
    throw std::logic_error("gold sets and antecedent scores disagree in length");
  Mask gold_mask = Mask::Constant(candidates.rows(), candidates.cols(), false);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (int j : gold.sets[i]) {
      if (!candidates(r, j + 1)) throw std::logic_error("gold antecedent is not a candidate");
      gold_mask(r, j + 1) = true;
    }
  }
  return masked_logsumexp(antecedents.logits, gold_mask) - masked_logsumexp(antecedents.logits, candidates);
}

Tensor detection_log_likelihood(Tensor mention_scores, const Matrix& labels) {
  return bernoulli_log_likelihood(mention_scores, labels);
}

LossTerms combined_loss(ComputationGraph& cg, const CorefModel& model, const Document& doc, double lambda_detection,
                        bool training) {
  LossTerms out;
  out.forward = model.forward(cg, doc, training);
  out.gold = build_gold_sets(out.forward.kept_spans, out.forward.antecedents.candidates, doc.clusters);
  out.detect_sum = sum(detection_log_likelihood(out.forward.mention_scores, mention_labels(out.forward.spans, doc.clusters)));
  out.cluster_sum = sum(cluster_log_likelihood(out.forward.antecedents, out.gold));
  out.loss = scale(add(scale(out.detect_sum, lambda_detection), out.cluster_sum), -1.0);
  return out;
}

void write_loss_header(std::ostream& os) { os << "step,L_detect_sum,L_cluster_sum,L_loss\n"; }

void write_loss_row(std::ostream& os, const StepLog& row) {
  const auto old = os.precision(10);
  os << row.step << ',' << row.detect_sum << ',' << row.cluster_sum << ',' << row.loss << '\n';
  os.precision(old);
}

std::uint64_t step_seed(std::uint64_t seed, std::int64_t step) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(static_cast<std::uint64_t>(step) >> 32)};
  std::uint64_t out[1];
  seq.generate(reinterpret_cast<std::uint32_t*>(out), reinterpret_cast<std::uint32_t*>(out) + 2);
  return out[0];
}

Trainer::Trainer(CorefModel& model, TrainConfig config)
    : model_(model), config_(config), adam_(config.adam), order_rng_(config.seed) {}

double Trainer::current_learning_rate() const {
  if (config_.lr_decay_steps <= 0) return config_.adam.learning_rate;
  return config_.adam.learning_rate *
         std::pow(config_.lr_decay_rate, static_cast<double>(step_) / config_.lr_decay_steps);
}

StepLog Trainer::step(const Document& doc) {
  ParameterStore& store = model_.parameters();
  store.zero_grad();
  ComputationGraph cg(step_seed(config_.seed, step_));
  const LossTerms terms = combined_loss(cg, model_, doc, config_.lambda_detection, true);
  StepLog row{step_ + 1, terms.detect_sum.scalar(), terms.cluster_sum.scalar(), terms.loss.scalar()};
  if (!std::isfinite(row.loss)) throw NonFiniteLossError(row.step);
  cg.backward(terms.loss);

  if (config_.grad_clip > 0) {
    double sq = 0;
    for (const Parameter* p : store.all()) sq += p->grad.squaredNorm();
    const double norm = std::sqrt(sq);
    if (norm > config_.grad_clip)
      for (Parameter* p : store.all()) p->grad *= config_.grad_clip / norm;
  }
  adam_.config().learning_rate = current_learning_rate();
  try {
    adam_.step(store);
  } catch (const std::runtime_error&) {
    throw NonFiniteLossError(row.step);
  }
  ++step_;
  return row;
}

std::vector<StepLog> Trainer::train(const std::vector<Document>& docs, const TrainCallbacks& callbacks) {
  if (docs.empty()) throw std::invalid_argument("training corpus is empty");
  std::vector<StepLog> log;
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  while (step_ < config_.max_steps) {
    if (cursor == order.size()) {
      if (config_.shuffle) std::shuffle(order.begin(), order.end(), order_rng_);
      cursor = 0;
    }
    const StepLog row = step(docs[order[cursor++]]);
    log.push_back(row);
    if (callbacks.on_step) callbacks.on_step(row);
    if (callbacks.on_eval && config_.eval_every > 0 && step_ % config_.eval_every == 0) callbacks.on_eval(step_);
  }
  return log;
}

}  // namespace bicoref
