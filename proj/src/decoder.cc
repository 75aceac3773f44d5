#include "bicoref/decoder.h"

#include <map>
#include <numeric>

namespace bicoref {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

LinkDecision predict_links(const AntecedentScores& scores) {
  LinkDecision out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    int best = kDummy;
    double best_score = kDummyScore;
    const auto& cands = scores.candidates[i];
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const double s = scores.scores[i][c];
      if (s > best_score || (best != kDummy && s == best_score)) {
        best = cands[c];
        best_score = s;
      }
    }
    out.antecedent.push_back(best);
  }
  return out;
}

Clustering form_clusters(const std::vector<Span>& kept, const LinkDecision& links) {
  DisjointSets sets(kept.size());
  std::vector<bool> linked(kept.size(), false);
  for (std::size_t i = 0; i < links.antecedent.size(); ++i) {
    const int j = links.antecedent[i];
    if (j == kDummy) continue;
    sets.unite(i, static_cast<std::size_t>(j));
    linked[i] = linked[static_cast<std::size_t>(j)] = true;
  }
  std::map<std::size_t, Cluster> groups;
  for (std::size_t i = 0; i < kept.size(); ++i)
    if (linked[i]) groups[sets.find(i)].push_back(TokenSpan{kept[i].start, kept[i].end});
  std::vector<Cluster> clusters;
  for (auto& [root, c] : groups) clusters.push_back(std::move(c));
  return Clustering(std::move(clusters));
}

Clustering predict_document(const CorefModel& model, const Document& doc) {
  validate(doc);
  ComputationGraph cg;
  const ForwardResult fwd = model.forward(cg, doc, false);
  return form_clusters(fwd.kept_spans, predict_links(fwd.antecedents.values()));
}

Document with_predictions(const Document& doc, const Clustering& clustering) {
  Document out = doc;
  out.predicted_clusters = clustering.clusters();
  return out;
}

}  // namespace bicoref
