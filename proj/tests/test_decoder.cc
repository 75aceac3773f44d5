#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bicoref/decoder.h"
#include "bicoref/training.h"
#include "test_support.h"

using namespace bicoref;

namespace {

AntecedentScores one_row(std::vector<double> scores) {
  AntecedentScores s;
  std::vector<int> c(scores.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = static_cast<int>(j);
  s.candidates = {c};
  s.scores = {scores};
  s.compat = {scores};
  return s;
}

std::vector<Span> singleton_spans(int n) {
  std::vector<Span> spans;
  for (int i = 0; i < n; ++i) spans.push_back({i, i, 0});
  return spans;
}

}  // namespace

TEST_CASE("link decisions") {
  CHECK(predict_links(one_row({-0.5, 1.2})).antecedent[0] == 1);
  CHECK(predict_links(one_row({-0.5, -1.2})).antecedent[0] == kDummy);
  CHECK(predict_links(one_row({0.0, -1.0})).antecedent[0] == kDummy);
  CHECK(predict_links(one_row({0.7, 0.7})).antecedent[0] == 1);
  CHECK(predict_links(one_row({0.7, 0.7, 0.2})).antecedent[0] == 1);
  CHECK(predict_links(one_row({})).antecedent[0] == kDummy);
  CHECK(predict_links(one_row({1e-300})).antecedent[0] == 0);
}

TEST_CASE("clusters are the transitive closure of links") {
  const auto spans = singleton_spans(5);
  SUBCASE("chain") {
    const Clustering c = form_clusters(spans, {{kDummy, 0, 1, kDummy, kDummy}});
    REQUIRE(c.size() == 1);
    CHECK(c.clusters()[0] == Cluster{{0, 0}, {1, 1}, {2, 2}});
  }
  SUBCASE("no links") { CHECK(form_clusters(spans, {{kDummy, kDummy, kDummy, kDummy, kDummy}}).empty()); }
  SUBCASE("two chains") {
    const Clustering c = form_clusters(spans, {{kDummy, kDummy, 0, 1, 2}});
    REQUIRE(c.size() == 2);
    CHECK(c.clusters()[0] == Cluster{{0, 0}, {2, 2}, {4, 4}});
    CHECK(c.clusters()[1] == Cluster{{1, 1}, {3, 3}});
  }
  SUBCASE("two antecedents merged through a later span") {
    const Clustering c = form_clusters(spans, {{kDummy, kDummy, 0, kDummy, 1}});
    CHECK(c.size() == 2);
    CHECK(c.mention_count() == 4);
  }
}

TEST_CASE("random links never produce singletons and cover exactly the linked spans") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 15;
    LinkDecision links;
    for (int i = 0; i < n; ++i) {
      std::uniform_int_distribution<int> pick(-1, i - 1);
      links.antecedent.push_back(i == 0 ? kDummy : pick(rng));
    }
    const Clustering c = form_clusters(singleton_spans(n), links);
    std::vector<bool> linked(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i)
      if (links.antecedent[static_cast<std::size_t>(i)] != kDummy) {
        linked[static_cast<std::size_t>(i)] = true;
        linked[static_cast<std::size_t>(links.antecedent[static_cast<std::size_t>(i)])] = true;
      }
    for (const Cluster& cl : c.clusters()) CHECK(cl.size() >= 2);
    for (int i = 0; i < n; ++i) CHECK((c.cluster_of({i, i}) >= 0) == linked[static_cast<std::size_t>(i)]);
    for (int i = 0; i < n; ++i) {
      const int a = links.antecedent[static_cast<std::size_t>(i)];
      if (a != kDummy) CHECK(c.cluster_of({i, i}) == c.cluster_of({a, a}));
    }
  }
}

TEST_CASE("clustering canonical form") {
  const Clustering a({{{5, 5}, {1, 1}}, {{0, 0}, {9, 9}}});
  const Clustering b({{{0, 0}, {9, 9}}, {{1, 1}, {5, 5}}});
  CHECK(a == b);
  CHECK(a.clusters()[0].front() == TokenSpan{0, 0});
  CHECK_THROWS_AS(Clustering(std::vector<Cluster>{Cluster{}}), std::invalid_argument);
  CHECK_THROWS_AS(Clustering({{{0, 0}, {1, 1}}, {{1, 1}, {2, 2}}}), std::invalid_argument);
}

TEST_CASE("zero model predicts no clusters") {
  const ModelConfig c = test::tiny_config();
  const Document d = test::drug_emporium_document();
  auto model = std::make_unique<CorefModel>(c, test::embeddings_for({d}, c));
  model->parameters().set_all_zero();
  CHECK(predict_document(*model, d).empty());
}

TEST_CASE("prediction is deterministic and invariant to positive score scaling") {
  const ModelConfig c = test::tiny_config();
  std::mt19937_64 rng(5);
  std::vector<Document> docs{test::drug_emporium_document()};
  for (int k = 0; k < 5; ++k) docs.push_back(test::random_document(rng, 4, 12));
  auto model = std::make_unique<CorefModel>(c, test::embeddings_for(docs, c));
  for (const Document& d : docs) {
    const Clustering a = predict_document(*model, d);
    CHECK(a == predict_document(*model, d));
    ComputationGraph cg;
    const AntecedentScores s = model->forward(cg, d, false).antecedents.values();
    for (double scale : {0.5, 3.0, 1e3}) {
      AntecedentScores t = s;
      for (auto& row : t.scores)
        for (double& x : row) x *= scale;
      CHECK(predict_links(t).antecedent == predict_links(s).antecedent);
    }
  }
  const Document labelled = with_predictions(docs[0], predict_document(*model, docs[0]));
  CHECK(labelled.predicted_clusters.has_value());
  CHECK(labelled.clusters == docs[0].clusters);
}

TEST_CASE("an overfit model reproduces the worked example") {
  const Document d = test::drug_emporium_document();
  ModelConfig c = test::tiny_config(1);
  c.embedding_dropout = 0.0;
  c.hidden_dropout = 0.0;
  auto model = std::make_unique<CorefModel>(c, test::embeddings_for({d}, c));
  TrainConfig t;
  t.max_steps = 300;
  t.adam.learning_rate = 1e-2;
  Trainer trainer(*model, t);
  trainer.train({d});
  const Clustering predicted = predict_document(*model, d);
  CHECK(predicted == Clustering(d.clusters));
}
