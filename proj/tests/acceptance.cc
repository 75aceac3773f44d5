// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include "bicoref/decoder.h"
#include "bicoref/gradcheck.h"
#include "bicoref/metrics.h"
#include "bicoref/training.h"
#include "test_support.h"

using namespace bicoref;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---- metric oracles

TokenSpan m(int i) { return {i, i}; }

Clustering random_clustering(std::mt19937_64& rng, int universe, int max_clusters) {
  std::vector<int> ids(static_cast<std::size_t>(universe));
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  const int clusters = std::uniform_int_distribution<int>(0, max_clusters)(rng);
  std::vector<Cluster> out;
  std::size_t next = 0;
  for (int c = 0; c < clusters && next + 2 <= ids.size(); ++c) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, std::min<std::size_t>(4, ids.size() - next))(rng);
    Cluster cl;
    for (std::size_t k = 0; k < n; ++k) cl.push_back(m(ids[next++]));
    out.push_back(cl);
  }
  return Clustering(out);
}

const Cluster* containing(const Clustering& c, const TokenSpan& s) {
  for (const Cluster& cl : c.clusters())
    if (std::find(cl.begin(), cl.end(), s) != cl.end()) return &cl;
  return nullptr;
}

double overlap(const Cluster& a, const Cluster& b) {
  double n = 0;
  for (const TokenSpan& x : a) n += std::count(b.begin(), b.end(), x);
  return n;
}

// key mentions start as parts of their own and merge when they share a response cluster
std::pair<double, double> muc_side(const Clustering& key, const Clustering& response) {
  double num = 0, den = 0;
  for (const Cluster& k : key.clusters()) {
    std::vector<int> label(k.size());
    std::iota(label.begin(), label.end(), 0);
    for (std::size_t a = 0; a < k.size(); ++a)
      for (std::size_t b = 0; b < k.size(); ++b) {
        const int ra = response.cluster_of(k[a]);
        if (ra >= 0 && ra == response.cluster_of(k[b]) && label[b] != label[a]) {
          const int from = label[b], to = label[a];
          for (int& l : label)
            if (l == from) l = to;
        }
      }
    std::vector<int> parts = label;
    std::sort(parts.begin(), parts.end());
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
    num += static_cast<double>(k.size() - parts.size());
    den += static_cast<double>(k.size() - 1);
  }
  return {num, den};
}

PRF muc_oracle(const Clustering& g, const Clustering& s) {
  const auto [rn, rd] = muc_side(g, s);
  const auto [pn, pd] = muc_side(s, g);
  return make_prf(pd == 0 ? 0 : pn / pd, rd == 0 ? 0 : rn / rd);
}

PRF b_cubed_oracle(const Clustering& g, const Clustering& s) {
  auto side = [](const Clustering& a, const Clustering& b) {
    double total = 0, n = 0;
    for (const Cluster& k : a.clusters())
      for (const TokenSpan& x : k) {
        const Cluster* other = containing(b, x);
        total += other ? overlap(k, *other) / static_cast<double>(k.size()) : 0.0;
        n += 1;
      }
    return n == 0 ? 0.0 : total / n;
  };
  return make_prf(side(s, g), side(g, s));
}

PRF ceaf_oracle(const Clustering& g, const Clustering& s) {
  std::vector<std::size_t> perm(std::max(g.size(), s.size()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0;
  do {
    double total = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (perm[i] < s.size()) total += phi4(g.clusters()[i], s.clusters()[perm[i]]);
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return make_prf(s.empty() ? 0 : best / static_cast<double>(s.size()),
                  g.empty() ? 0 : best / static_cast<double>(g.size()));
}

double prf_gap(const PRF& a, const PRF& b) {
  return std::max({std::abs(a.precision - b.precision), std::abs(a.recall - b.recall), std::abs(a.f1 - b.f1)});
}

// ---- criteria

void conll_arithmetic() {
  const double single = conll_average(0.765, 0.655, 0.614);
  const double ensemble = conll_average(0.776, 0.671, 0.629);
  report("conll-average-arithmetic", std::abs(single - 0.678) <= 0.0005 && std::abs(ensemble - 0.692) <= 0.0005,
         "single " + fmt("%.5f", single) + " (0.678), ensemble " + fmt("%.5f", ensemble) + " (0.692), tol 0.0005");
}

void gradient_soundness() {
  const ModelConfig mc = gradcheck_config();
  CorefModel model(mc, gradcheck_embeddings(mc));
  GradcheckOptions options;
  const GradcheckReport r = gradcheck(model, gradcheck_fixture(), options);
  std::ostringstream d;
  d << r.checked << " scalars in " << r.groups.size() << " parameter groups, max rel error "
    << fmt("%.3g", r.max_rel_error) << " (< 1e-4), " << fmt("%.2f", r.seconds) << "s (< 300s)";
  report("gradient-soundness", r.passed && r.max_rel_error < 1e-4 && r.seconds < 300 &&
                                   r.groups.size() == model.parameters().all().size(),
         d.str());
}

void metric_oracles() {
  const Clustering g({{m(0), m(1), m(2)}, {m(3), m(4)}});
  const Clustering s({{m(0), m(1)}, {m(2), m(3), m(4)}});
  const PRF u = muc(g, s), b = b_cubed(g, s), e = ceaf_phi4(g, s);
  const bool worked = std::abs(u.precision - 2.0 / 3) < 1e-12 && std::abs(u.recall - 2.0 / 3) < 1e-12 &&
                      std::abs(b.precision - 11.0 / 15) < 1e-12 && std::abs(b.recall - 11.0 / 15) < 1e-12 &&
                      std::abs(e.precision - 0.8) < 1e-12 && std::abs(e.recall - 0.8) < 1e-12;
  std::mt19937_64 rng(20240601);
  double worst = 0;
  const int pairs = 2000;
  for (int t = 0; t < pairs; ++t) {
    const int universe = 2 + t % 7;
    const Clustering gold = random_clustering(rng, universe, 6), sys = random_clustering(rng, universe, 6);
    worst = std::max({worst, prf_gap(muc(gold, sys), muc_oracle(gold, sys)),
                      prf_gap(b_cubed(gold, sys), b_cubed_oracle(gold, sys)),
                      prf_gap(ceaf_phi4(gold, sys), ceaf_oracle(gold, sys))});
  }
  report("metric-oracle-equivalence", worked && worst < 1e-9,
         std::to_string(pairs) + " random pairs (<= 8 mentions, <= 6 clusters), max deviation " + fmt("%.3g", worst) +
             " (< 1e-9); worked example MUC " + fmt("%.4f", u.f1) + " B3 " + fmt("%.4f", b.f1) + " CEAF " +
             fmt("%.4f", e.f1) + (worked ? " exact" : " WRONG"));
}

struct OverfitRun {
  double final_f1 = 0;
  double best_f1 = 0;
  std::int64_t first_step_095 = -1;
  std::int64_t first_step_090 = -1;
  double seconds = 0;
  bool dummy_always_zero = true;
  bool prune_counts_ok = true;
  bool no_singletons = true;
  MentionDetectionReport mentions;
};

struct SyntheticSetup {
  std::vector<Document> docs;
  FixedEmbeddings embeddings;
};

SyntheticSetup synthetic_setup() {
  const std::uint64_t seed = 1;
  const CorpusSplit corpus = generate_synthetic_corpus(seed, 20, 200, 4);
  const ModelConfig defaults;
  return {corpus.documents, FixedEmbeddings{synthetic_embeddings(corpus.documents, defaults.word_dim, seed),
                                            synthetic_embeddings(corpus.documents, defaults.small_word_dim, seed + 1)}};
}

void check_structure(const CorefModel& model, const std::vector<Document>& docs, OverfitRun& run, std::uint64_t seed) {
  for (const Document& d : docs)
    for (bool training : {false, true}) {
      ComputationGraph cg(seed);
      const ForwardResult f = model.forward(cg, d, training);
      if (!f.antecedents.logits.value().col(0).isZero(0.0)) run.dummy_always_zero = false;
      const std::size_t expect =
          std::min(f.spans.size(), std::max<std::size_t>(1, static_cast<std::size_t>(0.4 * static_cast<double>(d.token_count()))));
      if (f.kept_spans.size() != expect) run.prune_counts_ok = false;
    }
}

OverfitRun overfit(const SyntheticSetup& setup, double lambda_detection) {
  OverfitRun run;
  CorefModel model(ModelConfig{}, setup.embeddings);
  TrainConfig tc;
  tc.lambda_detection = lambda_detection;
  tc.max_steps = 2000;
  tc.eval_every = 100;
  Trainer trainer(model, tc);
  const auto t0 = Clock::now();
  double eval_seconds = 0;
  auto evaluate = [&] {
    std::vector<Document> predicted;
    for (const Document& d : setup.docs) {
      const Clustering c = predict_document(model, d);
      for (const Cluster& cl : c.clusters())
        if (cl.size() < 2) run.no_singletons = false;
      predicted.push_back(with_predictions(d, c));
    }
    return conll_average(score_corpus(setup.docs, predicted)).average_f1;
  };
  TrainCallbacks cb;
  cb.on_eval = [&](std::int64_t step) {
    const double f1 = evaluate();
    run.best_f1 = std::max(run.best_f1, f1);
    if (f1 >= 0.95 && run.first_step_095 < 0) run.first_step_095 = step;
    if (f1 >= 0.90 && run.first_step_090 < 0) run.first_step_090 = step;
    const auto s0 = Clock::now();
    check_structure(model, setup.docs, run, static_cast<std::uint64_t>(step));
    eval_seconds += seconds_since(s0);
    std::cout << "  [lambda " << lambda_detection << "] step " << step << " train CoNLL F1 " << fmt("%.4f", f1)
              << std::endl;
  };
  trainer.train(setup.docs, cb);
  run.seconds = seconds_since(t0) - eval_seconds;
  run.final_f1 = evaluate();
  run.mentions = mention_detection_report(model, setup.docs, setup.docs);
  return run;
}

std::string width_summary(const MentionDetectionReport& r) {
  std::ostringstream os;
  for (const WidthRow& row : r.rows)
    if (row.frequency > 0) os << row.width << ":" << fmt("%.3f", row.accuracy()) << "(" << row.frequency << ") ";
  return os.str();
}

void structural_invariants(const OverfitRun& a, const OverfitRun& b) {
  std::mt19937_64 rng(100);
  bool counts = true;
  for (int k = 0; k < 100; ++k) {
    const Document d = test::random_document(rng, 6, 30);
    std::size_t closed = 0;
    for (const auto& s : d.sentences) {
      const std::size_t l = s.size(), w = std::min<std::size_t>(l, 10);
      closed += w * l - w * (w - 1) / 2;
    }
    if (enumerate_spans(d, 10).size() != closed) counts = false;
  }

  const SyntheticSetup setup = synthetic_setup();
  CorefModel zero(ModelConfig{}, setup.embeddings);
  zero.parameters().set_all_zero();
  bool empty = true;
  for (const Document& d : setup.docs)
    if (!predict_document(zero, d).empty()) empty = false;
  // a freshly initialized model as well, for the dummy score and pruning count
  OverfitRun fresh;
  CorefModel init(ModelConfig{}, setup.embeddings);
  check_structure(init, setup.docs, fresh, 99);

  const bool dummy = a.dummy_always_zero && b.dummy_always_zero && fresh.dummy_always_zero;
  const bool prune = a.prune_counts_ok && b.prune_counts_ok && fresh.prune_counts_ok;
  const bool singletons = a.no_singletons && b.no_singletons;
  std::ostringstream d;
  d << "dummy score 0 " << (dummy ? "yes" : "NO") << ", prune count max(1, floor(0.4T)) " << (prune ? "yes" : "NO")
    << ", closed-form span counts on 100 docs " << (counts ? "yes" : "NO") << ", no singletons "
    << (singletons ? "yes" : "NO") << ", zero model empty " << (empty ? "yes" : "NO");
  report("structural-invariants", dummy && prune && counts && singletons && empty, d.str());
}

void bootstrap_criterion() {
  std::mt19937_64 rng(50);
  std::vector<DocumentScores> sys, dominated, other;
  for (int k = 0; k < 50; ++k) {
    const Clustering gold = random_clustering(rng, 12, 4);
    const std::string key = "d" + std::to_string(k);
    const Clustering a = random_clustering(rng, 12, 4);
    sys.push_back(score_document(key, gold, gold));
    dominated.push_back(score_document(key, gold, Clustering()));
    other.push_back(score_document(key, gold, a));
  }
  double min_self = 1.0;
  double max_dominated = 0.0;
  for (auto metric :
       {BootstrapMetric::kMuc, BootstrapMetric::kBCubed, BootstrapMetric::kCeafPhi4, BootstrapMetric::kAverage}) {
    for (const auto* v : {&sys, &dominated, &other}) min_self = std::min(min_self, paired_bootstrap(*v, *v, metric));
    max_dominated = std::max(max_dominated, paired_bootstrap(sys, dominated, metric));
  }

  std::vector<DocumentScores> x, y;
  for (int k = 0; k < 50; ++k) {
    const Clustering gold = random_clustering(rng, 12, 4);
    const std::string key = "s" + std::to_string(k);
    x.push_back(score_document(key, gold, random_clustering(rng, 12, 4)));
    y.push_back(score_document(key, gold, random_clustering(rng, 12, 4)));
  }
  const double p1 = paired_bootstrap(x, y, BootstrapMetric::kAverage, 10000, 1);
  const double p2 = paired_bootstrap(x, y, BootstrapMetric::kAverage, 10000, 2);
  const bool ok = min_self >= 0.05 && max_dominated == 0.0 && std::abs(p1 - p2) <= 0.01;
  report("bootstrap", ok,
         "self-comparison min p " + fmt("%.4f", min_self) + " (>= 0.05), dominated p " + fmt("%.4f", max_dominated) +
             " (= 0), 50-doc comparison p " + fmt("%.4f", p1) + " vs " + fmt("%.4f", p2) + " across seeds (+-0.01)");
}

}  // namespace

int main() {
  conll_arithmetic();
  gradient_soundness();
  metric_oracles();
  bootstrap_criterion();

  const SyntheticSetup setup = synthetic_setup();
  std::cout << "  synthetic corpus: " << setup.docs.size() << " documents, vocabulary "
            << vocabulary(setup.docs).size() << std::endl;
  const OverfitRun with = overfit(setup, 0.1);
  const OverfitRun without = overfit(setup, 0.0);
  report("overfit-default", with.first_step_095 > 0 && with.seconds < 600,
         "CoNLL F1 >= 0.95 first at step " + std::to_string(with.first_step_095) + ", final " +
             fmt("%.4f", with.final_f1) + ", training time " + fmt("%.1f", with.seconds) + "s (< 600s)");
  report("overfit-no-detection-loss", without.first_step_090 > 0 && without.seconds < 600,
         "CoNLL F1 >= 0.90 first at step " + std::to_string(without.first_step_090) + ", final " +
             fmt("%.4f", without.final_f1) + ", training time " + fmt("%.1f", without.seconds) + "s (< 600s)");

  structural_invariants(with, without);

  bool all_one = true, dominated = true;
  for (std::size_t w = 0; w < with.mentions.rows.size(); ++w) {
    const WidthRow& row = with.mentions.rows[w];
    if (row.frequency > 0 && row.accuracy() != 1.0) all_one = false;
    if (without.mentions.rows[w].accuracy() > row.accuracy()) dominated = false;
  }
  report("mention-detection", all_one && dominated,
         "with detection loss " + width_summary(with.mentions) + "| without " + width_summary(without.mentions));

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
