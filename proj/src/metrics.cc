#include "bicoref/metrics.h"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bicoref/span_model.h"

namespace bicoref {

PRF make_prf(double precision, double recall) {
  PRF out{precision, recall, 0.0};
  if (precision + recall > 0) out.f1 = 2 * precision * recall / (precision + recall);
  return out;
}

MetricCounts& MetricCounts::operator+=(const MetricCounts& other) {
  precision_num += other.precision_num;
  precision_den += other.precision_den;
  recall_num += other.recall_num;
  recall_den += other.recall_den;
  return *this;
}

PRF MetricCounts::prf() const {
  return make_prf(precision_den > 0 ? precision_num / precision_den : 0.0,
                  recall_den > 0 ? recall_num / recall_den : 0.0);
}

namespace {

// Sum of |K| - |p(K)| and of |K| - 1 over key clusters, partitioning each key
// by the response; unaligned mentions are parts of their own.
std::pair<double, double> muc_side(const Clustering& key, const Clustering& response) {
  double num = 0, den = 0;
  for (const Cluster& k : key.clusters()) {
    std::set<int> parts;
    int own = 0;
    for (const TokenSpan& s : k) {
      const int r = response.cluster_of(s);
      if (r < 0)
        ++own;
      else
        parts.insert(r);
    }
    num += static_cast<double>(k.size()) - static_cast<double>(parts.size() + static_cast<std::size_t>(own));
    den += static_cast<double>(k.size()) - 1.0;
  }
  return {num, den};
}

std::size_t overlap(const Cluster& a, const Cluster& b) {
  std::size_t n = 0;
  for (const TokenSpan& s : a)
    if (std::find(b.begin(), b.end(), s) != b.end()) ++n;
  return n;
}

std::pair<double, double> b_cubed_side(const Clustering& key, const Clustering& response) {
  double num = 0;
  for (const Cluster& k : key.clusters())
    for (const TokenSpan& s : k) {
      const int r = response.cluster_of(s);
      if (r < 0) continue;
      num += static_cast<double>(overlap(k, response.clusters()[static_cast<std::size_t>(r)])) /
             static_cast<double>(k.size());
    }
  return {num, static_cast<double>(key.mention_count())};
}

}  // namespace

MetricCounts muc_counts(const Clustering& gold, const Clustering& sys) {
  MetricCounts c;
  std::tie(c.recall_num, c.recall_den) = muc_side(gold, sys);
  std::tie(c.precision_num, c.precision_den) = muc_side(sys, gold);
  return c;
}

MetricCounts b_cubed_counts(const Clustering& gold, const Clustering& sys) {
  MetricCounts c;
  std::tie(c.recall_num, c.recall_den) = b_cubed_side(gold, sys);
  std::tie(c.precision_num, c.precision_den) = b_cubed_side(sys, gold);
  return c;
}

double phi4(const Cluster& key, const Cluster& response) {
  return 2.0 * static_cast<double>(overlap(key, response)) / static_cast<double>(key.size() + response.size());
}

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights) {
  const std::size_t rows = weights.size();
  if (rows == 0) return {};
  const std::size_t cols = weights[0].size();
  for (const auto& row : weights)
    if (row.size() != cols) throw std::invalid_argument("assignment matrix rows differ in length");
  if (cols == 0) return std::vector<int>(rows, -1);
  if (rows > cols) {
    std::vector<std::vector<double>> t(cols, std::vector<double>(rows));
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) t[c][r] = weights[r][c];
    const std::vector<int> by_col = max_weight_assignment(t);
    std::vector<int> out(rows, -1);
    for (std::size_t c = 0; c < cols; ++c) out[static_cast<std::size_t>(by_col[c])] = static_cast<int>(c);
    return out;
  }
  // Shortest augmenting path with potentials on cost = -weight, n <= m.
  const std::size_t n = rows, m = cols;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(m + 1, 0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = -weights[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> out(n, -1);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) out[p[j] - 1] = static_cast<int>(j - 1);
  return out;
}

MetricCounts ceaf_phi4_counts(const Clustering& gold, const Clustering& sys) {
  std::vector<std::vector<double>> sim(gold.size(), std::vector<double>(sys.size()));
  for (std::size_t i = 0; i < gold.size(); ++i)
    for (std::size_t j = 0; j < sys.size(); ++j) sim[i][j] = phi4(gold.clusters()[i], sys.clusters()[j]);
  double total = 0;
  const std::vector<int> match = max_weight_assignment(sim);
  for (std::size_t i = 0; i < match.size(); ++i)
    if (match[i] >= 0) total += sim[i][static_cast<std::size_t>(match[i])];
  MetricCounts c;
  c.recall_num = c.precision_num = total;
  c.recall_den = static_cast<double>(gold.size());
  c.precision_den = static_cast<double>(sys.size());
  return c;
}

DocumentScores score_document(const std::string& doc_key, const Clustering& gold, const Clustering& sys) {
  return DocumentScores{doc_key, muc_counts(gold, sys), b_cubed_counts(gold, sys), ceaf_phi4_counts(gold, sys)};
}

double conll_average(double muc_f1, double b_cubed_f1, double ceaf_f1) {
  return (muc_f1 + b_cubed_f1 + ceaf_f1) / 3.0;
}

EvalReport conll_average(const std::vector<DocumentScores>& documents) {
  MetricCounts m, b, c;
  for (const DocumentScores& d : documents) {
    m += d.muc;
    b += d.b_cubed;
    c += d.ceaf_phi4;
  }
  EvalReport out;
  out.muc = m.prf();
  out.b_cubed = b.prf();
  out.ceaf_phi4 = c.prf();
  out.average_f1 = conll_average(out.muc.f1, out.b_cubed.f1, out.ceaf_phi4.f1);
  out.documents = documents;
  return out;
}

std::vector<DocumentScores> score_corpus(const std::vector<Document>& gold, const std::vector<Document>& sys) {
  std::map<std::string, const Document*> by_key;
  for (const Document& d : sys) by_key[d.doc_key] = &d;
  std::vector<std::string> missing;
  std::set<std::string> gold_keys;
  std::vector<DocumentScores> out;
  for (const Document& g : gold) {
    gold_keys.insert(g.doc_key);
    auto it = by_key.find(g.doc_key);
    if (it == by_key.end()) {
      missing.push_back(g.doc_key);
      continue;
    }
    const Document& s = *it->second;
    out.push_back(score_document(g.doc_key, Clustering(g.clusters),
                                 Clustering(s.predicted_clusters ? *s.predicted_clusters : s.clusters)));
  }
  for (const Document& s : sys)
    if (!gold_keys.count(s.doc_key)) missing.push_back(s.doc_key);
  if (!missing.empty()) {
    std::string msg = "doc_key mismatch between gold and system:";
    for (const auto& k : missing) msg += " " + k;
    throw std::invalid_argument(msg);
  }
  return out;
}

double corpus_metric(const std::vector<const DocumentScores*>& documents, BootstrapMetric metric) {
  MetricCounts m, b, c;
  for (const DocumentScores* d : documents) {
    m += d->muc;
    b += d->b_cubed;
    c += d->ceaf_phi4;
  }
  switch (metric) {
    case BootstrapMetric::kMuc:
      return m.prf().f1;
    case BootstrapMetric::kBCubed:
      return b.prf().f1;
    case BootstrapMetric::kCeafPhi4:
      return c.prf().f1;
    case BootstrapMetric::kAverage:
      return conll_average(m.prf().f1, b.prf().f1, c.prf().f1);
  }
  return 0;
}

double paired_bootstrap(const std::vector<DocumentScores>& a, const std::vector<DocumentScores>& b,
                        BootstrapMetric metric, std::size_t resamples, std::uint64_t seed) {
  if (a.empty() || b.empty()) throw std::invalid_argument("bootstrap needs non-empty score lists");
  if (a.size() != b.size()) throw std::invalid_argument("bootstrap score lists differ in length");
  if (resamples == 0) throw std::invalid_argument("bootstrap needs at least one resample");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, a.size() - 1);
  std::vector<const DocumentScores*> sa(a.size()), sb(b.size());
  std::size_t b_wins = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::size_t k = pick(rng);
      sa[i] = &a[k];
      sb[i] = &b[k];
    }
    if (corpus_metric(sb, metric) >= corpus_metric(sa, metric)) ++b_wins;
  }
  return static_cast<double>(b_wins) / static_cast<double>(resamples);
}

MentionDetectionReport mention_detection_report(const CorefModel& model, const std::vector<Document>& docs,
                                                const std::vector<Document>& training_docs) {
  std::set<std::string> seen;
  for (const Document& d : training_docs)
    for (const Cluster& c : d.clusters)
      for (const TokenSpan& s : c) seen.insert(d.span_text(s));

  MentionDetectionReport out;
  for (int w = 1; w <= kReportWidths; ++w) out.rows.push_back(WidthRow{w, 0, 0});
  for (const Document& doc : docs) {
    ComputationGraph cg;
    const ForwardResult fwd = model.forward(cg, doc, false);
    std::map<TokenSpan, double> score_of;
    const Matrix& m = fwd.mention_scores.value();
    for (std::size_t i = 0; i < fwd.spans.size(); ++i)
      score_of[TokenSpan{fwd.spans[i].start, fwd.spans[i].end}] = m(static_cast<Eigen::Index>(i), 0);
    for (const Cluster& c : doc.clusters)
      for (const TokenSpan& s : c) {
        WidthRow& row = out.rows[static_cast<std::size_t>(std::min(s.width(), kReportWidths) - 1)];
        ++row.frequency;
        ++out.total_gold;
        auto it = score_of.find(s);
        if (it == score_of.end() || it->second <= 0) continue;
        ++row.detected;
        const std::string text = doc.span_text(s);
        (seen.count(text) ? out.detected_seen : out.detected_novel).push_back(text);
      }
  }
  return out;
}

namespace {

std::string fixed3(double x) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << x;
  return os.str();
}

nlohmann::ordered_json prf_json(const PRF& p) {
  return {{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

}  // namespace

void write_report_table(std::ostream& os, const EvalReport& report, const std::optional<BootstrapResult>& p_values) {
  const int w = 8;
  os << std::left << std::setw(10) << "" << std::right << std::setw(3 * w) << "MUC" << std::setw(3 * w) << "B3"
     << std::setw(3 * w) << "CEAF_phi4" << std::setw(w + 2) << "" << '\n';
  os << std::left << std::setw(10) << "";
  for (int k = 0; k < 3; ++k) os << std::right << std::setw(w) << "P" << std::setw(w) << "R" << std::setw(w) << "F1";
  os << std::setw(w + 2) << "Avg. F1" << '\n';
  os << std::left << std::setw(10) << "system";
  for (const PRF* p : {&report.muc, &report.b_cubed, &report.ceaf_phi4})
    os << std::right << std::setw(w) << fixed3(p->precision) << std::setw(w) << fixed3(p->recall) << std::setw(w)
       << fixed3(p->f1);
  os << std::setw(w + 2) << fixed3(report.average_f1) << '\n';
  if (p_values) {
    os << std::left << std::setw(10) << "p-value" << std::right;
    for (double p : {p_values->muc, p_values->b_cubed, p_values->ceaf_phi4})
      os << std::setw(w) << "" << std::setw(w) << "" << std::setw(w) << fixed3(p);
    os << std::setw(w + 2) << fixed3(p_values->average) << '\n';
  }
  os << "documents: " << report.documents.size() << '\n';
}

nlohmann::ordered_json report_json(const EvalReport& report, const std::optional<BootstrapResult>& p_values) {
  nlohmann::ordered_json j;
  j["muc"] = prf_json(report.muc);
  j["b_cubed"] = prf_json(report.b_cubed);
  j["ceaf_phi4"] = prf_json(report.ceaf_phi4);
  j["average_f1"] = report.average_f1;
  if (p_values)
    j["bootstrap_p"] = {{"muc", p_values->muc},
                        {"b_cubed", p_values->b_cubed},
                        {"ceaf_phi4", p_values->ceaf_phi4},
                        {"average_f1", p_values->average}};
  auto& docs = j["documents"] = nlohmann::ordered_json::array();
  for (const DocumentScores& d : report.documents)
    docs.push_back({{"doc_key", d.doc_key},
                    {"muc", prf_json(d.muc.prf())},
                    {"b_cubed", prf_json(d.b_cubed.prf())},
                    {"ceaf_phi4", prf_json(d.ceaf_phi4.prf())}});
  return j;
}

void write_width_csv(std::ostream& os, const MentionDetectionReport& report) {
  os << "width,frequency,accuracy\n";
  for (const WidthRow& r : report.rows) os << r.width << ',' << r.frequency << ',' << r.accuracy() << '\n';
}

nlohmann::ordered_json mention_report_json(const MentionDetectionReport& report) {
  nlohmann::ordered_json j;
  j["total_gold"] = report.total_gold;
  auto& rows = j["widths"] = nlohmann::ordered_json::array();
  for (const WidthRow& r : report.rows)
    rows.push_back({{"width", r.width}, {"frequency", r.frequency}, {"detected", r.detected}, {"accuracy", r.accuracy()}});
  j["detected_seen"] = report.detected_seen;
  j["detected_novel"] = report.detected_novel;
  return j;
}

}  // namespace bicoref
