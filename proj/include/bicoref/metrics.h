#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bicoref/clustering.h"
#include "bicoref/model.h"

namespace bicoref {

struct PRF {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

PRF make_prf(double precision, double recall);

// Numerators and denominators of one metric, summed over documents for
// corpus-level scores.
struct MetricCounts {
  double precision_num = 0;
  double precision_den = 0;
  double recall_num = 0;
  double recall_den = 0;

  MetricCounts& operator+=(const MetricCounts& other);
  // A zero denominator gives 0.
  PRF prf() const;
};

MetricCounts muc_counts(const Clustering& gold, const Clustering& sys);
MetricCounts b_cubed_counts(const Clustering& gold, const Clustering& sys);
MetricCounts ceaf_phi4_counts(const Clustering& gold, const Clustering& sys);

inline PRF muc(const Clustering& gold, const Clustering& sys) { return muc_counts(gold, sys).prf(); }
inline PRF b_cubed(const Clustering& gold, const Clustering& sys) { return b_cubed_counts(gold, sys).prf(); }
inline PRF ceaf_phi4(const Clustering& gold, const Clustering& sys) { return ceaf_phi4_counts(gold, sys).prf(); }

// 2 |K n R| / (|K| + |R|)
double phi4(const Cluster& key, const Cluster& response);

// Maximum-weight one-to-one assignment on a rectangular matrix. Entry r is the
// column matched to row r, or -1 when rows outnumber columns.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights);

struct DocumentScores {
  std::string doc_key;
  MetricCounts muc;
  MetricCounts b_cubed;
  MetricCounts ceaf_phi4;
};

DocumentScores score_document(const std::string& doc_key, const Clustering& gold, const Clustering& sys);

struct EvalReport {
  PRF muc;
  PRF b_cubed;
  PRF ceaf_phi4;
  double average_f1 = 0;
  std::vector<DocumentScores> documents;
};

double conll_average(double muc_f1, double b_cubed_f1, double ceaf_f1);
// Micro-averaged corpus report.
EvalReport conll_average(const std::vector<DocumentScores>& documents);

// Pairs gold and system documents by doc_key. System clusters are
// predicted_clusters when present, else clusters. Throws std::invalid_argument
// naming every unmatched key.
std::vector<DocumentScores> score_corpus(const std::vector<Document>& gold, const std::vector<Document>& sys);

enum class BootstrapMetric { kMuc, kBCubed, kCeafPhi4, kAverage };

double corpus_metric(const std::vector<const DocumentScores*>& documents, BootstrapMetric metric);

// Fraction of document resamples in which `b` scores at least as well as `a`.
double paired_bootstrap(const std::vector<DocumentScores>& a, const std::vector<DocumentScores>& b,
                        BootstrapMetric metric, std::size_t resamples = 10000, std::uint64_t seed = 1);

struct WidthRow {
  int width = 0;  // the last row also holds every wider mention
  std::size_t frequency = 0;
  std::size_t detected = 0;
  double accuracy() const { return frequency == 0 ? 0.0 : static_cast<double>(detected) / static_cast<double>(frequency); }
};

struct MentionDetectionReport {
  std::vector<WidthRow> rows;
  std::size_t total_gold = 0;
  std::vector<std::string> detected_seen;   // text also a training gold mention
  std::vector<std::string> detected_novel;
};

inline constexpr int kReportWidths = 10;

// Gold mentions count as detected when their mention score is positive.
MentionDetectionReport mention_detection_report(const CorefModel& model, const std::vector<Document>& docs,
                                                const std::vector<Document>& training_docs);

struct BootstrapResult {
  double muc = 1;
  double b_cubed = 1;
  double ceaf_phi4 = 1;
  double average = 1;
};

void write_report_table(std::ostream& os, const EvalReport& report,
                        const std::optional<BootstrapResult>& p_values = std::nullopt);
nlohmann::ordered_json report_json(const EvalReport& report,
                                   const std::optional<BootstrapResult>& p_values = std::nullopt);
void write_width_csv(std::ostream& os, const MentionDetectionReport& report);
nlohmann::ordered_json mention_report_json(const MentionDetectionReport& report);

}  // namespace bicoref
