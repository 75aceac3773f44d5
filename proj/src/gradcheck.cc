#include "bicoref/gradcheck.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "bicoref/training.h"

namespace bicoref {

Document gradcheck_fixture() {
  Document doc;
  doc.doc_key = "fixture/gradcheck";
  doc.genre = "nw";
  doc.sentences = {{"Mary", "met", "the", "old", "sailor", "."}, {"She", "thanked", "him", "warmly", "."}};
  doc.speakers = {{"-", "-", "-", "-", "-", "-"}, {"-", "-", "-", "-", "-"}};
  doc.clusters = {{{0, 0}, {6, 6}}, {{2, 4}, {8, 8}}};
  return doc;
}

ModelConfig gradcheck_config() {
  ModelConfig c;
  c.word_dim = 4;
  c.small_word_dim = 3;
  c.char_dim = 3;
  c.char_kernels = 2;
  c.char_windows = {2, 3};
  c.lstm_hidden = 3;
  c.ffnn_hidden = 4;
  c.ffnn_layers = 2;
  c.feature_dim = 2;
  c.max_span_width = 3;
  c.prune_ratio = 10.0;
  c.init_seed = 3;
  return c;
}

FixedEmbeddings gradcheck_embeddings(const ModelConfig& config) {
  const std::vector<Document> docs{gradcheck_fixture()};
  return FixedEmbeddings{synthetic_embeddings(docs, config.word_dim, 11),
                         synthetic_embeddings(docs, config.small_word_dim, 12)};
}

GradcheckReport gradcheck(CorefModel& model, const Document& doc, const GradcheckOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  auto loss_at = [&]() {
    ComputationGraph cg(options.dropout_seed);
    return combined_loss(cg, model, doc, options.lambda_detection, true).loss.scalar();
  };

  ParameterStore& store = model.parameters();
  if (options.jitter_zero_parameters) {
    std::mt19937_64 rng(options.jitter_seed);
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    for (Parameter* p : store.all())
      if (p->value.isZero(0.0))
        for (Eigen::Index k = 0; k < p->value.size(); ++k) p->value.data()[k] = jitter(rng);
  }
  store.zero_grad();
  {
    ComputationGraph cg(options.dropout_seed);
    const LossTerms terms = combined_loss(cg, model, doc, options.lambda_detection, true);
    cg.backward(terms.loss);
  }

  GradcheckReport report;
  for (Parameter* p : store.all()) {
    GradcheckGroup group;
    group.name = p->name;
    for (Eigen::Index k = 0; k < p->value.size(); ++k) {
      double& x = p->value.data()[k];
      const double saved = x;
      x = saved + options.step;
      const double up = loss_at();
      x = saved - options.step;
      const double down = loss_at();
      x = saved;
      const double numeric = (up - down) / (2 * options.step);
      const double analytic = p->grad.data()[k];
      const double abs_err = std::abs(analytic - numeric);
      const double rel = abs_err / std::max({std::abs(analytic), std::abs(numeric), options.floor});
      group.max_abs_error = std::max(group.max_abs_error, abs_err);
      group.max_rel_error = std::max(group.max_rel_error, rel);
      ++group.checked;
    }
    group.passed = group.max_rel_error < options.tolerance;
    report.passed = report.passed && group.passed;
    report.max_rel_error = std::max(report.max_rel_error, group.max_rel_error);
    report.checked += group.checked;
    report.groups.push_back(group);
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_gradcheck_report(std::ostream& os, const GradcheckReport& report, double tolerance) {
  std::size_t width = 10;
  for (const auto& g : report.groups) width = std::max(width, g.name.size());
  os << std::left << std::setw(static_cast<int>(width) + 2) << "parameter" << std::right << std::setw(8) << "count"
     << std::setw(14) << "max_rel_err" << std::setw(14) << "max_abs_err" << "  status\n";
  for (const auto& g : report.groups)
    os << std::left << std::setw(static_cast<int>(width) + 2) << g.name << std::right << std::setw(8) << g.checked
       << std::setw(14) << std::scientific << std::setprecision(3) << g.max_rel_error << std::setw(14)
       << g.max_abs_error << std::defaultfloat << "  " << (g.passed ? "ok" : "FAIL") << '\n';
  os << "checked " << report.checked << " scalars in " << report.groups.size() << " parameter groups, max relative error "
     << std::scientific << std::setprecision(3) << report.max_rel_error << std::defaultfloat << " (tolerance "
     << tolerance << ", " << std::fixed << std::setprecision(1) << report.seconds << "s): "
     << (report.passed ? "PASS" : "FAIL") << '\n'
     << std::defaultfloat;
}

}  // namespace bicoref
