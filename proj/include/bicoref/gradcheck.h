#pragma once

#include <string>
#include <vector>

#include "bicoref/model.h"

namespace bicoref {

struct GradcheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor).
  double floor = 1e-4;
  double lambda_detection = 0.1;
  std::uint64_t dropout_seed = 7;
  // All-zero parameters (fresh biases) are moved to small seeded values first:
  // a zero bias on a row whose input is all zero sits exactly on a ReLU kink.
  bool jitter_zero_parameters = true;
  std::uint64_t jitter_seed = 5;
};

struct GradcheckGroup {
  std::string name;
  std::size_t checked = 0;
  double max_rel_error = 0;
  double max_abs_error = 0;
  bool passed = true;
};

struct GradcheckReport {
  std::vector<GradcheckGroup> groups;  // one per parameter, registration order
  double max_rel_error = 0;
  std::size_t checked = 0;
  double seconds = 0;
  bool passed = true;
};

// Two-sentence document with two clusters.
Document gradcheck_fixture();
// Small dimensions, every enumerated span kept so that pruning cannot flip
// under perturbation.
ModelConfig gradcheck_config();
FixedEmbeddings gradcheck_embeddings(const ModelConfig& config);

// Compares backward gradients of the combined loss (dropout on, fixed masks)
// with central finite differences for every scalar parameter.
GradcheckReport gradcheck(CorefModel& model, const Document& doc, const GradcheckOptions& options = {});

void write_gradcheck_report(std::ostream& os, const GradcheckReport& report, double tolerance);

}  // namespace bicoref
