#pragma once

#include <vector>

#include "bicoref/antecedent_model.h"
#include "bicoref/clustering.h"
#include "bicoref/model.h"

namespace bicoref {

// Chosen antecedent per kept span: a kept-list position or kDummy.
struct LinkDecision {
  std::vector<int> antecedent;
};

// Highest-scoring candidate if its score is strictly positive, else the dummy.
// Equal candidate scores go to the later (nearer) candidate.
LinkDecision predict_links(const AntecedentScores& scores);

// Transitive closure of the links; singletons are dropped.
Clustering form_clusters(const std::vector<Span>& kept, const LinkDecision& links);

// Full inference pass with dropout off.
Clustering predict_document(const CorefModel& model, const Document& doc);

// Copy of `doc` with predicted_clusters filled in.
Document with_predictions(const Document& doc, const Clustering& clustering);

}  // namespace bicoref
