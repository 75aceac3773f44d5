#pragma once

#include <map>
#include <vector>

#include "bicoref/document.h"

namespace bicoref {

// Disjoint clusters of spans plus the mention -> cluster index map. Spans are
// sorted within each cluster and clusters by their first span.
class Clustering {
 public:
  Clustering() = default;
  // Throws std::invalid_argument if a span appears twice or a cluster is empty.
  explicit Clustering(std::vector<Cluster> clusters);

  const std::vector<Cluster>& clusters() const { return clusters_; }
  std::size_t size() const { return clusters_.size(); }
  bool empty() const { return clusters_.empty(); }
  std::size_t mention_count() const { return cluster_of_.size(); }
  // Cluster index of a mention, or -1.
  int cluster_of(const TokenSpan& span) const;
  const std::map<TokenSpan, int>& mentions() const { return cluster_of_; }

  bool operator==(const Clustering& other) const { return clusters_ == other.clusters_; }

 private:
  std::vector<Cluster> clusters_;
  std::map<TokenSpan, int> cluster_of_;
};

}  // namespace bicoref
