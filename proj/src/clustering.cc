#include "bicoref/clustering.h"

#include <algorithm>
#include <stdexcept>

namespace bicoref {

Clustering::Clustering(std::vector<Cluster> clusters) : clusters_(std::move(clusters)) {
  for (Cluster& c : clusters_) {
    if (c.empty()) throw std::invalid_argument("empty cluster");
    std::sort(c.begin(), c.end());
  }
  std::sort(clusters_.begin(), clusters_.end(), [](const Cluster& a, const Cluster& b) { return a.front() < b.front(); });
  for (std::size_t i = 0; i < clusters_.size(); ++i)
    for (const TokenSpan& s : clusters_[i])
      if (!cluster_of_.emplace(s, static_cast<int>(i)).second)
        throw std::invalid_argument("span (" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                                    ") belongs to more than one cluster");
}

int Clustering::cluster_of(const TokenSpan& span) const {
  auto it = cluster_of_.find(span);
  return it == cluster_of_.end() ? -1 : it->second;
}

}  // namespace bicoref
