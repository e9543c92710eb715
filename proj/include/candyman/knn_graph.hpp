#pragma once

#include <vector>

#include "candyman/linalg.hpp"

namespace candyman {

/// Symmetrized K-nearest-neighbour graph: j in adj(i) iff j is among i's K
/// nearest or vice versa. No self loops; neighbour lists sorted ascending.
struct KnnGraph {
  std::vector<std::vector<int>> adjacency;
  int k = 0;

  int size() const { return static_cast<int>(adjacency.size()); }
};

/// Ties broken by lower index. Duplicate points are allowed (distance-0
/// edges permitted, self excluded). Requires K < N.
KnnGraph build_knn_graph(const Mat& points, int k);

struct ChartMembership {
  std::vector<int> interior;  // sorted dataset indices
  std::vector<int> border;    // sorted, disjoint from interior
};

/// interior(c) = {i : labels[i] = c}; border(c) = nodes within `rounds`
/// graph hops of the interior, minus the interior. A node may be border of
/// several charts.
std::vector<ChartMembership> expand_clusters(const std::vector<int>& labels,
                                             const KnnGraph& graph,
                                             int rounds);

}  // namespace candyman
