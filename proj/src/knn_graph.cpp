#include "candyman/knn_graph.hpp"

#include <algorithm>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "candyman/errors.hpp"
#include "candyman/kdtree.hpp"

namespace candyman {

KnnGraph build_knn_graph(const Mat& points, int k) {
  const int n = static_cast<int>(points.rows());
  if (k < 1 || k >= n) throw DataError("build_knn_graph: need 1 <= K < N");

  KdTree tree(points);
  std::vector<std::vector<int>> directed(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < n; ++i) {
    // Query K+1 and drop self (a duplicate point may rank before self).
    auto hits = tree.k_nearest(points.row(i).transpose(), k + 1);
    std::vector<int> neighbors;
    neighbors.reserve(k);
    for (const auto& [idx, dist] : hits) {
      if (idx == i) continue;
      neighbors.push_back(idx);
      if (static_cast<int>(neighbors.size()) == k) break;
    }
    directed[i] = std::move(neighbors);
  }

  KnnGraph graph;
  graph.k = k;
  graph.adjacency.assign(n, {});
  std::vector<std::set<int>> sym(n);
  for (int i = 0; i < n; ++i) {
    for (int j : directed[i]) {
      sym[i].insert(j);
      sym[j].insert(i);
    }
  }
  for (int i = 0; i < n; ++i)
    graph.adjacency[i].assign(sym[i].begin(), sym[i].end());
  return graph;
}

std::vector<ChartMembership> expand_clusters(const std::vector<int>& labels,
                                             const KnnGraph& graph,
                                             int rounds) {
  if (rounds < 0) throw DataError("expand_clusters: rounds must be >= 0");
  const int n = graph.size();
  int k = 0;
  for (int label : labels) k = std::max(k, label + 1);

  std::vector<ChartMembership> charts(k);
  for (int c = 0; c < k; ++c) {
    std::vector<char> member(n, 0);
    for (int i = 0; i < n; ++i)
      if (labels[i] == c) {
        member[i] = 1;
        charts[c].interior.push_back(i);
      }
    // One frontier sweep per round.
    std::vector<int> frontier = charts[c].interior;
    for (int round = 0; round < rounds; ++round) {
      std::vector<int> next;
      for (int i : frontier) {
        for (int j : graph.adjacency[i]) {
          if (!member[j]) {
            member[j] = 1;
            next.push_back(j);
            charts[c].border.push_back(j);
          }
        }
      }
      frontier = std::move(next);
    }
    std::sort(charts[c].border.begin(), charts[c].border.end());
  }
  return charts;
}

}  // namespace candyman
