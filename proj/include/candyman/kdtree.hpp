#pragma once

#include <utility>
#include <vector>

#include "candyman/linalg.hpp"

namespace candyman {

/// Exact nearest-neighbour search over the rows of a point matrix.
/// Balanced k-d tree, median split on the widest-spread dimension.
/// Immutable after construction; concurrent queries are safe.
///
/// Ties are always broken towards the lower point index, so results match
/// brute force exactly. Queries in dimension > 10 use brute force, where a
/// k-d tree no longer beats a linear scan.
class KdTree {
 public:
  explicit KdTree(Mat points);

  int size() const { return static_cast<int>(points_.rows()); }
  int dim() const { return static_cast<int>(points_.cols()); }
  const Mat& points() const { return points_; }

  /// (index, Euclidean distance) of the nearest point to q.
  std::pair<int, double> nearest(const Vec& q) const;

  /// K smallest distances ascending, ties by index. Throws if k > size.
  std::vector<std::pair<int, double>> k_nearest(const Vec& q, int k) const;

 private:
  struct Node {
    int split_dim = -1;   // -1 marks a leaf
    double split_value = 0.0;
    int point_index = -1;
    int left = -1, right = -1;
  };

  int build(std::vector<int>& indices, int begin, int end);

  // Best-first candidate bookkeeping for k_nearest.
  struct Candidate {
    double dist2;
    int index;
    bool operator<(const Candidate& o) const {
      return dist2 != o.dist2 ? dist2 < o.dist2 : index < o.index;
    }
  };

  void search(int node, const Vec& q, int k,
              std::vector<Candidate>& heap) const;

  Mat points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace candyman
