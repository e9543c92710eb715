#include "candyman/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "candyman/errors.hpp"

namespace candyman {

namespace {

constexpr int kBruteForceDim = 10;

}  // namespace

KdTree::KdTree(Mat points) : points_(std::move(points)) {
  if (points_.rows() == 0) throw DataError("KdTree: empty input");
  std::vector<int> indices(points_.rows());
  std::iota(indices.begin(), indices.end(), 0);
  nodes_.reserve(points_.rows());
  root_ = build(indices, 0, static_cast<int>(indices.size()));
}

int KdTree::build(std::vector<int>& indices, int begin, int end) {
  if (begin >= end) return -1;
  const int node_id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin == 1) {
    nodes_[node_id].point_index = indices[begin];
    return node_id;
  }

  // Widest-spread dimension over this subset.
  int split_dim = 0;
  double widest = -1.0;
  for (int d = 0; d < dim(); ++d) {
    double lo = points_(indices[begin], d), hi = lo;
    for (int i = begin + 1; i < end; ++i) {
      const double v = points_(indices[i], d);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      split_dim = d;
    }
  }

  const int mid = begin + (end - begin) / 2;
  std::nth_element(indices.begin() + begin, indices.begin() + mid,
                   indices.begin() + end, [&](int a, int b) {
                     const double va = points_(a, split_dim);
                     const double vb = points_(b, split_dim);
                     return va != vb ? va < vb : a < b;
                   });

  const int point = indices[mid];
  const int left = build(indices, begin, mid);
  const int right = build(indices, mid + 1, end);
  Node& node = nodes_[node_id];
  node.split_dim = split_dim;
  node.split_value = points_(point, split_dim);
  node.point_index = point;
  node.left = left;
  node.right = right;
  return node_id;
}

void KdTree::search(int node_id, const Vec& q, int k,
                    std::vector<Candidate>& heap) const {
  if (node_id < 0) return;
  const Node& node = nodes_[node_id];

  const Candidate here{(points_.row(node.point_index).transpose() - q).squaredNorm(),
                       node.point_index};
  auto better = [](const Candidate& a, const Candidate& b) { return a < b; };
  if (static_cast<int>(heap.size()) < k) {
    heap.push_back(here);
    std::push_heap(heap.begin(), heap.end(), better);
  } else if (here < heap.front()) {
    std::pop_heap(heap.begin(), heap.end(), better);
    heap.back() = here;
    std::push_heap(heap.begin(), heap.end(), better);
  }

  if (node.split_dim < 0) return;  // leaf

  const double plane = q(node.split_dim) - node.split_value;
  const int near = plane <= 0.0 ? node.left : node.right;
  const int far = plane <= 0.0 ? node.right : node.left;
  search(near, q, k, heap);
  // The far side may still hold an equal-distance, lower-index point, so
  // prune only on a strict excess.
  if (static_cast<int>(heap.size()) < k || plane * plane <= heap.front().dist2)
    search(far, q, k, heap);
}

std::pair<int, double> KdTree::nearest(const Vec& q) const {
  auto result = k_nearest(q, 1);
  return result.front();
}

std::vector<std::pair<int, double>> KdTree::k_nearest(const Vec& q,
                                                      int k) const {
  if (k > size()) throw DataError("k_nearest: k exceeds point count");
  if (q.size() != dim()) throw DimensionMismatch("k_nearest: query dim");
  std::vector<Candidate> heap;
  heap.reserve(k);
  if (dim() > kBruteForceDim) {
    for (int i = 0; i < size(); ++i) {
      const Candidate here{(points_.row(i).transpose() - q).squaredNorm(), i};
      auto better = [](const Candidate& a, const Candidate& b) { return a < b; };
      if (static_cast<int>(heap.size()) < k) {
        heap.push_back(here);
        std::push_heap(heap.begin(), heap.end(), better);
      } else if (here < heap.front()) {
        std::pop_heap(heap.begin(), heap.end(), better);
        heap.back() = here;
        std::push_heap(heap.begin(), heap.end(), better);
      }
    }
  } else {
    search(root_, q, k, heap);
  }
  std::sort(heap.begin(), heap.end());
  std::vector<std::pair<int, double>> result;
  result.reserve(heap.size());
  for (const Candidate& c : heap)
    result.emplace_back(c.index, std::sqrt(c.dist2));
  return result;
}

}  // namespace candyman
