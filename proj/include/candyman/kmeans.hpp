#pragma once

#include <cstdint>
#include <vector>

#include "candyman/linalg.hpp"

namespace candyman {

struct KmeansResult {
  std::vector<int> labels;  // N values in [0, k)
  Mat centroids;            // k x m
  int iterations = 0;
  double inertia = 0.0;     // sum of squared distances to assigned centroid
};

/// Lloyd iterations from k-means++ seeding until the assignment reaches a
/// fixpoint or max_iters. An emptied cluster is re-seeded at the point
/// farthest from its assigned centroid. Deterministic given seed.
KmeansResult kmeans(const Mat& points, int k, std::uint64_t seed,
                    int max_iters = 300);

}  // namespace candyman
