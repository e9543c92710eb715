#include "candyman/kmeans.hpp"

#include <limits>

#include "candyman/errors.hpp"
#include "candyman/rng.hpp"

namespace candyman {

namespace {

// k-means++ seeding: first centroid uniform, then points weighted by
// squared distance to the nearest chosen centroid.
Mat seed_centroids(const Mat& points, int k, Rng& rng) {
  const int n = static_cast<int>(points.rows());
  Mat centroids(k, points.cols());
  centroids.row(0) = points.row(rng.uniform_index(n));
  Vec d2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    int chosen = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (int i = 0; i < n; ++i) {
        target -= d2(i);
        if (target <= 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = static_cast<int>(rng.uniform_index(n));
    }
    centroids.row(c) = points.row(chosen);
    d2 = d2.cwiseMin(
        (points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

}  // namespace

KmeansResult kmeans(const Mat& points, int k, std::uint64_t seed,
                    int max_iters) {
  const int n = static_cast<int>(points.rows());
  if (k < 1 || k > n) throw DataError("kmeans: need 1 <= k <= N");

  Rng rng(seed);
  Mat centroids = seed_centroids(points, k, rng);
  std::vector<int> labels(n, -1);
  KmeansResult result;

  for (int iter = 0; iter < max_iters; ++iter) {
    // Assignment.
    bool changed = false;
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d2 = (points.row(i) - centroids.row(c)).squaredNorm();
        if (d2 < best_d2) {
          best_d2 = d2;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
      inertia += best_d2;
    }
    result.inertia = inertia;
    result.iterations = iter + 1;
    if (!changed && iter > 0) break;

    // Update.
    Mat sums = Mat::Zero(k, points.cols());
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(labels[i]) += points.row(i);
      counts[labels[i]] += 1;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centroids.row(c) = sums.row(c) / counts[c];
      } else {
        // Re-seed at the point farthest from its assigned centroid.
        int farthest = 0;
        double worst = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d2 =
              (points.row(i) - centroids.row(labels[i])).squaredNorm();
          if (d2 > worst) {
            worst = d2;
            farthest = i;
          }
        }
        centroids.row(c) = points.row(farthest);
      }
    }
  }

  result.labels = std::move(labels);
  result.centroids = std::move(centroids);
  return result;
}

}  // namespace candyman
