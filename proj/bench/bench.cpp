// Micro-benchmark comparing the fast kernels (Eigen-vectorized, OpenMP where
// it pays off) against the plain serial reference implementations that the
// tests use as oracles. Prints wall time per call and the speedup; verifies
// both paths agree before timing.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "candyman/kdtree.hpp"
#include "candyman/mlp.hpp"
#include "candyman/reference.hpp"
#include "candyman/rng.hpp"

using namespace candyman;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_per_call(const std::function<void()>& fn, int reps) {
  fn();  // warm-up
  const auto start = Clock::now();
  for (int r = 0; r < reps; ++r) fn();
  return std::chrono::duration<double>(Clock::now() - start).count() / reps;
}

void row(const char* name, double fast, double slow) {
  std::printf("%-28s fast %10.3f us   reference %10.3f us   speedup %6.1fx\n",
              name, fast * 1e6, slow * 1e6, slow / fast);
}

}  // namespace

int main() {
  Rng rng(20240601);

  // --- MLP batch forward pass -------------------------------------------
  {
    const std::vector<int> dims = {64, 128, 64, 16, 3};
    Mlp mlp = glorot_init(
        dims, {Activation::Elu, Activation::Elu, Activation::Elu,
               Activation::Linear},
        rng.next_u64());
    const int batch = 1024;
    Mat xs(dims.front(), batch);
    for (int j = 0; j < batch; ++j)
      for (int i = 0; i < xs.rows(); ++i) xs(i, j) = rng.uniform(-1.0, 1.0);

    // Agreement check on one column.
    std::vector<double> x0(xs.rows());
    for (int i = 0; i < xs.rows(); ++i) x0[i] = xs(i, 0);
    const Vec fast_out = mlp.forward_batch(xs).col(0);
    const std::vector<double> slow_out = reference::forward(mlp, x0);
    for (int i = 0; i < fast_out.size(); ++i)
      if (std::abs(fast_out(i) - slow_out[i]) > 1e-12) {
        std::fprintf(stderr, "mlp forward mismatch\n");
        return 1;
      }

    const double fast = seconds_per_call([&] { mlp.forward_batch(xs); }, 20);
    const double slow = seconds_per_call(
        [&] {
          std::vector<double> x(xs.rows());
          for (int j = 0; j < batch; ++j) {
            for (int i = 0; i < xs.rows(); ++i) x[i] = xs(i, j);
            reference::forward(mlp, x);
          }
        },
        20);
    row("mlp forward (batch 1024)", fast, slow);
  }

  // --- k nearest neighbours ---------------------------------------------
  {
    const int n = 20000, dim = 3, k = 8, n_queries = 500;
    Mat points(n, dim);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < dim; ++j) points(i, j) = rng.uniform(-1.0, 1.0);
    KdTree tree(points);
    std::vector<Vec> queries;
    for (int q = 0; q < n_queries; ++q) {
      Vec query(dim);
      for (int j = 0; j < dim; ++j) query(j) = rng.uniform(-1.0, 1.0);
      queries.push_back(query);
    }
    for (const Vec& query : {queries[0], queries[1]}) {
      auto fast = tree.k_nearest(query, k);
      auto slow = reference::k_nearest(points, query, k);
      if (fast != slow) {
        std::fprintf(stderr, "k_nearest mismatch\n");
        return 1;
      }
    }
    const double fast = seconds_per_call(
        [&] {
          for (const Vec& query : queries) tree.k_nearest(query, k);
        },
        5);
    const double slow = seconds_per_call(
        [&] {
          for (const Vec& query : queries)
            reference::k_nearest(points, query, k);
        },
        5);
    row("k_nearest (20k pts, 500 q)", fast, slow);
  }

  return 0;
}
