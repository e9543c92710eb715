#include <doctest.h>

#include "candyman/kdtree.hpp"
#include "candyman/reference.hpp"
#include "candyman/rng.hpp"

using namespace candyman;

TEST_CASE("k-d tree matches brute force on random instances") {
  Rng rng(1234);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_index(40));
    const int dim = 1 + static_cast<int>(rng.uniform_index(13));  // crosses the
                                                                  // brute-force
                                                                  // cutoff at 10
    Mat points(n, dim);
    for (int i = 0; i < points.size(); ++i)
      points(i) = rng.uniform(-1.0, 1.0);
    // Duplicate some rows to force distance ties.
    for (int i = 1; i < n; i += 3) points.row(i) = points.row(i - 1);

    KdTree tree(points);
    const int queries = 4;
    for (int q = 0; q < queries; ++q) {
      Vec query(dim);
      if (q == 0 && n > 1) {
        query = points.row(static_cast<int>(rng.uniform_index(n))).transpose();
      } else {
        for (int i = 0; i < dim; ++i) query(i) = rng.uniform(-1.2, 1.2);
      }
      const int k = 1 + static_cast<int>(rng.uniform_index(n));
      auto fast = tree.k_nearest(query, k);
      auto slow = reference::k_nearest(points, query, k);
      REQUIRE(fast.size() == slow.size());
      for (std::size_t i = 0; i < fast.size(); ++i) {
        CHECK(fast[i].first == slow[i].first);
        CHECK(fast[i].second == doctest::Approx(slow[i].second).epsilon(1e-12));
      }
      auto [ni, nd] = tree.nearest(query);
      CHECK(ni == slow[0].first);
      CHECK(nd == doctest::Approx(slow[0].second).epsilon(1e-12));
    }
  }
}

TEST_CASE("k-d tree tie-breaking prefers the lower index") {
  Mat points(4, 2);
  points << 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 2.0;
  KdTree tree(points);
  Vec origin = Vec::Zero(2);
  auto res = tree.k_nearest(origin, 3);
  REQUIRE(res.size() == 3);
  CHECK(res[0].first == 0);  // ties at distance 1: indices 0, 1, 2
  CHECK(res[1].first == 1);
  CHECK(res[2].first == 2);
}

TEST_CASE("k-d tree rejects k beyond the point count") {
  Mat points = Mat::Random(5, 3);
  KdTree tree(points);
  CHECK_THROWS(tree.k_nearest(Vec::Zero(3), 6));
}

TEST_CASE("k-d tree on a single point") {
  Mat points(1, 4);
  points << 1.0, 2.0, 3.0, 4.0;
  KdTree tree(points);
  auto [idx, dist] = tree.nearest(Vec::Zero(4));
  CHECK(idx == 0);
  CHECK(dist == doctest::Approx(points.row(0).norm()).epsilon(1e-14));
}
