#include <doctest.h>

#include <cmath>

#include "candyman/errors.hpp"
#include "candyman/fourier.hpp"
#include "candyman/systems.hpp"

using namespace candyman;

TEST_CASE("circle dataset: spacing, successors, dt") {
  Dataset data = gen_circle();
  REQUIRE(data.size() == 40);
  REQUIRE(data.ambient_dim() == 2);
  CHECK(data.dt == doctest::Approx(2.0 * M_PI / 40).epsilon(1e-15));
  for (int i = 0; i < 40; ++i) {
    CHECK(data.points.row(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
    const double angle =
        std::atan2(data.points(i, 1), data.points(i, 0));
    const double expected = std::remainder(2.0 * M_PI * i / 40, 2.0 * M_PI);
    CHECK(std::remainder(angle - expected, 2.0 * M_PI) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // successor of i is point i+1 (mod N)
    CHECK((data.successors.row(i) - data.points.row((i + 1) % 40)).norm() <
          1e-12);
  }
}

TEST_CASE("torus surface map against an independent formula") {
  for (double theta : {0.0, 0.4, 2.0, -1.3, 3.1}) {
    for (double phi : {0.0, 0.7, -2.2, 1.6}) {
      Vec p = torus_point(theta, phi);
      REQUIRE(p.size() == 3);
      CHECK(p(0) == doctest::Approx((1.0 + 0.5 * std::cos(theta)) *
                                    std::cos(phi)).epsilon(1e-14));
      CHECK(p(1) == doctest::Approx((1.0 + 0.5 * std::sin(theta)) *
                                    std::sin(phi)).epsilon(1e-14));
      CHECK(p(2) == doctest::Approx(0.5 * std::sin(theta)).epsilon(1e-14));
    }
  }
}

TEST_CASE("periodic torus orbit") {
  Dataset data = gen_torus_periodic();
  REQUIRE(data.size() == 100);
  for (int i = 0; i < 100; ++i) {
    const double phi = 2.0 * M_PI * i / 100;
    CHECK((data.points.row(i).transpose() - torus_point(3.0 * phi, phi)).norm() <
          1e-12);
    CHECK((data.successors.row(i) - data.points.row((i + 1) % 100)).norm() <
          1e-12);
  }
}

TEST_CASE("quasiperiodic torus orbit") {
  Dataset data = gen_torus_quasiperiodic();
  REQUIRE(data.size() == 1000);
  for (int i : {0, 1, 500, 999}) {
    const double phi = 3.0 * M_PI * i / 100;
    CHECK((data.points.row(i).transpose() -
           torus_point(std::sqrt(3.0) * phi, phi)).norm() < 1e-12);
  }
  // Successor of the last point continues the spiral rather than wrapping.
  const double phi_next = 3.0 * M_PI * 1000 / 100;
  CHECK((data.successors.row(999).transpose() -
         torus_point(std::sqrt(3.0) * phi_next, phi_next)).norm() < 1e-12);
}

TEST_CASE("shape/phase split is exact and zeroes the first-mode phase") {
  const int n = 64;
  Vec u(n);
  for (int j = 0; j < n; ++j) {
    const double x = 2.0 * M_PI * j / n;
    u(j) = std::cos(x - 0.9) + 0.4 * std::sin(2.0 * x + 0.3) - 0.2;
  }
  ShapePhase sp = shape_phase_split(u);
  CHECK(std::abs(std::arg(fourier_mode(sp.shape, 1))) < 1e-10);
  CHECK(sp.phase == doctest::Approx(-0.9).epsilon(1e-10));
  Vec back = shape_phase_reconstruct(sp.shape, sp.phase);
  CHECK((back - u).norm() < 1e-10);

  Vec no_mode1 = Vec::Zero(n);
  CHECK_THROWS_AS(shape_phase_split(no_mode1), DataError);
}

TEST_CASE("series split unwraps the phase continuously") {
  const int n = 64, steps = 50;
  Mat fields(steps, n);
  for (int t = 0; t < steps; ++t) {
    const double phase = 0.4 * t;  // winds past pi repeatedly (recovered phase is +0.4 per step)
    for (int j = 0; j < n; ++j) {
      const double x = 2.0 * M_PI * j / n;
      fields(t, j) = std::cos(x + phase) + 0.3 * std::cos(2.0 * x);
    }
  }
  ShapePhaseSeries series = shape_phase_split_series(fields);
  REQUIRE(series.phases.size() == steps);
  for (int t = 1; t < steps; ++t) {
    const double delta = series.phases(t) - series.phases(t - 1);
    CHECK(std::abs(delta) < M_PI);
    CHECK(delta == doctest::Approx(0.4).epsilon(1e-8));
  }
  // Each shape row reconstructs its field.
  for (int t : {0, 25, steps - 1}) {
    Vec back = shape_phase_reconstruct(series.shapes.row(t).transpose(),
                                       series.phases(t));
    CHECK((back - fields.row(t).transpose()).norm() < 1e-9);
  }
}

TEST_CASE("bursting dynamics dataset has the documented shape") {
  KsDatasetRecipe recipe;
  recipe.nu = 16.0 / 71.0;
  recipe.sample_spacing = 0.05;
  recipe.n_samples = 9;
  recipe.transient_time = 1.0;
  Dataset base = gen_ks_dataset(recipe);
  REQUIRE(base.size() == 9);

  BurstingDynamicsData burst = gen_bursting_dynamics_dataset(base, 7);
  // Every third sample seeds one perturbed trajectory.
  const int expected = 3;
  CHECK(static_cast<int>(burst.trajectories.size()) + burst.skipped == expected);
  for (const Mat& traj : burst.trajectories) {
    CHECK(traj.rows() == 21);
    CHECK(traj.cols() == 64);
  }
  CHECK(burst.pairs.size() ==
        20 * static_cast<int>(burst.trajectories.size()));
  CHECK(burst.pairs.dt == doctest::Approx(0.05).epsilon(1e-12));
  // Pairs are consecutive rows of the kept trajectories.
  const Mat& first = burst.trajectories.front();
  CHECK((burst.pairs.points.row(0) - first.row(0)).norm() == 0.0);
  CHECK((burst.pairs.successors.row(0) - first.row(1)).norm() == 0.0);

  // Deterministic in the seed.
  BurstingDynamicsData again = gen_bursting_dynamics_dataset(base, 7);
  CHECK((again.pairs.points - burst.pairs.points).norm() == 0.0);
}
