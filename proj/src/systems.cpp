#include "candyman/systems.hpp"

#include <cmath>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "candyman/errors.hpp"
#include "candyman/rng.hpp"

namespace candyman {

Dataset gen_circle(int n) {
  if (n < 2) throw DataError("gen_circle: need N >= 2");
  Dataset ds;
  ds.points.resize(n, 2);
  ds.successors.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * M_PI * i / n;
    ds.points(i, 0) = std::cos(theta);
    ds.points(i, 1) = std::sin(theta);
  }
  for (int i = 0; i < n; ++i) ds.successors.row(i) = ds.points.row((i + 1) % n);
  ds.dt = 2.0 * M_PI / n;
  return ds;
}

Vec torus_point(double theta, double phi) {
  Vec p(3);
  p(0) = (1.0 + 0.5 * std::cos(theta)) * std::cos(phi);
  p(1) = (1.0 + 0.5 * std::sin(theta)) * std::sin(phi);
  p(2) = 0.5 * std::sin(theta);
  return p;
}

Dataset gen_torus_periodic(int n) {
  if (n < 2) throw DataError("gen_torus_periodic: need N >= 2");
  Dataset ds;
  ds.points.resize(n, 3);
  ds.successors.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * M_PI * i / n;
    ds.points.row(i) = torus_point(3.0 * phi, phi).transpose();
  }
  for (int i = 0; i < n; ++i) ds.successors.row(i) = ds.points.row((i + 1) % n);
  ds.dt = 1.0;
  return ds;
}

Dataset gen_torus_quasiperiodic(int n) {
  if (n < 2) throw DataError("gen_torus_quasiperiodic: need N >= 2");
  Dataset ds;
  ds.points.resize(n, 3);
  ds.successors.resize(n, 3);
  const double spacing = 3.0 * M_PI / 100.0;
  const double ratio = std::sqrt(3.0);
  for (int i = 0; i <= n; ++i) {
    const double phi = spacing * i;
    const Vec p = torus_point(ratio * phi, phi);
    if (i < n) ds.points.row(i) = p.transpose();
    if (i > 0) ds.successors.row(i - 1) = p.transpose();
  }
  ds.dt = 1.0;
  return ds;
}

Dataset gen_ks_dataset(const KsDatasetRecipe& recipe) {
  KsConfig config;
  config.nu = recipe.nu;
  config.dt = recipe.dt;
  config.n_modes = recipe.n_modes;

  const long steps_per_sample =
      std::lround(recipe.sample_spacing / recipe.dt);
  const long transient_steps = std::lround(recipe.transient_time / recipe.dt);

  KsSolver solver(config, KsSolver::default_initial_condition(recipe.n_modes));
  solver.advance(transient_steps);

  Dataset ds;
  ds.points.resize(recipe.n_samples, recipe.n_modes);
  ds.successors.resize(recipe.n_samples, recipe.n_modes);
  ds.dt = recipe.sample_spacing;
  for (int i = 0; i <= recipe.n_samples; ++i) {
    const Vec u = solver.field();
    if (i < recipe.n_samples) ds.points.row(i) = u.transpose();
    if (i > 0) ds.successors.row(i - 1) = u.transpose();
    if (i < recipe.n_samples) solver.advance(steps_per_sample);
  }
  return ds;
}

ShapePhase shape_phase_split(const Vec& u) {
  const std::complex<double> c1 = fourier_mode(u, 1);
  if (std::abs(c1) < 1e-14)
    throw DataError("shape_phase_split: first Fourier mode vanishes");
  ShapePhase sp;
  sp.phase = std::arg(c1);
  sp.shape = fourier_shift(u, -sp.phase);
  return sp;
}

Vec shape_phase_reconstruct(const Vec& shape, double phase) {
  return fourier_shift(shape, phase);
}

ShapePhaseSeries shape_phase_split_series(const Mat& fields) {
  const int n = static_cast<int>(fields.rows());
  ShapePhaseSeries out;
  out.shapes.resize(n, fields.cols());
  out.phases.resize(n);
  double offset = 0.0;
  double prev = 0.0;
  for (int i = 0; i < n; ++i) {
    ShapePhase sp = shape_phase_split(fields.row(i).transpose());
    if (i > 0) {
      // Stay on the branch continuous with the previous sample.
      double delta = sp.phase - prev;
      while (delta > M_PI) {
        delta -= 2.0 * M_PI;
        offset -= 2.0 * M_PI;
      }
      while (delta < -M_PI) {
        delta += 2.0 * M_PI;
        offset += 2.0 * M_PI;
      }
    }
    prev = sp.phase;
    out.shapes.row(i) = sp.shape.transpose();
    out.phases(i) = sp.phase + offset;
  }
  return out;
}

BurstingDynamicsData gen_bursting_dynamics_dataset(const Dataset& autoencoder_set,
                                                   std::uint64_t seed,
                                                   double nu, double dt) {
  const int n_modes = autoencoder_set.ambient_dim();
  const double spacing = autoencoder_set.dt;  // 0.05 for the S6 recipe
  const long steps_per_sample = std::lround(spacing / dt);
  const long total_steps = std::lround(1.5 / dt);
  const long keep_from = std::lround(0.5 / dt);
  const int samples_per_traj = static_cast<int>((total_steps - keep_from) /
                                                steps_per_sample) + 1;  // 21

  std::vector<int> initial_rows;
  for (int i = 0; i < autoencoder_set.size(); i += 3) initial_rows.push_back(i);
  const int n_traj = static_cast<int>(initial_rows.size());

  // All perturbation amplitudes drawn up front so results do not depend on
  // the parallel schedule.
  Mat amplitudes(n_traj, 3);
  Rng rng(seed);
  for (int t = 0; t < n_traj; ++t)
    for (int j = 0; j < 3; ++j) amplitudes(t, j) = rng.uniform(-0.05, 0.05);

  KsConfig config;
  config.nu = nu;
  config.dt = dt;
  config.n_modes = n_modes;

  std::vector<Mat> trajectories(n_traj);
  std::vector<char> failed(n_traj, 0);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < n_traj; ++t) {
    Vec u0 = autoencoder_set.points.row(initial_rows[t]).transpose();
    for (int j = 0; j < n_modes; ++j) {
      const double x = 2.0 * M_PI * j / n_modes;
      u0(j) += amplitudes(t, 0) * std::cos(2.0 * x) +
               amplitudes(t, 1) * std::cos(x) + amplitudes(t, 2) * std::sin(x);
    }
    try {
      KsSolver solver(config, u0);
      Mat traj(samples_per_traj, n_modes);
      int row = 0;
      solver.advance(keep_from);
      traj.row(row++) = solver.field().transpose();
      while (row < samples_per_traj) {
        solver.advance(steps_per_sample);
        traj.row(row++) = solver.field().transpose();
      }
      trajectories[t] = std::move(traj);
    } catch (const SolverInstability&) {
      failed[t] = 1;
    }
  }

  BurstingDynamicsData out;
  int n_ok = 0;
  for (int t = 0; t < n_traj; ++t) {
    if (failed[t]) {
      out.skipped += 1;
    } else {
      out.trajectories.push_back(std::move(trajectories[t]));
      n_ok += 1;
    }
  }
  if (out.skipped > 0)
    std::cerr << "warning: " << out.skipped
              << " bursting trajectories skipped (solver instability)\n";

  const int pairs_per_traj = samples_per_traj - 1;
  out.pairs.points.resize(static_cast<long>(n_ok) * pairs_per_traj, n_modes);
  out.pairs.successors.resize(static_cast<long>(n_ok) * pairs_per_traj, n_modes);
  out.pairs.dt = spacing;
  long row = 0;
  for (const Mat& traj : out.trajectories) {
    for (int i = 0; i < pairs_per_traj; ++i) {
      out.pairs.points.row(row) = traj.row(i);
      out.pairs.successors.row(row) = traj.row(i + 1);
      ++row;
    }
  }
  return out;
}

}  // namespace candyman
