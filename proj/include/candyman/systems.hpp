#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "candyman/ks.hpp"
#include "candyman/linalg.hpp"

namespace candyman {

/// Ordered pairs of ambient states related by one time step. Rows are
/// samples; successors.row(i) is where points.row(i) maps after dt.
struct Dataset {
  Mat points;
  Mat successors;
  double dt = 0.0;

  int size() const { return static_cast<int>(points.rows()); }
  int ambient_dim() const { return static_cast<int>(points.cols()); }
};

/// Unit circle traversed counterclockwise, N points spaced 2*pi/N.
Dataset gen_circle(int n = 40);

/// Torus surface map (poloidal theta, toroidal phi). Matches the dataset
/// definition exactly, including the sin(theta) in the y radius (a standard
/// torus would use cos(theta) there).
Vec torus_point(double theta, double phi);

/// One periodic orbit: phi_i = 2*pi*i/N, theta_i = 3*phi_i.
Dataset gen_torus_periodic(int n = 100);

/// Quasiperiodic orbit: phi_i = (3*pi/100)*i, theta_i = sqrt(3)*phi_i,
/// 15 toroidal periods at the default N.
Dataset gen_torus_quasiperiodic(int n = 1000);

struct KsDatasetRecipe {
  double nu = 16.0 / 337.0;
  double sample_spacing = 0.01;  // time units between samples
  int n_samples = 100;           // number of (point, successor) pairs
  double transient_time = 50.0;  // discarded before sampling
  double dt = 1e-4;
  int n_modes = 64;
};

/// Simulate from the default initial condition, drop the transient, sample
/// every sample_spacing time units.
Dataset gen_ks_dataset(const KsDatasetRecipe& recipe);

/// Field with its first Fourier mode rotated to zero phase, plus the phase.
struct ShapePhase {
  Vec shape;
  double phase = 0.0;  // radians
};

/// phase = arg(c_1(u)); shape = u rotated so arg(c_1(shape)) = 0.
/// Throws DataError when |c_1| vanishes.
ShapePhase shape_phase_split(const Vec& u);

/// Exact inverse of the split.
Vec shape_phase_reconstruct(const Vec& shape, double phase);

/// Split a whole series, unwrapping the phase so consecutive deltas stay
/// below pi in magnitude.
struct ShapePhaseSeries {
  Mat shapes;  // rows are samples
  Vec phases;  // unwrapped
};
ShapePhaseSeries shape_phase_split_series(const Mat& fields);

/// Off-attractor dynamics data for the bursting regime: every third sample
/// of the on-attractor dataset is perturbed by a1 cos 2x + a2 cos x +
/// a3 sin x with a_i ~ U[-0.05, 0.05], integrated 1.5 time units, and the
/// last 1.0 time unit kept as 21 samples spaced 0.05 apart.
struct BurstingDynamicsData {
  std::vector<Mat> trajectories;  // each 21 x n_modes
  Dataset pairs;                  // 20 pairs per surviving trajectory
  int skipped = 0;                // trajectories lost to solver instability
};

BurstingDynamicsData gen_bursting_dynamics_dataset(const Dataset& autoencoder_set,
                                                   std::uint64_t seed,
                                                   double nu = 16.0 / 71.0,
                                                   double dt = 1e-4);

}  // namespace candyman
