#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "candyman/atlas.hpp"

namespace candyman {

/// Consecutive-pair training data for one chart, in that chart's local
/// coordinates (columns are samples). pair_indices are the dataset rows the
/// pairs came from, for aligning auxiliary targets such as phase deltas.
struct ChartPairs {
  Mat z0, z1;
  std::vector<int> pair_indices;
};

/// A pair lands in a chart iff both endpoints lie in the chart's coordinate
/// domain. Domain membership of an arbitrary point is decided by its
/// nearest training point, which coincides with index membership on the
/// atlas's own dataset. Throws when a chart ends up with no pairs.
std::vector<ChartPairs> assemble_pairs(const Dataset& dataset,
                                       const Atlas& atlas);
ChartPairs assemble_chart_pairs(const Dataset& dataset, const Atlas& atlas,
                                int chart_id);

struct ChartDynamics {
  int chart_id = 0;
  Mlp f;  // latent one-step map
  std::optional<Mlp> phase_net;  // local coords -> phase increment per step
  LossReport f_training, phase_training;
};

struct DynamicsSet {
  std::vector<ChartDynamics> charts;
  bool has_phase = false;
};

ChartDynamics fit_dynamics(const Chart& chart, const ChartPairs& pairs,
                           const ArchSpec& arch, const TrainConfig& config);

/// Regression from local shape coordinates to the scalar phase change over
/// one step; phase_deltas aligns with the columns of shape_coords.
void fit_phase_dynamics(ChartDynamics& dynamics, const Chart& chart,
                        const Mat& shape_coords, const Vec& phase_deltas,
                        const ArchSpec& arch, const TrainConfig& config);

enum class InitStrategy { NearestPoint, NearestCentroid };

/// Chart assignment plus local coordinates for an ambient initial
/// condition. The single ambient-space nearest-neighbour search of a
/// rollout happens here.
std::pair<int, Vec> assign_initial(const Atlas& atlas, const Vec& p,
                                   InitStrategy strategy);

struct RolloutState {
  int chart_id = 0;
  Vec z;
  double phase = 0.0;
  int step = 0;
};

/// Advance one step; returns the transition (from, to) if one occurred.
std::optional<std::pair<int, int>> step(const Atlas& atlas,
                                        const DynamicsSet& dynamics,
                                        RolloutState& state);

struct TrajectoryRecord {
  int step = 0;
  int chart_id = 0;
  Vec z;
  Vec ambient;  // decoded state (phase-shifted when phase dynamics are on)
  double phase = 0.0;
  bool transitioned = false;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  int n_transitions = 0;
};

Trajectory rollout(const Atlas& atlas, const DynamicsSet& dynamics,
                   const Vec& p0, int t_steps,
                   InitStrategy strategy = InitStrategy::NearestPoint,
                   double phase0 = 0.0);

}  // namespace candyman
