#include "candyman/dynamics.hpp"

#include <cmath>
#include <string>

#include "candyman/errors.hpp"
#include "candyman/fourier.hpp"

namespace candyman {

namespace {

bool is_member(const Chart& chart, int dataset_index) {
  return std::binary_search(chart.members.begin(), chart.members.end(),
                            dataset_index);
}

// Nearest training point of every row, unless the dataset is the atlas's
// own, where each row is its own nearest point by construction.
std::vector<int> nearest_training_rows(const Mat& rows, const Atlas& atlas) {
  std::vector<int> nearest(rows.rows());
  KdTree tree(atlas.points);
  const Eigen::Index n = rows.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i)
    nearest[i] = tree.nearest(rows.row(i).transpose()).first;
  return nearest;
}

}  // namespace

std::vector<ChartPairs> assemble_pairs(const Dataset& dataset,
                                       const Atlas& atlas) {
  const int n = dataset.size();
  std::vector<int> near_points = nearest_training_rows(dataset.points, atlas);
  std::vector<int> near_succ = nearest_training_rows(dataset.successors, atlas);

  std::vector<ChartPairs> result(atlas.n_charts());
  for (int c = 0; c < atlas.n_charts(); ++c) {
    const Chart& chart = atlas.charts[c];
    std::vector<int>& kept = result[c].pair_indices;
    for (int i = 0; i < n; ++i)
      if (is_member(chart, near_points[i]) && is_member(chart, near_succ[i]))
        kept.push_back(i);
    if (kept.empty())
      throw DataError("chart " + std::to_string(c) + " has no dynamics data");

    Mat p0(dataset.ambient_dim(), kept.size());
    Mat p1(dataset.ambient_dim(), kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j) {
      p0.col(j) = dataset.points.row(kept[j]).transpose();
      p1.col(j) = dataset.successors.row(kept[j]).transpose();
    }
    result[c].z0 = chart.local_coords_batch(p0);
    result[c].z1 = chart.local_coords_batch(p1);
  }
  return result;
}

ChartPairs assemble_chart_pairs(const Dataset& dataset, const Atlas& atlas,
                                int chart_id) {
  return assemble_pairs(dataset, atlas).at(chart_id);
}

ChartDynamics fit_dynamics(const Chart& chart, const ChartPairs& pairs,
                           const ArchSpec& arch, const TrainConfig& config) {
  if (pairs.z0.cols() < 1) throw DataError("fit_dynamics: no pairs");
  if (arch.dims.front() != chart.latent_dim ||
      arch.dims.back() != chart.latent_dim)
    throw InvalidArchitecture("fit_dynamics: arch must map latent to latent");

  ChartDynamics dynamics;
  dynamics.chart_id = chart.id;
  dynamics.f = glorot_init(arch.dims, arch.acts, config.seed);
  dynamics.f_training = train(dynamics.f, pairs.z0, pairs.z1, config);
  return dynamics;
}

void fit_phase_dynamics(ChartDynamics& dynamics, const Chart& chart,
                        const Mat& shape_coords, const Vec& phase_deltas,
                        const ArchSpec& arch, const TrainConfig& config) {
  if (shape_coords.cols() != phase_deltas.size())
    throw DimensionMismatch("fit_phase_dynamics: misaligned data");
  if (arch.dims.front() != chart.latent_dim || arch.dims.back() != 1)
    throw InvalidArchitecture("fit_phase_dynamics: arch must map latent to 1");

  Mlp net = glorot_init(arch.dims, arch.acts, config.seed + 7777);
  dynamics.phase_training =
      train(net, shape_coords, phase_deltas.transpose(), config);
  dynamics.phase_net = std::move(net);
}

std::pair<int, Vec> assign_initial(const Atlas& atlas, const Vec& p,
                                   InitStrategy strategy) {
  int chart_id;
  if (strategy == InitStrategy::NearestPoint) {
    KdTree tree(atlas.points);
    chart_id = atlas.interior_of[tree.nearest(p).first];
  } else {
    KdTree tree(atlas.centroids);
    chart_id = tree.nearest(p).first;
  }
  return {chart_id, atlas.charts[chart_id].local_coords(p)};
}

std::optional<std::pair<int, int>> step(const Atlas& atlas,
                                        const DynamicsSet& dynamics,
                                        RolloutState& state) {
  const Chart& chart = atlas.charts.at(state.chart_id);
  const ChartDynamics& local = dynamics.charts.at(state.chart_id);

  const Vec z_pre = state.z;
  Vec z = local.f.forward(z_pre);
  if (!z.allFinite())
    throw RolloutDiverged(state.step, "rollout diverged at step " +
                                          std::to_string(state.step));
  if (dynamics.has_phase && local.phase_net)
    state.phase += local.phase_net->forward(z_pre)(0);

  std::optional<std::pair<int, int>> event;
  const int nearest_member = chart.member_tree->nearest(z).first;
  const int dataset_index = chart.members[nearest_member];
  if (!chart.is_interior_index(dataset_index)) {
    const int target = atlas.interior_of[dataset_index];
    z = transition(atlas, state.chart_id, target, z);
    if (!z.allFinite())
      throw RolloutDiverged(state.step, "transition diverged at step " +
                                            std::to_string(state.step));
    event = {state.chart_id, target};
    state.chart_id = target;
  }
  state.z = std::move(z);
  state.step += 1;
  return event;
}

Trajectory rollout(const Atlas& atlas, const DynamicsSet& dynamics,
                   const Vec& p0, int t_steps, InitStrategy strategy,
                   double phase0) {
  auto [chart_id, z0] = assign_initial(atlas, p0, strategy);
  RolloutState state{chart_id, z0, phase0, 0};

  auto record = [&](bool transitioned) {
    const Chart& chart = atlas.charts[state.chart_id];
    TrajectoryRecord rec;
    rec.step = state.step;
    rec.chart_id = state.chart_id;
    rec.z = state.z;
    rec.phase = state.phase;
    rec.transitioned = transitioned;
    Vec decoded = chart.reconstruct(state.z);
    rec.ambient = dynamics.has_phase
                      ? fourier_shift(decoded, state.phase)
                      : std::move(decoded);
    return rec;
  };

  Trajectory traj;
  traj.records.reserve(t_steps + 1);
  traj.records.push_back(record(false));
  for (int s = 0; s < t_steps; ++s) {
    auto event = step(atlas, dynamics, state);
    if (event) traj.n_transitions += 1;
    traj.records.push_back(record(event.has_value()));
  }
  return traj;
}

}  // namespace candyman
