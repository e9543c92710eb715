#include "candyman/pipeline.hpp"

#include <unordered_map>

#include "candyman/dynamics.hpp"
#include "candyman/errors.hpp"

namespace candyman {

namespace {

Dataset generate_ks(const ExperimentConfig& config) {
  KsDatasetRecipe recipe;
  recipe.nu = config.generation.nu;
  recipe.sample_spacing = config.generation.sample_spacing;
  recipe.n_samples = config.generation.n_samples;
  recipe.transient_time = config.generation.transient_time;
  recipe.dt = config.generation.dt;
  recipe.n_modes = config.generation.n_modes;
  return gen_ks_dataset(recipe);
}

}  // namespace

GeneratedData generate_data(const ExperimentConfig& config) {
  GeneratedData data;
  if (config.system == "circle") {
    data.dataset = gen_circle(config.generation.n_samples);
  } else if (config.system == "torus_periodic") {
    data.dataset = gen_torus_periodic(config.generation.n_samples);
  } else if (config.system == "torus_quasiperiodic") {
    data.dataset = gen_torus_quasiperiodic(config.generation.n_samples);
  } else if (config.system == "ks_beating" ||
             config.system == "ks_beating_travelling" ||
             config.system == "ks_bursting") {
    data.dataset = generate_ks(config);
    if (config.bursting) {
      BurstingDynamicsData bursting = gen_bursting_dynamics_dataset(
          data.dataset, config.seed, config.generation.nu,
          config.generation.dt);
      data.dynamics_dataset = std::move(bursting.pairs);
      data.skipped_trajectories = bursting.skipped;
    }
  } else {
    throw ConfigError("unknown system: " + config.system);
  }
  return data;
}

Model train_model(const ExperimentConfig& config, const GeneratedData& data,
                  int jobs) {
  // When shape and phase are modelled separately, the atlas and the latent
  // dynamics live on the phase-aligned shape variables.
  Dataset atlas_set;
  Vec pair_phase_deltas;  // aligned with atlas_set rows
  if (config.shape_phase) {
    const Dataset& raw = data.dataset;
    const int n = raw.size();
    Mat series(n + 1, raw.ambient_dim());
    series.topRows(n) = raw.points;
    series.row(n) = raw.successors.row(n - 1);
    ShapePhaseSeries split = shape_phase_split_series(series);

    atlas_set.points = split.shapes.topRows(n);
    atlas_set.successors = split.shapes.bottomRows(n);
    atlas_set.dt = raw.dt;
    pair_phase_deltas = split.phases.tail(n) - split.phases.head(n);
  } else {
    atlas_set = data.dataset;
  }

  AtlasConfig atlas_config;
  atlas_config.n_charts = config.n_charts;
  atlas_config.knn = config.knn;
  atlas_config.expansion_rounds = config.expansion_rounds;
  atlas_config.seed = config.seed;
  atlas_config.jobs = jobs;
  atlas_config.chart.latent_dim = config.latent_dim;
  atlas_config.chart.encoder = make_arch(config.autoencoder.dims);
  atlas_config.chart.decoder = make_arch(config.decoder_dims());
  atlas_config.chart.train = config.autoencoder.train;
  atlas_config.chart.mode = config.mode;
  atlas_config.chart.alpha = config.alpha;
  atlas_config.chart.whitening = config.whitening;
  atlas_config.chart.overlap_weight = config.overlap_weight;

  Model model;
  model.atlas = build_atlas(atlas_set, atlas_config);

  const Dataset& dynamics_set =
      data.dynamics_dataset ? *data.dynamics_dataset : atlas_set;
  std::vector<ChartPairs> pairs = assemble_pairs(dynamics_set, model.atlas);

  const ArchSpec dyn_arch = make_arch(config.dynamics.dims);
  const ArchSpec phase_arch =
      config.shape_phase ? make_arch(config.phase.dims) : ArchSpec{};
  model.dynamics.has_phase = config.shape_phase;
  for (int c = 0; c < model.atlas.n_charts(); ++c) {
    TrainConfig dyn_train = config.dynamics.train;
    dyn_train.seed = config.seed + 2000003ull * (c + 1);
    ChartDynamics chart_dynamics =
        fit_dynamics(model.atlas.charts[c], pairs[c], dyn_arch, dyn_train);
    if (config.shape_phase) {
      Vec deltas(pairs[c].pair_indices.size());
      for (std::size_t j = 0; j < pairs[c].pair_indices.size(); ++j)
        deltas(j) = pair_phase_deltas(pairs[c].pair_indices[j]);
      TrainConfig phase_train = config.phase.train;
      phase_train.seed = dyn_train.seed;
      fit_phase_dynamics(chart_dynamics, model.atlas.charts[c], pairs[c].z0,
                         deltas, phase_arch, phase_train);
    }
    model.dynamics.charts.push_back(std::move(chart_dynamics));
  }
  return model;
}

}  // namespace candyman
