#pragma once

#include <optional>

#include "candyman/config.hpp"
#include "candyman/io.hpp"

namespace candyman {

/// Everything a training run consumes. The dynamics dataset differs from
/// the autoencoder dataset only for the bursting recipe, where dynamics are
/// trained on slightly-off-attractor trajectories.
struct GeneratedData {
  Dataset dataset;
  std::optional<Dataset> dynamics_dataset;
  int skipped_trajectories = 0;
};

GeneratedData generate_data(const ExperimentConfig& config);

/// Full training pipeline: atlas (on shape variables when the config splits
/// shape and phase), per-chart latent dynamics, and phase networks.
Model train_model(const ExperimentConfig& config, const GeneratedData& data,
                  int jobs = 1);

}  // namespace candyman
