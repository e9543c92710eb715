#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "candyman/atlas.hpp"
#include "candyman/systems.hpp"

namespace candyman {

/// Architecture plus training schedule for one network role.
struct NetRole {
  std::vector<int> dims;  // full layer dims; for autoencoders, the encoder
  TrainConfig train;
};

struct GenerationParams {
  int n_samples = 0;
  double nu = 0.0;              // KS systems only
  double sample_spacing = 0.0;  // KS systems only, time units
  double transient_time = 0.0;  // KS systems only, time units
  double dt = 1e-4;             // KS integrator step
  int n_modes = 64;
};

/// One end-to-end experiment: which system to generate, how to partition it
/// into charts, and how to train the coordinate maps and dynamics.
struct ExperimentConfig {
  std::string name;
  std::string system;  // circle | torus_periodic | torus_quasiperiodic |
                       // ks_beating | ks_beating_travelling | ks_bursting
  std::uint64_t seed = 0;

  GenerationParams generation;

  int n_charts = 3;
  int knn = 2;
  int expansion_rounds = 2;
  int latent_dim = 1;

  NetRole autoencoder;  // dims are the encoder; decoder is its mirror
  NetRole dynamics;
  NetRole phase;  // used only when shape_phase

  AutoencoderMode mode = AutoencoderMode::Plain;
  double alpha = 1.0;
  bool whitening = false;
  double overlap_weight = 1.0;

  bool shape_phase = false;  // model shape and phase variables separately
  bool bursting = false;     // dynamics trained on off-attractor trajectories

  /// Decoder layer dims: the encoder reversed.
  std::vector<int> decoder_dims() const;
};

/// Built-in presets s1..s6, one per training recipe.
const std::vector<std::string>& preset_names();
ExperimentConfig preset(const std::string& name);

/// Serialize to / parse from the JSON schema used by --config files and run
/// manifests. Parsing rejects unknown keys.
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);

/// A preset name (s1..s6) or a path to a JSON config file.
ExperimentConfig load_config(const std::string& name_or_path);

}  // namespace candyman
