#pragma once

#include <filesystem>
#include <string>

#include "candyman/atlas.hpp"
#include "candyman/dynamics.hpp"
#include "candyman/systems.hpp"

namespace candyman {

// All floating-point text output uses 17 significant digits, so files
// round-trip bit exactly and identical runs produce identical bytes.

std::string format_double(double value);

void write_csv(const std::filesystem::path& path, const Mat& rows);
Mat read_csv(const std::filesystem::path& path);

/// Versioned structured-text Mlp document: layer_dims, activations, then
/// row-major weight/bias arrays. Documented in the README.
void save_mlp(const std::filesystem::path& path, const Mlp& mlp);
Mlp load_mlp(const std::filesystem::path& path);

/// Model directory: manifest.json (versions, membership index lists,
/// training losses), points.csv / centroids.csv, and per-chart map,
/// whitener, and dynamics files.
void save_model(const std::filesystem::path& dir, const Atlas& atlas,
                const DynamicsSet& dynamics);

struct Model {
  Atlas atlas;
  DynamicsSet dynamics;
};

Model load_model(const std::filesystem::path& dir);

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& trajectory, bool has_phase);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

}  // namespace candyman
