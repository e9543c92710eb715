#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "candyman/config.hpp"
#include "candyman/errors.hpp"
#include "candyman/io.hpp"
#include "candyman/mlp.hpp"

using namespace candyman;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "candyman_io_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("csv round trip is bit exact") {
  Mat rows(3, 2);
  rows << 1.0, -2.5, 1.0 / 3.0, 1e-17, 3.14159265358979312, -0.0;
  const fs::path path = temp_dir() / "round.csv";
  write_csv(path, rows);
  Mat back = read_csv(path);
  REQUIRE(back.rows() == rows.rows());
  REQUIRE(back.cols() == rows.cols());
  for (int i = 0; i < rows.rows(); ++i)
    for (int j = 0; j < rows.cols(); ++j)
      CHECK(back(i, j) == rows(i, j));  // exact, including 1/3
}

TEST_CASE("ragged csv is rejected") {
  const fs::path path = temp_dir() / "ragged.csv";
  std::ofstream out(path);
  out << "1.0,2.0\n3.0\n";
  out.close();
  CHECK_THROWS_AS(read_csv(path), DataError);
}

TEST_CASE("mlp file round trip is bit exact") {
  Mlp mlp = glorot_init({3, 5, 2}, {Activation::Elu, Activation::Linear}, 42);
  const fs::path path = temp_dir() / "net.mlp";
  save_mlp(path, mlp);
  Mlp back = load_mlp(path);
  REQUIRE(back.layer_dims == mlp.layer_dims);
  REQUIRE(back.activations == mlp.activations);
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    CHECK((back.weights[l] - mlp.weights[l]).norm() == 0.0);
    CHECK((back.biases[l] - mlp.biases[l]).norm() == 0.0);
  }
}

TEST_CASE("trajectory csv round trip") {
  Trajectory traj;
  for (int t = 0; t < 5; ++t) {
    TrajectoryRecord rec;
    rec.step = t;
    rec.chart_id = t >= 3 ? 1 : 0;  // chart switch matches the flag below
    rec.z = Vec::Constant(2, 0.1 * t + 1.0 / 3.0);
    rec.ambient = Vec::Constant(3, -0.2 * t);
    rec.phase = 0.01 * t;
    rec.transitioned = t == 3;
    traj.records.push_back(rec);
    if (rec.transitioned) ++traj.n_transitions;
  }
  const fs::path path = temp_dir() / "traj.csv";
  write_trajectory_csv(path, traj, true);
  Trajectory back = read_trajectory_csv(path);
  REQUIRE(back.records.size() == traj.records.size());
  CHECK(back.n_transitions == traj.n_transitions);
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const auto& a = traj.records[i];
    const auto& b = back.records[i];
    CHECK(a.step == b.step);
    CHECK(a.chart_id == b.chart_id);
    CHECK((a.z - b.z).norm() == 0.0);
    CHECK((a.ambient - b.ambient).norm() == 0.0);
    CHECK(a.phase == b.phase);
    CHECK(a.transitioned == b.transitioned);
  }
}

TEST_CASE("every preset config survives a json round trip") {
  for (const std::string& name : preset_names()) {
    ExperimentConfig config = preset(name);
    const std::string json = config_to_json(config);
    ExperimentConfig back = config_from_json(json);
    CHECK(config_to_json(back) == json);
    CHECK(back.name == config.name);
    CHECK(back.system == config.system);
    CHECK(back.n_charts == config.n_charts);
    CHECK(back.latent_dim == config.latent_dim);
    CHECK(back.autoencoder.dims == config.autoencoder.dims);
    CHECK(back.autoencoder.train.epochs == config.autoencoder.train.epochs);
    CHECK(back.dynamics.train.lr_init == config.dynamics.train.lr_init);
  }
}

TEST_CASE("unknown config keys are rejected") {
  ExperimentConfig config = preset("s1");
  std::string json = config_to_json(config);
  json.insert(json.find('{') + 1, "\"surprise\": 1,");
  CHECK_THROWS_AS(config_from_json(json), ConfigError);
}

TEST_CASE("load_config accepts preset names and file paths") {
  ExperimentConfig a = load_config("s2");
  CHECK(a.system == "torus_periodic");

  const fs::path path = temp_dir() / "config.json";
  std::ofstream(path) << config_to_json(a);
  ExperimentConfig b = load_config(path.string());
  CHECK(config_to_json(b) == config_to_json(a));

  CHECK_THROWS_AS(load_config("not_a_preset_or_file"), ConfigError);
}
