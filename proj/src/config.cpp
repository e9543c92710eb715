#include "candyman/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "candyman/errors.hpp"

namespace candyman {

using nlohmann::json;

std::vector<int> ExperimentConfig::decoder_dims() const {
  std::vector<int> dims(autoencoder.dims.rbegin(), autoencoder.dims.rend());
  return dims;
}

namespace {

TrainConfig schedule(int epochs, double lr_init, double decay_rate) {
  TrainConfig config;
  config.epochs = epochs;
  config.lr_init = lr_init;
  config.decay_rate = decay_rate;
  config.decay_every = 200;
  config.staircase = true;
  return config;
}

ExperimentConfig make_s1() {
  ExperimentConfig c;
  c.name = "s1";
  c.system = "circle";
  c.generation.n_samples = 40;
  c.n_charts = 3;
  c.knn = 2;
  c.expansion_rounds = 2;
  c.latent_dim = 1;
  c.autoencoder = {{2, 32, 32, 16, 4, 1}, schedule(1000, 0.01, 1.0)};
  c.dynamics = {{1, 32, 32, 16, 4, 1}, schedule(500, 0.005, 1.0)};
  return c;
}

ExperimentConfig make_s2() {
  ExperimentConfig c;
  c.name = "s2";
  c.system = "torus_periodic";
  c.generation.n_samples = 100;
  c.n_charts = 3;
  c.knn = 2;
  c.expansion_rounds = 2;
  c.latent_dim = 1;
  c.autoencoder = {{3, 32, 32, 16, 4, 1}, schedule(1000, 0.01, 0.9)};
  c.dynamics = {{1, 32, 32, 16, 4, 1}, schedule(1000, 0.01, 0.9)};
  return c;
}

ExperimentConfig make_s3() {
  ExperimentConfig c;
  c.name = "s3";
  c.system = "torus_quasiperiodic";
  c.generation.n_samples = 1000;
  c.n_charts = 6;
  c.knn = 5;
  c.expansion_rounds = 2;
  c.latent_dim = 2;
  c.autoencoder = {{3, 32, 64, 32, 16, 4, 2}, schedule(2000, 0.01, 0.8)};
  c.dynamics = {{2, 32, 32, 16, 4, 2}, schedule(2000, 0.01, 0.9)};
  return c;
}

ExperimentConfig make_s4() {
  ExperimentConfig c;
  c.name = "s4";
  c.system = "ks_beating";
  c.generation = {100, 16.0 / 337.0, 0.01, 50.0, 1e-4, 64};
  c.n_charts = 3;
  c.knn = 4;
  c.expansion_rounds = 1;
  c.latent_dim = 1;
  c.autoencoder = {{64, 128, 64, 16, 8, 1}, schedule(2000, 0.01, 0.8)};
  c.dynamics = {{1, 32, 32, 16, 4, 1}, schedule(2000, 0.01, 0.9)};
  return c;
}

ExperimentConfig make_s5() {
  ExperimentConfig c;
  c.name = "s5";
  c.system = "ks_beating_travelling";
  c.generation = {100, 4.0 / 87.0, 0.01, 50.0, 1e-4, 64};
  c.n_charts = 3;
  c.knn = 4;
  c.expansion_rounds = 2;
  c.latent_dim = 1;
  c.autoencoder = {{64, 128, 64, 16, 8, 1}, schedule(2000, 0.01, 0.9)};
  c.dynamics = {{1, 32, 32, 16, 4, 1}, schedule(2000, 0.01, 0.9)};
  c.phase = {{1, 32, 32, 16, 4, 1}, schedule(2000, 0.01, 0.9)};
  c.shape_phase = true;
  return c;
}

ExperimentConfig make_s6() {
  ExperimentConfig c;
  c.name = "s6";
  c.system = "ks_bursting";
  c.generation = {6565, 16.0 / 71.0, 0.05, 200.0, 1e-4, 64};
  c.n_charts = 6;
  c.knn = 4;
  c.expansion_rounds = 2;
  c.latent_dim = 3;
  c.autoencoder = {{64, 128, 64, 16, 8, 3}, schedule(1000, 0.01, 0.8)};
  c.dynamics = {{3, 16, 64, 64, 16, 3}, schedule(1000, 0.01, 0.9)};
  c.mode = AutoencoderMode::PcaAnchored;
  c.alpha = 1.0;
  c.whitening = true;
  c.bursting = true;
  return c;
}

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
  }
}

json train_to_json(const TrainConfig& t) {
  return {{"epochs", t.epochs},
          {"lr_init", t.lr_init},
          {"decay_rate", t.decay_rate},
          {"decay_every", t.decay_every},
          {"staircase", t.staircase}};
}

TrainConfig train_from_json(const json& obj, const std::string& where) {
  require_keys(obj, {"epochs", "lr_init", "decay_rate", "decay_every",
                     "staircase"}, where);
  TrainConfig t;
  t.epochs = obj.at("epochs");
  t.lr_init = obj.at("lr_init");
  t.decay_rate = obj.value("decay_rate", 1.0);
  t.decay_every = obj.value("decay_every", 200);
  t.staircase = obj.value("staircase", true);
  if (t.epochs <= 0) throw ConfigError(where + ": epochs must be positive");
  if (t.lr_init <= 0.0) throw ConfigError(where + ": lr_init must be positive");
  return t;
}

json role_to_json(const NetRole& role) {
  return {{"dims", role.dims}, {"train", train_to_json(role.train)}};
}

NetRole role_from_json(const json& obj, const std::string& where) {
  require_keys(obj, {"dims", "train"}, where);
  NetRole role;
  role.dims = obj.at("dims").get<std::vector<int>>();
  role.train = train_from_json(obj.at("train"), where + ".train");
  if (role.dims.size() < 2)
    throw ConfigError(where + ": dims needs at least two layers");
  for (int d : role.dims)
    if (d <= 0) throw ConfigError(where + ": layer dims must be positive");
  return role;
}

bool is_ks_system(const std::string& system) {
  return system.rfind("ks_", 0) == 0;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"s1", "s2", "s3",
                                                 "s4", "s5", "s6"};
  return names;
}

ExperimentConfig preset(const std::string& name) {
  if (name == "s1") return make_s1();
  if (name == "s2") return make_s2();
  if (name == "s3") return make_s3();
  if (name == "s4") return make_s4();
  if (name == "s5") return make_s5();
  if (name == "s6") return make_s6();
  throw ConfigError("unknown preset: " + name);
}

std::string config_to_json(const ExperimentConfig& c) {
  json obj;
  obj["name"] = c.name;
  obj["system"] = c.system;
  obj["seed"] = c.seed;
  obj["generation"] = {{"n_samples", c.generation.n_samples},
                       {"nu", c.generation.nu},
                       {"sample_spacing", c.generation.sample_spacing},
                       {"transient_time", c.generation.transient_time},
                       {"dt", c.generation.dt},
                       {"n_modes", c.generation.n_modes}};
  obj["n_charts"] = c.n_charts;
  obj["knn"] = c.knn;
  obj["expansion_rounds"] = c.expansion_rounds;
  obj["latent_dim"] = c.latent_dim;
  obj["autoencoder"] = role_to_json(c.autoencoder);
  obj["dynamics"] = role_to_json(c.dynamics);
  if (c.shape_phase) obj["phase"] = role_to_json(c.phase);
  obj["mode"] = c.mode == AutoencoderMode::PcaAnchored ? "pca_anchored" : "plain";
  obj["alpha"] = c.alpha;
  obj["whitening"] = c.whitening;
  obj["overlap_weight"] = c.overlap_weight;
  obj["shape_phase"] = c.shape_phase;
  obj["bursting"] = c.bursting;
  return obj.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require_keys(obj,
               {"name", "system", "seed", "generation", "n_charts", "knn",
                "expansion_rounds", "latent_dim", "autoencoder", "dynamics",
                "phase", "mode", "alpha", "whitening", "overlap_weight",
                "shape_phase", "bursting"},
               "config");

  ExperimentConfig c;
  c.name = obj.value("name", "custom");
  c.system = obj.at("system");
  static const std::vector<std::string> systems = {
      "circle",     "torus_periodic",        "torus_quasiperiodic",
      "ks_beating", "ks_beating_travelling", "ks_bursting"};
  if (std::find(systems.begin(), systems.end(), c.system) == systems.end())
    throw ConfigError("unknown system: " + c.system);
  c.seed = obj.value("seed", 0ull);

  if (obj.contains("generation")) {
    const json& g = obj.at("generation");
    require_keys(g, {"n_samples", "nu", "sample_spacing", "transient_time",
                     "dt", "n_modes"}, "generation");
    c.generation.n_samples = g.at("n_samples");
    c.generation.nu = g.value("nu", 0.0);
    c.generation.sample_spacing = g.value("sample_spacing", 0.0);
    c.generation.transient_time = g.value("transient_time", 0.0);
    c.generation.dt = g.value("dt", 1e-4);
    c.generation.n_modes = g.value("n_modes", 64);
    if (c.generation.n_samples <= 0)
      throw ConfigError("generation.n_samples must be positive");
    if (is_ks_system(c.system)) {
      if (c.generation.nu <= 0.0)
        throw ConfigError("generation.nu must be positive for KS systems");
      if (c.generation.sample_spacing <= 0.0)
        throw ConfigError("generation.sample_spacing must be positive");
    }
  } else {
    throw ConfigError("config requires a \"generation\" section");
  }

  c.n_charts = obj.at("n_charts");
  c.knn = obj.at("knn");
  c.expansion_rounds = obj.at("expansion_rounds");
  c.latent_dim = obj.at("latent_dim");
  if (c.n_charts <= 0) throw ConfigError("n_charts must be positive");
  if (c.knn <= 0) throw ConfigError("knn must be positive");
  if (c.expansion_rounds < 0)
    throw ConfigError("expansion_rounds must be nonnegative");
  if (c.latent_dim <= 0) throw ConfigError("latent_dim must be positive");

  c.autoencoder = role_from_json(obj.at("autoencoder"), "autoencoder");
  if (c.autoencoder.dims.back() != c.latent_dim)
    throw ConfigError("autoencoder dims must end at latent_dim");
  c.dynamics = role_from_json(obj.at("dynamics"), "dynamics");
  if (c.dynamics.dims.front() != c.latent_dim ||
      c.dynamics.dims.back() != c.latent_dim)
    throw ConfigError("dynamics dims must map latent_dim to latent_dim");

  c.shape_phase = obj.value("shape_phase", false);
  if (c.shape_phase) {
    if (!obj.contains("phase"))
      throw ConfigError("shape_phase configs require a \"phase\" section");
    c.phase = role_from_json(obj.at("phase"), "phase");
    if (c.phase.dims.front() != c.latent_dim || c.phase.dims.back() != 1)
      throw ConfigError("phase dims must map latent_dim to 1");
  } else if (obj.contains("phase")) {
    throw ConfigError("\"phase\" section given but shape_phase is false");
  }

  const std::string mode = obj.value("mode", "plain");
  if (mode == "plain") {
    c.mode = AutoencoderMode::Plain;
  } else if (mode == "pca_anchored") {
    c.mode = AutoencoderMode::PcaAnchored;
  } else {
    throw ConfigError("mode must be \"plain\" or \"pca_anchored\"");
  }
  c.alpha = obj.value("alpha", 1.0);
  c.whitening = obj.value("whitening", false);
  c.overlap_weight = obj.value("overlap_weight", 1.0);
  if (c.overlap_weight <= 0.0)
    throw ConfigError("overlap_weight must be positive");
  c.bursting = obj.value("bursting", false);
  if (c.bursting && c.system != "ks_bursting")
    throw ConfigError("bursting dynamics data requires system ks_bursting");
  return c;
}

ExperimentConfig load_config(const std::string& name_or_path) {
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end())
    return preset(name_or_path);
  std::ifstream in(name_or_path);
  if (!in)
    throw ConfigError("not a preset name and cannot open file: " +
                      name_or_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

}  // namespace candyman
