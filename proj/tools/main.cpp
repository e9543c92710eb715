// candyman: atlas-of-charts reduced-order modelling CLI.
//
// Subcommands: generate, train, rollout, eval. Every run writes a manifest
// with the resolved config and seed, so it can be reproduced exactly.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "candyman/errors.hpp"
#include "candyman/eval.hpp"
#include "candyman/io.hpp"
#include "candyman/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace candyman;

namespace {

struct CommonArgs {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 1;
  bool force = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config) {
  auto* config_opt =
      cmd->add_option("--config", args.config,
                      "Preset name (s1..s6) or path to a JSON config file");
  if (needs_config) config_opt->required();
  cmd->add_option("--out", args.out, "Output path")->required();
  cmd->add_option("--seed", args.seed, "Override the config seed")
      ->each([&args](const std::string&) { args.seed_given = true; });
  cmd->add_option("--jobs", args.jobs, "Concurrent workers (default 1)");
  cmd->add_flag("--force", args.force, "Overwrite existing outputs");
}

void check_fresh_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir) && !fs::is_empty(dir) && !force)
    throw DataError("output path exists and is not empty (use --force): " +
                    dir.string());
  fs::create_directories(dir);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << text;
}

ExperimentConfig resolve_config(const CommonArgs& args) {
  ExperimentConfig config = load_config(args.config);
  if (args.seed_given) config.seed = args.seed;
  return config;
}

// ---------------------------------------------------------------------------
// generate

int cmd_generate(const CommonArgs& args) {
  ExperimentConfig config = resolve_config(args);
  check_fresh_dir(args.out, args.force);
  GeneratedData data = generate_data(config);

  const fs::path dir = args.out;
  write_csv(dir / "dataset.csv", data.dataset.points);
  write_csv(dir / "successors.csv", data.dataset.successors);
  if (data.dynamics_dataset) {
    write_csv(dir / "dyn_points.csv", data.dynamics_dataset->points);
    write_csv(dir / "dyn_successors.csv", data.dynamics_dataset->successors);
  }

  json manifest;
  manifest["command"] = "generate";
  manifest["config"] = json::parse(config_to_json(config));
  manifest["dt"] = data.dataset.dt;
  manifest["fingerprint"] = dataset_fingerprint(data.dataset.points);
  manifest["n_samples"] = data.dataset.size();
  manifest["ambient_dim"] = data.dataset.ambient_dim();
  if (data.dynamics_dataset) {
    manifest["dynamics_pairs"] = data.dynamics_dataset->size();
    manifest["skipped_trajectories"] = data.skipped_trajectories;
  }
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << data.dataset.size() << " samples to " << args.out
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train

GeneratedData load_data_dir(const fs::path& dir, double* dt_out) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw DataError("no manifest.json in " + dir.string());
  json manifest = json::parse(in);

  GeneratedData data;
  data.dataset.points = read_csv(dir / "dataset.csv");
  data.dataset.successors = read_csv(dir / "successors.csv");
  data.dataset.dt = manifest.at("dt");
  if (dataset_fingerprint(data.dataset.points) !=
      manifest.at("fingerprint").get<std::string>())
    throw DataError("dataset.csv does not match its manifest fingerprint");
  if (fs::exists(dir / "dyn_points.csv")) {
    Dataset dyn;
    dyn.points = read_csv(dir / "dyn_points.csv");
    dyn.successors = read_csv(dir / "dyn_successors.csv");
    dyn.dt = data.dataset.dt;
    data.dynamics_dataset = std::move(dyn);
  }
  if (dt_out) *dt_out = data.dataset.dt;
  return data;
}

int cmd_train(const CommonArgs& args, const std::string& data_dir,
              int charts_override) {
  ExperimentConfig config = resolve_config(args);
  if (charts_override > 0) config.n_charts = charts_override;
  GeneratedData data = load_data_dir(data_dir, nullptr);
  check_fresh_dir(args.out, args.force);

  Model model = train_model(config, data, args.jobs);
  save_model(args.out, model.atlas, model.dynamics);
  write_text(fs::path(args.out) / "config.json", config_to_json(config));
  std::cout << "trained " << model.atlas.n_charts() << " charts ("
            << config.latent_dim << "-d local coordinates) into " << args.out
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// rollout

int cmd_rollout(const std::string& model_dir, const std::string& data_dir,
                const std::string& init_file, int init_row, int steps,
                const std::string& out, bool force) {
  if (fs::exists(out) && !force)
    throw DataError("output file exists (use --force): " + out);
  Model model = load_model(model_dir);

  Vec init;
  if (!init_file.empty()) {
    init = read_csv(init_file).row(0).transpose();
  } else if (!data_dir.empty()) {
    Mat points = read_csv(fs::path(data_dir) / "dataset.csv");
    if (init_row < 0 || init_row >= points.rows())
      throw DataError("--init-row out of range");
    init = points.row(init_row).transpose();
  } else {
    throw ConfigError("rollout needs --data or --init-file");
  }

  double phase0 = 0.0;
  if (model.dynamics.has_phase) {
    // The atlas lives on phase-aligned shape variables; split the raw field.
    ShapePhase split = shape_phase_split(init);
    init = split.shape;
    phase0 = split.phase;
  }

  Trajectory traj = rollout(model.atlas, model.dynamics, init, steps,
                            InitStrategy::NearestPoint, phase0);
  write_trajectory_csv(out, traj, model.dynamics.has_phase);
  std::cout << "rolled out " << steps << " steps, " << traj.n_transitions
            << " chart transitions, wrote " << out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(item);
  return items;
}

Mat trajectory_fields(const Trajectory& traj) {
  Mat fields(traj.records.size(), traj.records.front().ambient.size());
  for (std::size_t i = 0; i < traj.records.size(); ++i)
    fields.row(i) = traj.records[i].ambient.transpose();
  return fields;
}

void eval_mse(const Model& model, const Dataset& dataset, const fs::path& dir) {
  std::ofstream out(dir / "mse.csv");
  out << "chart,recon_mse\n";
  for (const Chart& chart : model.atlas.charts)
    out << chart.id << ',' << format_double(chart.recon_mse) << '\n';
  out << "global," << format_double(atlas_reconstruction_mse(model.atlas, dataset))
      << '\n';
}

void eval_period(const Trajectory& traj, double dt, bool has_phase,
                 const fs::path& dir) {
  Mat fields = trajectory_fields(traj);
  json report;
  if (has_phase) {
    // Beating period from the phase-aligned shapes, travelling period from
    // the phase trend.
    ShapePhaseSeries split = shape_phase_split_series(fields);
    PeriodEstimate beating = estimate_period(split.shapes, dt);
    report["beating_period"] = beating.period;
    report["beating_aperiodic"] = beating.aperiodic;
    const double total =
        traj.records.back().phase - traj.records.front().phase;
    const double span = dt * static_cast<double>(traj.records.size() - 1);
    report["travelling_period"] =
        total == 0.0 ? 0.0 : 2.0 * M_PI * span / std::abs(total);
  } else {
    PeriodEstimate est = estimate_period(fields, dt);
    report["period"] = est.period;
    report["uncertainty"] = est.uncertainty;
    report["aperiodic"] = est.aperiodic;
    report["min_recurrence"] = est.min_recurrence;
    report["threshold"] = est.threshold;
  }
  write_text(dir / "period.json", report.dump(2) + "\n");
}

void eval_phase_speed(const Trajectory& traj, const Dataset& dataset,
                      const fs::path& dir) {
  auto [poloidal, toroidal] =
      phase_speed_error(trajectory_fields(traj), dataset.points);
  json report;
  report["poloidal_rel_error"] = poloidal;
  report["toroidal_rel_error"] = toroidal;
  write_text(dir / "phase_speed.json", report.dump(2) + "\n");
}

void eval_smoothness(const Trajectory& traj, const fs::path& dir) {
  TransitionSmoothness s = transition_smoothness(traj);
  json report;
  report["n_transitions"] = s.transition_steps.size();
  report["median_first_difference"] = s.median_first;
  report["median_second_difference"] = s.median_second;
  report["worst_first_ratio"] = s.worst_first_ratio;
  report["transition_steps"] = s.transition_steps;
  report["jump_first"] = s.jump_first;
  report["jump_second"] = s.jump_second;
  write_text(dir / "smoothness.json", report.dump(2) + "\n");
}

void eval_classify(const Trajectory& traj, const fs::path& dir) {
  BurstVerdict verdict = classify_bursting_behavior(trajectory_fields(traj));
  write_text(dir / "verdict.txt", burst_verdict_name(verdict) + "\n");
}

void eval_sweep(const ExperimentConfig& config, const Dataset& dataset,
                std::uint64_t seed, int jobs, int trials,
                const fs::path& dir) {
  MseSweepOptions options;
  options.chart_counts = {config.n_charts, 1};
  options.dims = {config.latent_dim, 2 * config.latent_dim};
  options.trials = trials;
  options.hidden.assign(config.autoencoder.dims.begin() + 1,
                        config.autoencoder.dims.end() - 1);
  options.mode = config.mode;
  options.alpha = config.alpha;
  options.train = config.autoencoder.train;
  options.knn = config.knn;
  options.expansion_rounds = config.expansion_rounds;
  options.seed = seed;
  options.jobs = jobs;
  options.reference_charts = config.n_charts;
  MseSweepResult result = mse_sweep(dataset, options);

  std::ofstream out(dir / "sweep.csv");
  out << "n_charts,latent_dim,trial,mse,diverged\n";
  for (const SweepCell& cell : result.cells)
    out << cell.n_charts << ',' << cell.latent_dim << ',' << cell.trial << ','
        << format_double(cell.mse) << ',' << (cell.diverged ? 1 : 0) << '\n';
  out << "median," << config.n_charts << ',' << config.latent_dim << ','
      << format_double(result.median_mse(config.n_charts, config.latent_dim))
      << ",0\n";
  out << "median,1," << 2 * config.latent_dim << ','
      << format_double(result.median_mse(1, 2 * config.latent_dim)) << ",0\n";
}

int cmd_eval(const CommonArgs& args, const std::string& model_dir,
             const std::string& data_dir, const std::string& trajectory_file,
             const std::string& diagnostics, int trials) {
  check_fresh_dir(args.out, args.force);
  const fs::path dir = args.out;

  double dt = 0.0;
  GeneratedData data = load_data_dir(data_dir, &dt);

  std::optional<Model> model;
  if (!model_dir.empty()) model = load_model(model_dir);
  std::optional<Trajectory> traj;
  if (!trajectory_file.empty()) traj = read_trajectory_csv(trajectory_file);

  auto need_model = [&](const std::string& name) -> const Model& {
    if (!model) throw ConfigError("diagnostic " + name + " needs --model");
    return *model;
  };
  auto need_traj = [&](const std::string& name) -> const Trajectory& {
    if (!traj) throw ConfigError("diagnostic " + name + " needs --trajectory");
    return *traj;
  };

  for (const std::string& diag : split_list(diagnostics)) {
    if (diag == "mse") {
      eval_mse(need_model(diag), data.dataset, dir);
    } else if (diag == "period") {
      const bool has_phase = model && model->dynamics.has_phase;
      eval_period(need_traj(diag), dt, has_phase, dir);
    } else if (diag == "phase_speed") {
      eval_phase_speed(need_traj(diag), data.dataset, dir);
    } else if (diag == "smoothness") {
      eval_smoothness(need_traj(diag), dir);
    } else if (diag == "classify") {
      eval_classify(need_traj(diag), dir);
    } else if (diag == "sweep") {
      ExperimentConfig config = resolve_config(args);
      eval_sweep(config, data.dataset, config.seed, args.jobs, trials, dir);
    } else {
      throw ConfigError("unknown diagnostic: " + diag);
    }
  }
  std::cout << "wrote reports to " << args.out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Atlas-of-charts reduced-order models for dynamics on manifolds"};
  app.require_subcommand(1);

  CommonArgs gen_args;
  auto* generate = app.add_subcommand("generate", "Generate a dataset");
  add_common(generate, gen_args, true);

  CommonArgs train_args;
  std::string train_data;
  int charts_override = 0;
  auto* train = app.add_subcommand("train", "Train an atlas and dynamics");
  add_common(train, train_args, true);
  train->add_option("--data", train_data, "Dataset directory")->required();
  train->add_option("--charts", charts_override,
                    "Override the number of charts");

  std::string ro_model, ro_data, ro_init_file, ro_out;
  int ro_row = 0, ro_steps = 0;
  bool ro_force = false;
  auto* ro = app.add_subcommand("rollout", "Roll the learned dynamics forward");
  ro->add_option("--model", ro_model, "Model directory")->required();
  ro->add_option("--data", ro_data, "Dataset directory for --init-row");
  ro->add_option("--init-file", ro_init_file, "CSV whose first row is the IC");
  ro->add_option("--init-row", ro_row, "Dataset row to start from (default 0)");
  ro->add_option("--steps", ro_steps, "Number of steps")->required();
  ro->add_option("--out", ro_out, "Trajectory CSV path")->required();
  ro->add_flag("--force", ro_force, "Overwrite an existing output file");

  CommonArgs eval_args;
  std::string ev_model, ev_data, ev_traj, ev_diags = "mse";
  int ev_trials = 5;
  auto* ev = app.add_subcommand("eval", "Evaluate a model or trajectory");
  add_common(ev, eval_args, false);
  ev->add_option("--model", ev_model, "Model directory");
  ev->add_option("--data", ev_data, "Dataset directory")->required();
  ev->add_option("--trajectory", ev_traj, "Trajectory CSV from rollout");
  ev->add_option("--diagnostics", ev_diags,
                 "Comma list: mse,period,phase_speed,smoothness,classify,sweep");
  ev->add_option("--trials", ev_trials, "Trials per sweep cell (default 5)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(gen_args);
    if (train->parsed()) return cmd_train(train_args, train_data, charts_override);
    if (ro->parsed())
      return cmd_rollout(ro_model, ro_data, ro_init_file, ro_row, ro_steps,
                         ro_out, ro_force);
    if (ev->parsed())
      return cmd_eval(eval_args, ev_model, ev_data, ev_traj, ev_diags,
                      ev_trials);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TrainingDiverged& e) {
    std::cerr << "training diverged: " << e.what() << "\n";
    return kExitTrainingDiverged;
  } catch (const RolloutDiverged& e) {
    std::cerr << "rollout diverged: " << e.what() << "\n";
    return kExitRolloutDiverged;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
