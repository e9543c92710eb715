// Acceptance gate: one criterion per invocation (argv[1] = 1..11), one
// PASS/FAIL line each. Generated datasets and trained models are cached on
// disk (./acceptance_cache by default, or $CANDYMAN_CACHE) so criteria that
// share a preset train it once.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "candyman/config.hpp"
#include "candyman/errors.hpp"
#include "candyman/eval.hpp"
#include "candyman/io.hpp"
#include "candyman/kdtree.hpp"
#include "candyman/ks.hpp"
#include "candyman/pipeline.hpp"
#include "candyman/reference.hpp"
#include "candyman/rng.hpp"

using namespace candyman;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Seeds pinned per preset: the first seed of each list is the one the
// shipped configuration uses; best-of-5 criteria walk the whole list.
constexpr std::uint64_t kSeedS1 = 0;
constexpr std::uint64_t kSeedS2 = 3;
const std::vector<std::uint64_t> kSeedsS3 = {0, 1, 2, 3, 4};
constexpr std::uint64_t kSeedS4 = 3;
const std::vector<std::uint64_t> kSeedsS5 = {0, 1, 2, 3, 4};
constexpr std::uint64_t kSeedS6 = 0;

fs::path cache_root() {
  if (const char* env = std::getenv("CANDYMAN_CACHE")) return env;
  return fs::current_path() / "acceptance_cache";
}

GeneratedData cached_data(const ExperimentConfig& config) {
  const fs::path dir =
      cache_root() / ("data_" + config.name + "_s" + std::to_string(config.seed));
  GeneratedData data;
  if (fs::exists(dir / "dt.txt")) {
    data.dataset.points = read_csv(dir / "points.csv");
    data.dataset.successors = read_csv(dir / "successors.csv");
    std::ifstream(dir / "dt.txt") >> data.dataset.dt;
    if (fs::exists(dir / "dyn_points.csv")) {
      Dataset dyn;
      dyn.points = read_csv(dir / "dyn_points.csv");
      dyn.successors = read_csv(dir / "dyn_successors.csv");
      dyn.dt = data.dataset.dt;
      data.dynamics_dataset = std::move(dyn);
    }
    return data;
  }
  data = generate_data(config);
  fs::create_directories(dir);
  write_csv(dir / "points.csv", data.dataset.points);
  write_csv(dir / "successors.csv", data.dataset.successors);
  if (data.dynamics_dataset) {
    write_csv(dir / "dyn_points.csv", data.dynamics_dataset->points);
    write_csv(dir / "dyn_successors.csv", data.dynamics_dataset->successors);
  }
  std::ofstream(dir / "dt.txt") << format_double(data.dataset.dt) << "\n";
  return data;
}

Model cached_model(const ExperimentConfig& config) {
  const fs::path dir = cache_root() / ("model_" + config.name + "_s" +
                                       std::to_string(config.seed));
  if (fs::exists(dir / "manifest.json")) return load_model(dir);
  GeneratedData data = cached_data(config);
  Model model = train_model(config, data);
  fs::create_directories(dir);
  save_model(dir, model.atlas, model.dynamics);
  return model;
}

ExperimentConfig preset_with_seed(const std::string& name, std::uint64_t seed) {
  ExperimentConfig config = preset(name);
  config.seed = seed;
  return config;
}

bool report(int criterion, bool pass, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str());
  return pass;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Gradient oracle.

bool criterion1() {
  Rng rng(20240817);
  double worst = 0.0;
  const int n_nets = 120;
  for (int t = 0; t < n_nets; ++t) {
    const int n_layers = 2 + static_cast<int>(rng.uniform_index(3));
    std::vector<int> dims;
    for (int l = 0; l <= n_layers; ++l)
      dims.push_back(1 + static_cast<int>(rng.uniform_index(5)));
    std::vector<Activation> acts(n_layers, Activation::Elu);
    acts.back() = Activation::Linear;
    Mlp mlp = glorot_init(dims, acts, rng.next_u64());

    const int n_samples = 1 + static_cast<int>(rng.uniform_index(4));
    Mat xs(dims.front(), n_samples), ys(dims.back(), n_samples);
    for (int j = 0; j < n_samples; ++j) {
      for (int i = 0; i < xs.rows(); ++i) xs(i, j) = rng.uniform(-1.5, 1.5);
      for (int i = 0; i < ys.rows(); ++i) ys(i, j) = rng.uniform(-1.5, 1.5);
    }
    std::optional<Vec> weights;
    if (t % 3 == 0) {
      weights.emplace(n_samples);
      for (int j = 0; j < n_samples; ++j) (*weights)(j) = rng.uniform(0.1, 2.0);
    }
    const Vec* w = weights ? &*weights : nullptr;

    MlpGrads fast = backprop(mlp, xs, ys, w);
    MlpGrads slow = reference::finite_difference_gradients(mlp, xs, ys, w);
    for (std::size_t l = 0; l < fast.d_weights.size(); ++l) {
      auto rel = [](double a, double b) {
        const double scale = std::max({std::abs(a), std::abs(b), 1e-4});
        return std::abs(a - b) / scale;
      };
      for (int i = 0; i < fast.d_weights[l].rows(); ++i)
        for (int j = 0; j < fast.d_weights[l].cols(); ++j)
          worst = std::max(worst,
                           rel(fast.d_weights[l](i, j), slow.d_weights[l](i, j)));
      for (int i = 0; i < fast.d_biases[l].size(); ++i)
        worst = std::max(worst, rel(fast.d_biases[l](i), slow.d_biases[l](i)));
    }
  }
  return report(1, worst < 1e-5,
                "gradient oracle on " + std::to_string(n_nets) +
                    " random networks, worst rel. err " + fmt(worst));
}

// ---------------------------------------------------------------------------
// 2. Nearest-neighbour oracle.

bool criterion2() {
  Rng rng(987654321);
  int mismatches = 0;
  const int n_instances = 1000;
  for (int t = 0; t < n_instances; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform_index(40));
    const int dim = 1 + static_cast<int>(rng.uniform_index(13));
    Mat points(n, dim);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < dim; ++j) points(i, j) = rng.uniform(-1.0, 1.0);
    if (t % 3 == 0 && n > 1)  // exercise exact ties
      for (int i = 1; i < n; i += 2) points.row(i) = points.row(i - 1);

    KdTree tree(points);
    const int k = 1 + static_cast<int>(rng.uniform_index(n));
    for (int q = 0; q < 3; ++q) {
      Vec query(dim);
      if (q == 0) {
        query = points.row(rng.uniform_index(n)).transpose();  // on a point
      } else {
        for (int j = 0; j < dim; ++j) query(j) = rng.uniform(-1.2, 1.2);
      }
      auto fast = tree.k_nearest(query, k);
      auto slow = reference::k_nearest(points, query, k);
      if (fast.size() != slow.size()) { ++mismatches; continue; }
      for (std::size_t i = 0; i < fast.size(); ++i)
        if (fast[i].first != slow[i].first || fast[i].second != slow[i].second)
          ++mismatches;
    }
  }
  return report(2, mismatches == 0,
                "k-d tree vs brute force on " + std::to_string(n_instances) +
                    " instances (with ties), " + std::to_string(mismatches) +
                    " mismatches");
}

// ---------------------------------------------------------------------------
// 3. Atlas invariants on every preset.

std::uint64_t pinned_seed(const std::string& name) {
  if (name == "s1") return kSeedS1;
  if (name == "s2") return kSeedS2;
  if (name == "s3") return kSeedsS3.front();
  if (name == "s4") return kSeedS4;
  if (name == "s5") return kSeedsS5.front();
  return kSeedS6;
}

bool criterion3() {
  std::string failures;
  for (const std::string& name : preset_names()) {
    Model model = cached_model(preset_with_seed(name, pinned_seed(name)));
    const Atlas& atlas = model.atlas;
    const int n = atlas.size();

    std::vector<int> interior_count(n, 0), member_count(n, 0);
    for (const Chart& chart : atlas.charts) {
      for (int i : chart.interior) ++interior_count[i];
      for (int i : chart.members) ++member_count[i];
    }
    for (int i = 0; i < n; ++i) {
      if (interior_count[i] != 1) failures += name + ":partition ";
      if (member_count[i] < 1) failures += name + ":coverage ";
      if (interior_count[i] != 1 || member_count[i] < 1) break;
    }

    // Overlap inequality: the distance between the two charts'
    // reconstructions of a shared point never exceeds the sum of their
    // reconstruction errors.
    bool overlap_ok = true;
    for (std::size_t a = 0; a < atlas.charts.size() && overlap_ok; ++a)
      for (std::size_t b = a + 1; b < atlas.charts.size() && overlap_ok; ++b) {
        const Chart& ca = atlas.charts[a];
        const Chart& cb = atlas.charts[b];
        std::vector<int> shared;
        std::set_intersection(ca.members.begin(), ca.members.end(),
                              cb.members.begin(), cb.members.end(),
                              std::back_inserter(shared));
        for (int i : shared) {
          const Vec p = atlas.points.row(i).transpose();
          const Vec ra = ca.reconstruct(ca.local_coords(p));
          const Vec rb = cb.reconstruct(cb.local_coords(p));
          if ((ra - rb).norm() >
              (ra - p).norm() + (rb - p).norm() + 1e-12) {
            overlap_ok = false;
            break;
          }
        }
      }
    if (!overlap_ok) failures += name + ":overlap ";
  }
  return report(3, failures.empty(),
                failures.empty()
                    ? "atlas invariants hold on every preset"
                    : "atlas invariants violated: " + failures);
}

// ---------------------------------------------------------------------------
// 4. Circle experiment.

bool criterion4() {
  ExperimentConfig config = preset_with_seed("s1", kSeedS1);
  GeneratedData data = cached_data(config);
  Model model = cached_model(config);
  Trajectory traj =
      rollout(model.atlas, model.dynamics,
              data.dataset.points.row(0).transpose(), 1000);

  Mat series(traj.records.size(), 2);
  double worst_radius = 0.0;
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    series.row(i) = traj.records[i].ambient.transpose();
    worst_radius =
        std::max(worst_radius, std::abs(traj.records[i].ambient.norm() - 1.0));
  }
  PeriodEstimate period = estimate_period(series, 1.0);
  TransitionSmoothness smooth = transition_smoothness(traj);

  const bool pass = worst_radius <= 0.05 && !period.aperiodic &&
                    std::abs(period.period - 40.0) <= 1.0 &&
                    traj.n_transitions > 0 && smooth.worst_first_ratio < 5.0;
  return report(4, pass,
                "circle rollout: radius dev " + fmt(worst_radius) +
                    ", period " + fmt(period.period) + " steps, " +
                    std::to_string(traj.n_transitions) +
                    " transitions, worst jump ratio " +
                    fmt(smooth.worst_first_ratio));
}

// ---------------------------------------------------------------------------
// 5. Periodic torus.

double torus_surface_deviation(const Mat& points, double* worst_out) {
  TorusAngles angles = recover_torus_angles(points);
  double worst = 0.0;
  for (int i = 0; i < points.rows(); ++i) {
    const Vec on = torus_point(angles.theta(i), angles.phi(i));
    worst = std::max(worst, (on - points.row(i).transpose()).norm());
  }
  if (worst_out) *worst_out = worst;
  return worst;
}

bool criterion5() {
  ExperimentConfig config = preset_with_seed("s2", kSeedS2);
  GeneratedData data = cached_data(config);
  Model model = cached_model(config);
  Trajectory traj =
      rollout(model.atlas, model.dynamics,
              data.dataset.points.row(0).transpose(), 1000);  // 10 cycles

  Mat series(traj.records.size(), 3);
  for (std::size_t i = 0; i < traj.records.size(); ++i)
    series.row(i) = traj.records[i].ambient.transpose();
  double worst = 0.0;
  bool on_surface = true;
  try {
    torus_surface_deviation(series, &worst);
  } catch (const DataError&) {
    on_surface = false;
    worst = 1.0;
  }
  PeriodEstimate period = estimate_period(series, 1.0);
  const bool pass = on_surface && worst <= 0.05 && !period.aperiodic &&
                    std::abs(period.period - 100.0) <= 2.0;
  return report(5, pass,
                "periodic torus rollout: surface dev " + fmt(worst) +
                    ", period " + fmt(period.period) + " steps");
}

// ---------------------------------------------------------------------------
// 6. Quasiperiodic torus, best of 5 seeds.

bool criterion6() {
  // The periodicity diagnostic must tell locked from quasiperiodic motion.
  const PeriodEstimate locked =
      estimate_period(gen_torus_periodic().points, 1.0);
  const PeriodEstimate quasi =
      estimate_period(gen_torus_quasiperiodic().points, 1.0);
  if (locked.aperiodic || !quasi.aperiodic)
    return report(6, false,
                  "periodicity diagnostic mislabels the control orbits");

  std::string tried;
  for (std::uint64_t seed : kSeedsS3) {
    ExperimentConfig config = preset_with_seed("s3", seed);
    GeneratedData data = cached_data(config);
    Model model = cached_model(config);
    Trajectory traj =
        rollout(model.atlas, model.dynamics,
                data.dataset.points.row(0).transpose(), 2000);
    Mat series(traj.records.size(), 3);
    for (std::size_t i = 0; i < traj.records.size(); ++i)
      series.row(i) = traj.records[i].ambient.transpose();
    try {
      auto [e_theta, e_phi] = phase_speed_error(series, data.dataset.points);
      const bool locked_run = !estimate_period(series, 1.0).aperiodic;
      tried += "seed " + std::to_string(seed) + ": theta " + fmt(e_theta) +
               ", phi " + fmt(e_phi) + (locked_run ? " (locked)" : "") + "; ";
      if (std::abs(e_theta) <= 0.02 && std::abs(e_phi) <= 0.02 && !locked_run)
        return report(6, true, "quasiperiodic torus phase speeds: " + tried);
    } catch (const DataError& err) {
      tried += "seed " + std::to_string(seed) + ": " + err.what() + "; ";
    }
  }
  return report(6, false, "no seed within 2% phase speed: " + tried);
}

// ---------------------------------------------------------------------------
// 7. KS solver.

bool criterion7() {
  // Linear decay.
  KsConfig config;
  config.nu = 16.0 / 337.0;
  config.dt = 1e-5;
  config.nonlinear = false;
  double worst_decay = 0.0;
  for (int k : {1, 2, 3, 5}) {
    Vec u0(config.n_modes);
    for (int j = 0; j < config.n_modes; ++j)
      u0(j) = std::cos(k * 2.0 * M_PI * j / config.n_modes);
    KsSolver solver(config, u0);
    const long steps = 2000;
    solver.advance(steps);
    const double expected =
        std::exp((k * k - config.nu * std::pow(k, 4)) * steps * config.dt);
    const double got = fourier_mode(solver.field(), k).real() / 0.5;
    worst_decay = std::max(worst_decay, std::abs(got - expected) / expected);
  }

  // Convergence order.
  KsConfig nonlinear;
  nonlinear.nu = 16.0 / 337.0;
  Vec u0 = KsSolver::default_initial_condition(nonlinear.n_modes);
  auto solve = [&](double dt) {
    KsConfig c = nonlinear;
    c.dt = dt;
    KsSolver solver(c, u0);
    solver.advance(std::lround(0.05 / dt));
    return solver.field();
  };
  const Vec fine = solve(2.5e-5);
  const double order =
      std::log2((solve(2e-4) - fine).norm() / (solve(1e-4) - fine).norm());

  // Mean conservation over 1e4 steps.
  KsConfig mean_cfg;
  mean_cfg.nu = 16.0 / 337.0;
  mean_cfg.dt = 1e-4;
  KsSolver solver(mean_cfg, u0);
  const double mean0 = u0.mean();
  solver.advance(10000);
  const double mean_drift = std::abs(solver.field().mean() - mean0);

  const bool pass =
      worst_decay < 1e-6 && order > 1.7 && order < 2.3 && mean_drift < 1e-8;
  return report(7, pass,
                "KS solver: linear-decay rel. err " + fmt(worst_decay) +
                    ", convergence order " + fmt(order) + ", mean drift " +
                    fmt(mean_drift));
}

// ---------------------------------------------------------------------------
// 8. KS beating.

bool criterion8() {
  ExperimentConfig config = preset_with_seed("s4", kSeedS4);
  GeneratedData data = cached_data(config);
  Model model = cached_model(config);

  for (const Chart& chart : model.atlas.charts)
    if (chart.latent_dim != 1)
      return report(8, false, "KS beating chart latent dim is not 1");

  const int n_steps = 100;  // >= 2 beating periods of ~45.6 samples
  const Vec u0 = data.dataset.points.row(0).transpose();
  Trajectory traj = rollout(model.atlas, model.dynamics, u0, n_steps);

  KsConfig ks;
  ks.nu = config.generation.nu;
  ks.dt = config.generation.dt;
  const long stride = std::lround(config.generation.sample_spacing / ks.dt);
  auto reference = ks_simulate(ks, u0, stride * n_steps, stride);

  double mse = 0.0;
  for (int i = 0; i <= n_steps; ++i)
    mse += (traj.records[i].ambient - reference[i]).squaredNorm();
  mse /= (n_steps + 1.0) * u0.size();
  return report(8, mse < 1e-2,
                "KS beating rollout over " + std::to_string(n_steps) +
                    " samples: field MSE " + fmt(mse) + " vs reference");
}

// ---------------------------------------------------------------------------
// 9. KS beating-travelling, best of 5 seeds.

bool criterion9() {
  std::string tried;
  for (std::uint64_t seed : kSeedsS5) {
    ExperimentConfig config = preset_with_seed("s5", seed);
    GeneratedData data = cached_data(config);
    Model model = cached_model(config);

    const int n_steps = 2000;
    ShapePhase start = shape_phase_split(data.dataset.points.row(0).transpose());
    Trajectory traj = rollout(model.atlas, model.dynamics,
                              start.shape, n_steps,
                              InitStrategy::NearestPoint, start.phase);

    // Beating period from the shape variables.
    Mat shapes(traj.records.size(), model.atlas.ambient_dim());
    Vec phases(traj.records.size());
    for (std::size_t i = 0; i < traj.records.size(); ++i) {
      const auto& rec = traj.records[i];
      shapes.row(i) =
          model.atlas.charts[rec.chart_id].reconstruct(rec.z).transpose();
      phases(i) = rec.phase;
    }
    const double dt = config.generation.sample_spacing;
    PeriodEstimate beat = estimate_period(shapes, dt);

    // Travelling period from the mean phase drift per unit time.
    const double drift =
        (phases(phases.size() - 1) - phases(0)) /
        ((phases.size() - 1.0) * dt);
    const double travelling = 2.0 * M_PI / std::abs(drift);

    tried += "seed " + std::to_string(seed) + ": beating " + fmt(beat.period) +
             " tu, travelling " + fmt(travelling) + " tu; ";
    if (std::abs(beat.period - 0.456) <= 0.005 &&
        std::abs(travelling - 90.46) <= 0.1 * 90.46)
      return report(9, true, "KS beating-travelling: " + tried);
  }
  return report(9, false, "no seed matched both periods: " + tried);
}

// ---------------------------------------------------------------------------
// 10. KS bursting: MSE sweep ordering plus behaviour classification.

Mat synthetic_burst_fields(const std::vector<double>& a1_blocks) {
  const int block = 5, n_grid = 64;
  const int n = static_cast<int>(a1_blocks.size()) * block;
  Mat fields(n, n_grid);
  for (int t = 0; t < n; ++t) {
    const int b = t / block;
    const double a2 = b % 2 == 0 ? 1.0 : -1.0;
    for (int j = 0; j < n_grid; ++j) {
      const double x = 2.0 * M_PI * j / n_grid;
      fields(t, j) = a1_blocks[b] * std::cos(x) + a2 * std::cos(2.0 * x);
    }
  }
  return fields;
}

bool criterion10() {
  // Classification controls.
  std::vector<double> one(24, 1.0), two(24);
  for (int b = 0; b < 24; ++b) two[b] = (b / 6) % 2 == 0 ? 1.0 : -1.0;
  Mat fixed(100, 64);
  for (int t = 0; t < 100; ++t)
    for (int j = 0; j < 64; ++j)
      fixed(t, j) = std::exp(-0.2 * t) * std::cos(2.0 * M_PI * j / 64);
  const bool controls_ok =
      classify_bursting_behavior(fixed) == BurstVerdict::FixedPoint &&
      classify_bursting_behavior(synthetic_burst_fields(one)) ==
          BurstVerdict::OneCycle &&
      classify_bursting_behavior(synthetic_burst_fields(two)) ==
          BurstVerdict::TwoCycles;
  if (!controls_ok)
    return report(10, false, "behaviour classifier mislabels a control input");

  ExperimentConfig config = preset_with_seed("s6", kSeedS6);
  GeneratedData data = cached_data(config);

  MseSweepOptions options;
  options.chart_counts = {6, 1};
  options.dims = {3, 6};
  options.trials = 5;
  options.hidden = {128, 64, 16, 8};
  options.mode = config.mode;
  options.alpha = config.alpha;
  options.train = config.autoencoder.train;
  options.knn = config.knn;
  options.expansion_rounds = config.expansion_rounds;
  options.seed = config.seed;
  options.param_match_one_chart = true;
  options.reference_charts = 6;

  const fs::path sweep_file = cache_root() / "sweep_s6.json";
  double atlas_mse, single_mse;
  if (fs::exists(sweep_file)) {
    json j = json::parse(std::ifstream(sweep_file));
    atlas_mse = j.at("atlas");
    single_mse = j.at("single");
  } else {
    MseSweepResult sweep = mse_sweep(data.dataset, options);
    atlas_mse = sweep.median_mse(6, 3);
    single_mse = sweep.median_mse(1, 6);
    fs::create_directories(cache_root());
    std::ofstream(sweep_file)
        << json{{"atlas", atlas_mse}, {"single", single_mse}}.dump(2) << "\n";
  }
  return report(10, atlas_mse < single_mse,
                "bursting sweep medians: 6 charts d=3 -> " + fmt(atlas_mse) +
                    ", 1 chart d=6 (matched) -> " + fmt(single_mse) +
                    "; classifier controls labelled correctly");
}

// ---------------------------------------------------------------------------
// 11. Determinism.

void run_preset_into(const ExperimentConfig& config, const fs::path& dir) {
  fs::create_directories(dir);
  GeneratedData data = generate_data(config);
  write_csv(dir / "points.csv", data.dataset.points);
  Model model = train_model(config, data);
  save_model(dir, model.atlas, model.dynamics);
  Vec p0;
  double phase0 = 0.0;
  if (config.shape_phase) {
    ShapePhase start = shape_phase_split(data.dataset.points.row(0).transpose());
    p0 = start.shape;
    phase0 = start.phase;
  } else {
    p0 = data.dataset.points.row(0).transpose();
  }
  Trajectory traj = rollout(model.atlas, model.dynamics, p0, 100,
                            InitStrategy::NearestPoint, phase0);
  write_trajectory_csv(dir / "trajectory.csv", traj, model.dynamics.has_phase);
}

bool files_identical(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return fa && fb && sa.str() == sb.str();
}

bool criterion11() {
  std::string failures;
  for (const std::string& name : preset_names()) {
    ExperimentConfig config = preset_with_seed(name, pinned_seed(name));
    const fs::path base = cache_root() / ("determinism_" + name);
    run_preset_into(config, base / "run1");
    run_preset_into(config, base / "run2");
    for (const auto& entry : fs::directory_iterator(base / "run1")) {
      const fs::path other = base / "run2" / entry.path().filename();
      if (!fs::exists(other) ||
          !files_identical(entry.path(), other)) {
        failures += name + ":" + entry.path().filename().string() + " ";
      }
    }
  }
  return report(11, failures.empty(),
                failures.empty()
                    ? "all presets bitwise reproducible (manifest, model, "
                      "trajectory)"
                    : "non-deterministic outputs: " + failures);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <criterion 1..11>\n", argv[0]);
    return 2;
  }
  const int criterion = std::atoi(argv[1]);
  bool pass = false;
  try {
    switch (criterion) {
      case 1: pass = criterion1(); break;
      case 2: pass = criterion2(); break;
      case 3: pass = criterion3(); break;
      case 4: pass = criterion4(); break;
      case 5: pass = criterion5(); break;
      case 6: pass = criterion6(); break;
      case 7: pass = criterion7(); break;
      case 8: pass = criterion8(); break;
      case 9: pass = criterion9(); break;
      case 10: pass = criterion10(); break;
      case 11: pass = criterion11(); break;
      default:
        std::fprintf(stderr, "unknown criterion %d\n", criterion);
        return 2;
    }
  } catch (const std::exception& err) {
    std::printf("[FAIL] criterion %d: unhandled exception: %s\n", criterion,
                err.what());
    return 1;
  }
  return pass ? 0 : 1;
}
