#include "candyman/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "candyman/errors.hpp"

namespace candyman {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_csv(const fs::path& path, const Mat& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(rows(i, j));
    }
    out << '\n';
  }
}

Mat read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataError("ragged CSV: " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("empty CSV: " + path.string());
  Mat mat(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) mat(i, j) = rows[i][j];
  return mat;
}

void save_mlp(const fs::path& path, const Mlp& mlp) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "candyman-mlp 1\n";
  out << "dims";
  for (int d : mlp.layer_dims) out << ' ' << d;
  out << "\nacts";
  for (Activation a : mlp.activations) out << ' ' << activation_name(a);
  out << '\n';
  for (int l = 0; l < mlp.num_layers(); ++l) {
    out << "weights " << l << '\n';
    for (Eigen::Index r = 0; r < mlp.weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < mlp.weights[l].cols(); ++c) {
        if (c > 0) out << ' ';
        out << format_double(mlp.weights[l](r, c));
      }
      out << '\n';
    }
    out << "biases " << l << '\n';
    for (Eigen::Index r = 0; r < mlp.biases[l].size(); ++r) {
      if (r > 0) out << ' ';
      out << format_double(mlp.biases[l](r));
    }
    out << '\n';
  }
}

Mlp load_mlp(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "candyman-mlp" || version != 1)
    throw DataError("not a candyman-mlp v1 file: " + path.string());

  Mlp mlp;
  std::string token;
  in >> token;  // "dims"
  std::string line;
  std::getline(in, line);
  {
    std::stringstream ss(line);
    int d;
    while (ss >> d) mlp.layer_dims.push_back(d);
  }
  in >> token;  // "acts"
  std::getline(in, line);
  {
    std::stringstream ss(line);
    std::string name;
    while (ss >> name) mlp.activations.push_back(activation_from_name(name));
  }
  const int layers = static_cast<int>(mlp.layer_dims.size()) - 1;
  for (int l = 0; l < layers; ++l) {
    int index;
    in >> token >> index;  // "weights" l
    Mat w(mlp.layer_dims[l + 1], mlp.layer_dims[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) in >> w(r, c);
    mlp.weights.push_back(std::move(w));
    in >> token >> index;  // "biases" l
    Vec b(mlp.layer_dims[l + 1]);
    for (Eigen::Index r = 0; r < b.size(); ++r) in >> b(r);
    mlp.biases.push_back(std::move(b));
  }
  if (!in) throw DataError("truncated mlp file: " + path.string());
  return mlp;
}

namespace {

void save_matrix_text(std::ofstream& out, const Mat& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ' ';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

Mat load_matrix_text(std::ifstream& in, Eigen::Index rows, Eigen::Index cols) {
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) in >> m(r, c);
  return m;
}

std::string chart_stem(int id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "chart_%03d", id);
  return buf;
}

void save_whitener(const fs::path& path, const Whitener& w) {
  std::ofstream out(path);
  const auto n = w.mean.size();
  out << "candyman-whitener 1\n" << n << '\n';
  save_matrix_text(out, w.mean.transpose());
  save_matrix_text(out, w.rotation);
  save_matrix_text(out, w.scales.transpose());
}

Whitener load_whitener(const fs::path& path) {
  std::ifstream in(path);
  std::string magic;
  int version = 0;
  Eigen::Index n = 0;
  in >> magic >> version >> n;
  if (magic != "candyman-whitener" || version != 1)
    throw DataError("not a candyman-whitener v1 file: " + path.string());
  Whitener w;
  w.mean = load_matrix_text(in, 1, n).transpose();
  w.rotation = load_matrix_text(in, n, n);
  w.scales = load_matrix_text(in, 1, n).transpose();
  return w;
}

void save_pca_anchor(const fs::path& path, const PcaAnchoredCoordMap& map) {
  std::ofstream out(path);
  out << "candyman-pca-anchor 1\n"
      << map.ambient_dim() << ' ' << map.latent_dim() << '\n';
  save_matrix_text(out, map.mean().transpose());
  save_matrix_text(out, map.projection());
}

}  // namespace

void save_model(const fs::path& dir, const Atlas& atlas,
                const DynamicsSet& dynamics) {
  fs::create_directories(dir);
  write_csv(dir / "points.csv", atlas.points);
  write_csv(dir / "centroids.csv", atlas.centroids);

  json manifest;
  manifest["format"] = "candyman-model";
  manifest["version"] = 1;
  manifest["fingerprint"] = atlas.fingerprint;
  manifest["dt"] = atlas.dt;
  manifest["has_phase"] = dynamics.has_phase;

  json charts = json::array();
  for (const Chart& chart : atlas.charts) {
    const std::string stem = chart_stem(chart.id);
    json entry;
    entry["id"] = chart.id;
    entry["latent_dim"] = chart.latent_dim;
    entry["interior"] = chart.interior;
    entry["border"] = chart.border;
    entry["recon_mse"] = chart.recon_mse;
    entry["final_loss"] = chart.training.final_loss();
    entry["fold_score"] = chart.fold_score;
    entry["restarts_used"] = chart.restarts_used;

    if (auto* plain = dynamic_cast<const MlpCoordMap*>(chart.map.get())) {
      entry["map_type"] = "plain";
      save_mlp(dir / (stem + "_encoder.mlp"), plain->encoder());
      save_mlp(dir / (stem + "_decoder.mlp"), plain->decoder());
    } else if (auto* anchored =
                   dynamic_cast<const PcaAnchoredCoordMap*>(chart.map.get())) {
      entry["map_type"] = "pca_anchored";
      save_pca_anchor(dir / (stem + "_anchor.txt"), *anchored);
      save_mlp(dir / (stem + "_encoder.mlp"), anchored->enc_correction());
      save_mlp(dir / (stem + "_decoder.mlp"), anchored->dec_correction());
    } else {
      throw DataError("save_model: unknown coordinate map type");
    }
    entry["whitening"] = chart.whitener.has_value();
    if (chart.whitener)
      save_whitener(dir / (stem + "_whitener.txt"), *chart.whitener);
    charts.push_back(std::move(entry));
  }
  manifest["charts"] = std::move(charts);

  json dyn = json::array();
  for (const ChartDynamics& d : dynamics.charts) {
    const std::string stem = chart_stem(d.chart_id);
    json entry;
    entry["chart_id"] = d.chart_id;
    entry["final_loss"] = d.f_training.final_loss();
    save_mlp(dir / (stem + "_dynamics.mlp"), d.f);
    entry["has_phase_net"] = d.phase_net.has_value();
    if (d.phase_net) {
      save_mlp(dir / (stem + "_phase.mlp"), *d.phase_net);
      entry["phase_final_loss"] = d.phase_training.final_loss();
    }
    dyn.push_back(std::move(entry));
  }
  manifest["dynamics"] = std::move(dyn);

  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

Model load_model(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw DataError("cannot open model manifest in " + dir.string());
  json manifest = json::parse(in);
  if (manifest.at("format") != "candyman-model" || manifest.at("version") != 1)
    throw DataError("unsupported model format in " + dir.string());

  Model model;
  model.atlas.points = read_csv(dir / "points.csv");
  model.atlas.centroids = read_csv(dir / "centroids.csv");
  model.atlas.fingerprint = manifest.at("fingerprint");
  model.atlas.dt = manifest.at("dt");
  model.dynamics.has_phase = manifest.at("has_phase");

  for (const json& entry : manifest.at("charts")) {
    Chart chart;
    chart.id = entry.at("id");
    chart.latent_dim = entry.at("latent_dim");
    chart.interior = entry.at("interior").get<std::vector<int>>();
    chart.border = entry.at("border").get<std::vector<int>>();
    chart.members = chart.interior;
    chart.members.insert(chart.members.end(), chart.border.begin(),
                         chart.border.end());
    std::sort(chart.members.begin(), chart.members.end());

    const std::string stem = chart_stem(chart.id);
    const std::string map_type = entry.at("map_type");
    if (map_type == "plain") {
      chart.map = std::make_shared<MlpCoordMap>(
          load_mlp(dir / (stem + "_encoder.mlp")),
          load_mlp(dir / (stem + "_decoder.mlp")));
    } else if (map_type == "pca_anchored") {
      std::ifstream anchor(dir / (stem + "_anchor.txt"));
      std::string magic;
      int version = 0;
      Eigen::Index m = 0, d = 0;
      anchor >> magic >> version >> m >> d;
      if (magic != "candyman-pca-anchor" || version != 1)
        throw DataError("bad anchor file for " + stem);
      Vec mean = load_matrix_text(anchor, 1, m).transpose();
      Mat projection = load_matrix_text(anchor, d, m);
      chart.map = std::make_shared<PcaAnchoredCoordMap>(
          std::move(mean), std::move(projection),
          load_mlp(dir / (stem + "_encoder.mlp")),
          load_mlp(dir / (stem + "_decoder.mlp")));
    } else {
      throw DataError("unknown map_type: " + map_type);
    }
    chart.fold_score = entry.value("fold_score", 0.0);
    chart.restarts_used = entry.value("restarts_used", 0);
    if (entry.at("whitening").get<bool>())
      chart.whitener = load_whitener(dir / (stem + "_whitener.txt"));
    finalize_chart_caches(chart, model.atlas.points);
    model.atlas.charts.push_back(std::move(chart));
  }

  model.atlas.interior_of.assign(model.atlas.points.rows(), -1);
  for (const Chart& chart : model.atlas.charts)
    for (int i : chart.interior) model.atlas.interior_of[i] = chart.id;

  for (const json& entry : manifest.at("dynamics")) {
    ChartDynamics d;
    d.chart_id = entry.at("chart_id");
    const std::string stem = chart_stem(d.chart_id);
    d.f = load_mlp(dir / (stem + "_dynamics.mlp"));
    if (entry.at("has_phase_net").get<bool>())
      d.phase_net = load_mlp(dir / (stem + "_phase.mlp"));
    model.dynamics.charts.push_back(std::move(d));
  }
  return model;
}

void write_trajectory_csv(const fs::path& path, const Trajectory& trajectory,
                          bool has_phase) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  if (trajectory.records.empty()) throw DataError("empty trajectory");

  const auto& first = trajectory.records.front();
  out << "step,chart_id";
  for (Eigen::Index i = 0; i < first.z.size(); ++i) out << ",z_" << i;
  out << ",phase";
  for (Eigen::Index i = 0; i < first.ambient.size(); ++i) out << ",x_" << i;
  out << '\n';
  for (const TrajectoryRecord& rec : trajectory.records) {
    out << rec.step << ',' << rec.chart_id;
    for (Eigen::Index i = 0; i < rec.z.size(); ++i)
      out << ',' << format_double(rec.z(i));
    out << ',' << format_double(has_phase ? rec.phase : 0.0);
    for (Eigen::Index i = 0; i < rec.ambient.size(); ++i)
      out << ',' << format_double(rec.ambient(i));
    out << '\n';
  }
}

Trajectory read_trajectory_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  std::string header;
  if (!std::getline(in, header) || header.rfind("step,chart_id", 0) != 0)
    throw DataError("not a trajectory CSV: " + path.string());
  int n_z = 0, n_x = 0;
  {
    std::stringstream ss(header);
    std::string col;
    while (std::getline(ss, col, ',')) {
      if (col.rfind("z_", 0) == 0) ++n_z;
      if (col.rfind("x_", 0) == 0) ++n_x;
    }
  }

  Trajectory traj;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != 2 + n_z + 1 + n_x)
      throw DataError("malformed trajectory row in " + path.string());
    TrajectoryRecord rec;
    rec.step = static_cast<int>(row[0]);
    rec.chart_id = static_cast<int>(row[1]);
    rec.z = Eigen::Map<const Vec>(row.data() + 2, n_z);
    rec.phase = row[2 + n_z];
    rec.ambient = Eigen::Map<const Vec>(row.data() + 3 + n_z, n_x);
    rec.transitioned = !traj.records.empty() &&
                       traj.records.back().chart_id != rec.chart_id;
    if (rec.transitioned) traj.n_transitions += 1;
    traj.records.push_back(std::move(rec));
  }
  if (traj.records.empty()) throw DataError("empty trajectory CSV");
  return traj;
}

}  // namespace candyman
