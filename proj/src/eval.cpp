#include "candyman/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "candyman/errors.hpp"
#include "candyman/fourier.hpp"

namespace candyman {

// ---------------------------------------------------------------------------
// Period estimation

PeriodEstimate estimate_period(const Mat& series, double dt) {
  const int n = static_cast<int>(series.rows());
  if (n < 8) throw DataError("estimate_period: series too short");
  const int max_lag = n / 2;

  // RMS amplitude about the mean.
  Mat centered = series.rowwise() - series.colwise().mean();
  const double rms = std::sqrt(centered.squaredNorm() / n);
  const double threshold = 0.01 * rms;

  // Mean self-distance per lag; cap the number of base points so long
  // series stay tractable.
  const int max_base = 256;
  Vec dist(max_lag + 1);
  dist(0) = 0.0;
#pragma omp parallel for schedule(static)
  for (int lag = 1; lag <= max_lag; ++lag) {
    const int span = n - lag;
    const int stride = std::max(1, span / max_base);
    double acc = 0.0;
    int count = 0;
    for (int t = 0; t < span; t += stride) {
      acc += (series.row(t + lag) - series.row(t)).norm();
      ++count;
    }
    dist(lag) = acc / count;
  }

  double global_min = dist.segment(2, max_lag - 1).minCoeff();

  // Smallest local-minimum lag whose distance is within a small slack of
  // the global minimum, so the fundamental period wins over its multiples.
  const double slack = global_min + 0.01 * rms;
  int best_lag = -1;
  for (int lag = 2; lag < max_lag; ++lag) {
    if (dist(lag) <= dist(lag - 1) && dist(lag) <= dist(lag + 1) &&
        dist(lag) <= slack) {
      best_lag = lag;
      break;
    }
  }
  if (best_lag < 0) {
    for (int lag = 2; lag < max_lag; ++lag)
      if (dist(lag) == global_min) {
        best_lag = lag;
        break;
      }
  }
  if (best_lag < 0) best_lag = 2;

  // Parabolic refinement.
  double refined = best_lag;
  const double a = dist(best_lag - 1), b = dist(best_lag), c = dist(best_lag + 1);
  const double denom = a - 2.0 * b + c;
  if (denom > 0.0) refined += 0.5 * (a - c) / denom;

  PeriodEstimate est;
  est.period = refined * dt;
  est.uncertainty = 0.5 * dt;
  est.min_recurrence = dist(best_lag);
  est.threshold = threshold;
  est.aperiodic = dist(best_lag) > threshold;
  return est;
}

// ---------------------------------------------------------------------------
// Torus phase speeds

TorusAngles recover_torus_angles(const Mat& points) {
  const int n = static_cast<int>(points.rows());
  if (points.cols() != 3) throw DataError("recover_torus_angles: need 3-D data");
  TorusAngles angles;
  angles.theta.resize(n);
  angles.phi.resize(n);

  for (int i = 0; i < n; ++i) {
    const double x = points(i, 0), y = points(i, 1), z = points(i, 2);
    const double sin_theta = std::clamp(2.0 * z, -1.0, 1.0);
    const double sin_phi = std::clamp(y / (1.0 + z), -1.0, 1.0);
    const double magnitude =
        std::sqrt(std::max(0.0, 1.0 - sin_theta * sin_theta));

    // The z equation leaves the sign of cos(theta) open. Reconstruct the
    // surface point implied by either sign and keep the branch that lands
    // closer to the input; on-surface points make the true branch exact,
    // and off-surface points get the nearer of the two projections. Where
    // the branches coincide (cos(theta) near zero) either choice works.
    double theta_candidate[2], phi_candidate[2], distance[2];
    for (int s = 0; s < 2; ++s) {
      const double c = (s == 0 ? 1.0 : -1.0) * magnitude;
      const double cp = std::clamp(x / (1.0 + 0.5 * c), -1.0, 1.0);
      theta_candidate[s] = std::atan2(sin_theta, c);
      phi_candidate[s] = std::atan2(sin_phi, cp);
      const Vec on_surface = torus_point(theta_candidate[s], phi_candidate[s]);
      distance[s] = (on_surface - points.row(i).transpose()).norm();
    }
    const int pick = distance[1] < distance[0] ? 1 : 0;
    angles.theta(i) = theta_candidate[pick];
    angles.phi(i) = phi_candidate[pick];

    if (distance[pick] > 0.3)
      throw DataError("recover_torus_angles: point " + std::to_string(i) +
                      " is off the torus surface");
  }

  // Unwrap both angle series.
  for (Vec* series : {&angles.theta, &angles.phi}) {
    double offset = 0.0;
    for (int i = 1; i < n; ++i) {
      double delta = (*series)(i) + offset - (*series)(i - 1);
      while (delta > M_PI) {
        offset -= 2.0 * M_PI;
        delta -= 2.0 * M_PI;
      }
      while (delta < -M_PI) {
        offset += 2.0 * M_PI;
        delta += 2.0 * M_PI;
      }
      (*series)(i) += offset;
    }
  }
  return angles;
}

namespace {

double linear_slope(const Vec& y) {
  const int n = static_cast<int>(y.size());
  const double t_mean = 0.5 * (n - 1);
  const double y_mean = y.mean();
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    num += (i - t_mean) * (y(i) - y_mean);
    den += (i - t_mean) * (i - t_mean);
  }
  return num / den;
}

}  // namespace

std::pair<double, double> phase_speed_error(const Mat& rollout,
                                            const Mat& reference) {
  TorusAngles roll = recover_torus_angles(rollout);
  TorusAngles ref = recover_torus_angles(reference);
  const double poloidal =
      linear_slope(roll.theta) / linear_slope(ref.theta) - 1.0;
  const double toroidal = linear_slope(roll.phi) / linear_slope(ref.phi) - 1.0;
  return {poloidal, toroidal};
}

// ---------------------------------------------------------------------------
// Transition smoothness

namespace {

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  return values[mid];
}

}  // namespace

TransitionSmoothness transition_smoothness(const Trajectory& trajectory) {
  const auto& recs = trajectory.records;
  TransitionSmoothness out;
  if (recs.size() < 3) throw DataError("transition_smoothness: need >= 3 records");

  std::vector<double> within_first, within_second;
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const double d1 = (recs[i].ambient - recs[i - 1].ambient).norm();
    double d2 = 0.0;
    if (i >= 2)
      d2 = (recs[i].ambient - 2.0 * recs[i - 1].ambient + recs[i - 2].ambient)
               .norm();
    if (recs[i].transitioned) {
      out.transition_steps.push_back(recs[i].step);
      out.jump_first.push_back(d1);
      out.jump_second.push_back(d2);
    } else {
      within_first.push_back(d1);
      if (i >= 2 && !recs[i - 1].transitioned) within_second.push_back(d2);
    }
  }
  out.median_first = median_of(within_first);
  out.median_second = median_of(within_second);
  for (double jump : out.jump_first)
    out.worst_first_ratio =
        std::max(out.worst_first_ratio,
                 out.median_first > 0.0 ? jump / out.median_first : 0.0);
  return out;
}

// ---------------------------------------------------------------------------
// Bursting behaviour

std::string burst_verdict_name(BurstVerdict verdict) {
  switch (verdict) {
    case BurstVerdict::Aperiodic: return "aperiodic";
    case BurstVerdict::OneCycle: return "one-cycle";
    case BurstVerdict::TwoCycles: return "two-cycles";
    case BurstVerdict::LongCycle: return "long-cycle";
    case BurstVerdict::FixedPoint: return "fixed-point";
  }
  return "unknown";
}

namespace {

// Minimal period of s, or 0 if none divides cleanly.
int minimal_period(const std::vector<int>& s) {
  const int n = static_cast<int>(s.size());
  for (int p = 1; p <= n / 2; ++p) {
    bool ok = true;
    for (int i = p; i < n && ok; ++i) ok = s[i] == s[i - p];
    if (ok) return p;
  }
  return 0;
}

// Length of the maximal run with period 2 starting at position i.
int alternating_run(const std::vector<int>& s, int i) {
  const int n = static_cast<int>(s.size());
  int len = std::min(2, n - i);
  while (i + len < n && s[i + len] == s[i + len - 2]) ++len;
  return len;
}

}  // namespace

BurstVerdict classify_symbol_sequence(const std::vector<int>& symbols) {
  if (symbols.size() < 4) return BurstVerdict::Aperiodic;
  // Drop a leading transient symbol so the verdict does not depend on the
  // starting offset.
  std::vector<int> s(symbols.begin() + 1, symbols.end());

  const int p = minimal_period(s);
  if (p >= 1 && p <= 2) return BurstVerdict::OneCycle;

  // Two disjoint alternations visited in turn: split into maximal period-2
  // runs and inspect the symbol pairs involved. Run decomposition does not
  // depend on where the periodic unit starts, unlike any analysis of the
  // minimal-period unit itself.
  std::vector<std::pair<int, int>> run_pairs;
  int i = 0;
  const int n = static_cast<int>(s.size());
  while (i < n - 1) {
    const int len = alternating_run(s, i);
    if (len >= 4) {
      int a = s[i], b = s[i + 1];
      if (a > b) std::swap(a, b);
      if (run_pairs.empty() || run_pairs.back() != std::make_pair(a, b))
        run_pairs.emplace_back(a, b);
    }
    i += std::max(len - 1, 1);
  }
  std::vector<std::pair<int, int>> distinct = run_pairs;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() == 2 && run_pairs.size() >= 2 &&
      distinct[0].first != distinct[1].first &&
      distinct[0].second != distinct[1].second)
    return BurstVerdict::TwoCycles;

  return p > 0 ? BurstVerdict::LongCycle : BurstVerdict::Aperiodic;
}

std::vector<int> symbolize_bursts(const Mat& fields) {
  const int n = static_cast<int>(fields.rows());
  Vec s2(n);
  Vec s1(n);
  for (int i = 0; i < n; ++i) {
    s2(i) = fourier_mode(fields.row(i).transpose(), 2).real();
    s1(i) = fourier_mode(fields.row(i).transpose(), 1).real();
  }
  // Robust level of the quasi-steady states.
  std::vector<double> magnitudes(n);
  for (int i = 0; i < n; ++i) magnitudes[i] = std::abs(s2(i));
  std::nth_element(magnitudes.begin(), magnitudes.begin() + n * 9 / 10,
                   magnitudes.end());
  const double level = magnitudes[n * 9 / 10];
  const double hi = 0.5 * level, lo = -0.5 * level;

  std::vector<int> symbols;
  int state = s2(0) > 0.0 ? 1 : -1;
  for (int i = 1; i < n; ++i) {
    if (state == 1 && s2(i) < lo) {
      symbols.push_back(0 + (s1(i) > 0.0 ? 0 : 1));  // + -> - branches
      state = -1;
    } else if (state == -1 && s2(i) > hi) {
      symbols.push_back(2 + (s1(i) > 0.0 ? 0 : 1));  // - -> + branches
      state = 1;
    }
  }
  return symbols;
}

BurstVerdict classify_bursting_behavior(const Mat& fields) {
  const int n = static_cast<int>(fields.rows());
  if (n < 8) throw DataError("classify_bursting_behavior: trajectory too short");

  // Fixed point: the trailing half barely moves.
  const int tail_start = n / 2;
  Mat tail = fields.bottomRows(n - tail_start);
  Mat tail_centered = tail.rowwise() - tail.colwise().mean();
  const double tail_rms = std::sqrt(tail_centered.squaredNorm() / tail.rows());
  Mat all_centered = fields.rowwise() - fields.colwise().mean();
  const double rms = std::sqrt(all_centered.squaredNorm() / n);
  if (tail_rms < 0.01 * std::max(rms, 1e-12)) return BurstVerdict::FixedPoint;

  return classify_symbol_sequence(symbolize_bursts(fields));
}

// ---------------------------------------------------------------------------
// Reconstruction-MSE sweep

double atlas_reconstruction_mse(const Atlas& atlas, const Dataset& dataset) {
  double acc = 0.0;
  for (int i = 0; i < dataset.size(); ++i) {
    const Chart& chart = atlas.charts[atlas.interior_of[i]];
    const Vec u = dataset.points.row(i).transpose();
    acc += (chart.reconstruct(chart.local_coords(u)) - u).squaredNorm();
  }
  return acc / (static_cast<double>(dataset.size()) * dataset.ambient_dim());
}

long autoencoder_params(const std::vector<int>& hidden, int ambient,
                        int latent) {
  std::vector<int> dims;
  dims.push_back(ambient);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(latent);
  for (auto it = hidden.rbegin(); it != hidden.rend(); ++it) dims.push_back(*it);
  dims.push_back(ambient);
  long params = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l)
    params += static_cast<long>(dims[l]) * dims[l + 1] + dims[l + 1];
  return params;
}

std::vector<int> widen_hidden(const std::vector<int>& hidden, int ambient,
                              int latent, long target_params) {
  auto scaled = [&](double s) {
    std::vector<int> widened;
    widened.reserve(hidden.size());
    for (int w : hidden)
      widened.push_back(std::max(latent, static_cast<int>(std::lround(w * s))));
    return widened;
  };
  double lo = 1.0, hi = 1.0;
  while (autoencoder_params(scaled(hi), ambient, latent) < target_params)
    hi *= 2.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (autoencoder_params(scaled(mid), ambient, latent) < target_params)
      lo = mid;
    else
      hi = mid;
  }
  return scaled(hi);
}

double MseSweepResult::median_mse(int n_charts, int latent_dim) const {
  std::vector<double> values;
  for (const SweepCell& cell : cells)
    if (cell.n_charts == n_charts && cell.latent_dim == latent_dim &&
        !cell.diverged)
      values.push_back(cell.mse);
  if (values.empty()) throw DataError("median_mse: no completed trials");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid]
                                : 0.5 * (values[mid - 1] + values[mid]);
}

MseSweepResult mse_sweep(const Dataset& dataset, const MseSweepOptions& options) {
  if (options.trials < 1) throw DataError("mse_sweep: trials must be >= 1");
  const int ambient = dataset.ambient_dim();

  struct Job {
    int n_charts, latent_dim, trial;
    std::vector<int> hidden;
  };
  std::vector<Job> jobs;
  for (int n_charts : options.chart_counts) {
    for (int dim : options.dims) {
      std::vector<int> hidden = options.hidden;
      if (n_charts == 1 && options.param_match_one_chart) {
        const long target = options.reference_charts *
                            autoencoder_params(options.hidden, ambient, dim);
        hidden = widen_hidden(options.hidden, ambient, dim, target);
      }
      for (int trial = 0; trial < options.trials; ++trial)
        jobs.push_back({n_charts, dim, trial, hidden});
    }
  }

  MseSweepResult result;
  result.cells.resize(jobs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, options.jobs)) if (options.jobs > 1)
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const Job& job = jobs[j];
    SweepCell cell;
    cell.n_charts = job.n_charts;
    cell.latent_dim = job.latent_dim;
    cell.trial = job.trial;

    AtlasConfig config;
    config.n_charts = job.n_charts;
    config.knn = options.knn;
    config.expansion_rounds = options.expansion_rounds;
    config.seed = options.seed + 7919ull * j + job.trial;
    config.chart.latent_dim = job.latent_dim;
    std::vector<int> enc_dims;
    enc_dims.push_back(ambient);
    enc_dims.insert(enc_dims.end(), job.hidden.begin(), job.hidden.end());
    enc_dims.push_back(job.latent_dim);
    std::vector<int> dec_dims(enc_dims.rbegin(), enc_dims.rend());
    config.chart.encoder = make_arch(enc_dims);
    config.chart.decoder = make_arch(dec_dims);
    config.chart.train = options.train;
    config.chart.mode = options.mode;
    config.chart.alpha = options.alpha;

    try {
      Atlas atlas = build_atlas(dataset, config);
      cell.mse = atlas_reconstruction_mse(atlas, dataset);
    } catch (const TrainingDiverged&) {
      cell.diverged = true;
      cell.mse = std::numeric_limits<double>::quiet_NaN();
    }
    result.cells[j] = cell;
  }
  return result;
}

}  // namespace candyman
