#pragma once

#include <string>
#include <vector>

#include "candyman/atlas.hpp"
#include "candyman/dynamics.hpp"

namespace candyman {

// ---------------------------------------------------------------------------
// Period estimation

struct PeriodEstimate {
  double period = 0.0;       // in the units of dt
  double uncertainty = 0.0;  // half the lag grid spacing
  bool aperiodic = false;    // no recurrence below the threshold
  double min_recurrence = 0.0;  // best mean self-distance found
  double threshold = 0.0;
};

/// Recurrence-based: the smallest lag (near-)minimizing the mean distance
/// between the series and its lagged self, refined by parabolic
/// interpolation. Aperiodic when the best recurrence exceeds 1% of the
/// series' RMS amplitude; a period is still reported for diagnostics.
/// Rows of series are samples.
PeriodEstimate estimate_period(const Mat& series, double dt);

// ---------------------------------------------------------------------------
// Torus phase speeds

struct TorusAngles {
  Vec theta;  // poloidal, unwrapped
  Vec phi;    // toroidal, unwrapped
};

/// Invert the torus surface map on each row, tolerating moderate
/// off-surface excursions (the angles of the nearest branch are still
/// meaningful for trend fitting). Throws DataError when a point sits
/// further than 0.3 from the surface.
TorusAngles recover_torus_angles(const Mat& points);

/// Signed relative errors (poloidal, toroidal) of the rollout's linear
/// angle trends against the reference trajectory's.
std::pair<double, double> phase_speed_error(const Mat& rollout,
                                            const Mat& reference);

// ---------------------------------------------------------------------------
// Transition smoothness

struct TransitionSmoothness {
  std::vector<int> transition_steps;
  std::vector<double> jump_first;    // |dx| at each transition
  std::vector<double> jump_second;   // |d2x| at each transition
  double median_first = 0.0;         // within-chart medians
  double median_second = 0.0;
  double worst_first_ratio = 0.0;    // max jump / within-chart median
};

TransitionSmoothness transition_smoothness(const Trajectory& trajectory);

// ---------------------------------------------------------------------------
// Bursting behaviour

enum class BurstVerdict { Aperiodic, OneCycle, TwoCycles, LongCycle, FixedPoint };

std::string burst_verdict_name(BurstVerdict verdict);

/// Classify a burst-event symbol sequence. one-cycle: a single repeating
/// two-orbit alternation; two-cycles: switching between two disjoint
/// alternations; long-cycle: one loop through more than two orbits.
BurstVerdict classify_symbol_sequence(const std::vector<int>& symbols);

/// Burst events from the real part of the second spatial Fourier mode:
/// hysteresis crossings between the two quasi-steady levels, with the sign
/// of the first mode distinguishing the branch taken.
std::vector<int> symbolize_bursts(const Mat& fields);

/// Fixed-point when the trailing half of the trajectory barely moves;
/// otherwise recurrence analysis on the burst symbols. Rows are fields.
BurstVerdict classify_bursting_behavior(const Mat& fields);

// ---------------------------------------------------------------------------
// Reconstruction-MSE sweep

struct SweepCell {
  int n_charts = 0;
  int latent_dim = 0;
  int trial = 0;
  double mse = 0.0;
  bool diverged = false;
};

struct MseSweepResult {
  std::vector<SweepCell> cells;
  double median_mse(int n_charts, int latent_dim) const;
};

struct MseSweepOptions {
  std::vector<int> chart_counts;
  std::vector<int> dims;
  int trials = 5;
  std::vector<int> hidden;  // encoder hidden widths, e.g. {128, 64, 16, 8}
  AutoencoderMode mode = AutoencoderMode::PcaAnchored;
  double alpha = 1.0;
  TrainConfig train;
  int knn = 4;
  int expansion_rounds = 2;
  std::uint64_t seed = 0;
  int jobs = 1;
  /// Widen single-chart architectures to roughly match the total parameter
  /// count of a reference_charts-chart atlas of the base architecture.
  bool param_match_one_chart = true;
  int reference_charts = 6;
};

/// Trains a fresh atlas per (n_charts, dim, trial) cell and reports the
/// whole-dataset reconstruction MSE through each point's interior chart.
MseSweepResult mse_sweep(const Dataset& dataset, const MseSweepOptions& options);

/// Atlas-wide reconstruction MSE (each point through its interior chart).
double atlas_reconstruction_mse(const Atlas& atlas, const Dataset& dataset);

/// Scale hidden widths so a (in -> hidden -> out -> hidden reversed -> in)
/// autoencoder has roughly target_params trainable parameters.
std::vector<int> widen_hidden(const std::vector<int>& hidden, int ambient,
                              int latent, long target_params);

/// Trainable parameters of the autoencoder with the given shapes.
long autoencoder_params(const std::vector<int>& hidden, int ambient, int latent);

}  // namespace candyman
