#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "candyman/mlp.hpp"

namespace candyman {

// Adam defaults from the original paper.
inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

/// Full-batch training schedule: one optimizer step per epoch, staircase
/// exponential learning-rate decay.
struct TrainConfig {
  int epochs = 1000;
  double lr_init = 0.01;
  double decay_rate = 1.0;  // 1.0 disables decay
  int decay_every = 200;    // optimizer steps
  bool staircase = true;
  std::optional<Vec> sample_weights;  // per-sample, nonnegative
  std::uint64_t seed = 0;
};

/// lr at optimizer step s (0-based): lr_init * decay_rate^floor(s/decay_every).
double lr_at_step(const TrainConfig& config, long step);

struct LossReport {
  std::vector<double> per_epoch;
  double final_loss() const { return per_epoch.empty() ? 0.0 : per_epoch.back(); }
};

/// (sum_i w_i ||pred_i - target_i||^2) / (sum_i w_i * dim). Columns are
/// samples. Null weights means uniform.
double loss_weighted_mse(const Mat& preds, const Mat& targets, const Vec* weights);

/// Gradient of loss_weighted_mse with respect to preds.
Mat loss_weighted_mse_gradient(const Mat& preds, const Mat& targets,
                               const Vec* weights);

/// Exact gradient of the (weighted) MSE loss w.r.t. every parameter.
MlpGrads backprop(const Mlp& mlp, const Mat& xs, const Mat& targets,
                  const Vec* sample_weights = nullptr);

struct AdamState {
  std::vector<Mat> m_weights, v_weights;
  std::vector<Vec> m_biases, v_biases;
  long step = 0;  // number of updates applied so far

  static AdamState zeros_like(const Mlp& mlp);
};

/// One Adam update with bias correction; increments state.step.
void adam_step(Mlp& mlp, const MlpGrads& grads, AdamState& state, double lr);

/// Full-batch gradient descent with Adam. xs / targets have one column per
/// sample. Throws TrainingDiverged on NaN loss, naming the epoch.
LossReport train(Mlp& mlp, const Mat& xs, const Mat& targets,
                 const TrainConfig& config);

}  // namespace candyman
