#include "candyman/train.hpp"

#include <cmath>
#include <string>

#include "candyman/errors.hpp"

namespace candyman {

double lr_at_step(const TrainConfig& config, long step) {
  if (config.decay_rate == 1.0) return config.lr_init;
  const double exponent =
      config.staircase
          ? static_cast<double>(step / config.decay_every)
          : static_cast<double>(step) / config.decay_every;
  return config.lr_init * std::pow(config.decay_rate, exponent);
}

double loss_weighted_mse(const Mat& preds, const Mat& targets,
                         const Vec* weights) {
  if (preds.rows() != targets.rows() || preds.cols() != targets.cols())
    throw DimensionMismatch("loss: shape mismatch");
  const auto n = preds.cols();
  const auto dim = preds.rows();
  if (weights == nullptr) {
    return (preds - targets).squaredNorm() / static_cast<double>(n * dim);
  }
  if (weights->size() != n) throw DimensionMismatch("loss: weight count");
  const double wsum = weights->sum();
  if (wsum <= 0.0) throw DataError("loss: sample weights sum to zero");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    acc += (*weights)(i) * (preds.col(i) - targets.col(i)).squaredNorm();
  return acc / (wsum * dim);
}

Mat loss_weighted_mse_gradient(const Mat& preds, const Mat& targets,
                               const Vec* weights) {
  const auto n = preds.cols();
  const auto dim = preds.rows();
  Mat grad = preds - targets;
  if (weights == nullptr) {
    grad *= 2.0 / static_cast<double>(n * dim);
  } else {
    const double wsum = weights->sum();
    if (wsum <= 0.0) throw DataError("loss: sample weights sum to zero");
    for (Eigen::Index i = 0; i < n; ++i)
      grad.col(i) *= 2.0 * (*weights)(i) / (wsum * dim);
  }
  return grad;
}

MlpGrads backprop(const Mlp& mlp, const Mat& xs, const Mat& targets,
                  const Vec* sample_weights) {
  ForwardCache cache = forward_cached(mlp, xs);
  Mat grad_out =
      loss_weighted_mse_gradient(cache.post.back(), targets, sample_weights);
  return backward(mlp, cache, grad_out);
}

AdamState AdamState::zeros_like(const Mlp& mlp) {
  AdamState s;
  for (int l = 0; l < mlp.num_layers(); ++l) {
    s.m_weights.push_back(Mat::Zero(mlp.weights[l].rows(), mlp.weights[l].cols()));
    s.v_weights.push_back(Mat::Zero(mlp.weights[l].rows(), mlp.weights[l].cols()));
    s.m_biases.push_back(Vec::Zero(mlp.biases[l].size()));
    s.v_biases.push_back(Vec::Zero(mlp.biases[l].size()));
  }
  return s;
}

namespace {

template <typename T>
void adam_update(T& param, const T& grad, T& m, T& v, double lr,
                 double bias1, double bias2) {
  m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * grad;
  v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * grad.cwiseProduct(grad);
  param.array() -= lr * (m.array() / bias1) /
                   ((v.array() / bias2).sqrt() + kAdamEpsilon);
}

}  // namespace

void adam_step(Mlp& mlp, const MlpGrads& grads, AdamState& state, double lr) {
  state.step += 1;
  const double bias1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.step));
  for (int l = 0; l < mlp.num_layers(); ++l) {
    adam_update(mlp.weights[l], grads.d_weights[l], state.m_weights[l],
                state.v_weights[l], lr, bias1, bias2);
    adam_update(mlp.biases[l], grads.d_biases[l], state.m_biases[l],
                state.v_biases[l], lr, bias1, bias2);
  }
}

LossReport train(Mlp& mlp, const Mat& xs, const Mat& targets,
                 const TrainConfig& config) {
  if (xs.cols() == 0) throw DataError("train: empty dataset");
  if (xs.cols() != targets.cols())
    throw DimensionMismatch("train: sample count mismatch");
  const Vec* w =
      config.sample_weights.has_value() ? &*config.sample_weights : nullptr;

  LossReport report;
  report.per_epoch.reserve(config.epochs);
  AdamState state = AdamState::zeros_like(mlp);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    ForwardCache cache = forward_cached(mlp, xs);
    const double loss = loss_weighted_mse(cache.post.back(), targets, w);
    if (!std::isfinite(loss))
      throw TrainingDiverged(epoch, "training diverged at epoch " +
                                        std::to_string(epoch));
    report.per_epoch.push_back(loss);
    Mat grad_out = loss_weighted_mse_gradient(cache.post.back(), targets, w);
    MlpGrads grads = backward(mlp, cache, grad_out);
    adam_step(mlp, grads, state, lr_at_step(config, state.step));
  }
  return report;
}

}  // namespace candyman
