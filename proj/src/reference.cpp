#include "candyman/reference.hpp"

#include <algorithm>
#include <cmath>

#include "candyman/train.hpp"

namespace candyman::reference {

std::vector<double> forward(const Mlp& mlp, const std::vector<double>& x) {
  std::vector<double> a = x;
  for (int l = 0; l < mlp.num_layers(); ++l) {
    const int out = mlp.layer_dims[l + 1];
    const int in = mlp.layer_dims[l];
    std::vector<double> z(out);
    for (int r = 0; r < out; ++r) {
      double acc = mlp.biases[l](r);
      for (int c = 0; c < in; ++c) acc += mlp.weights[l](r, c) * a[c];
      if (mlp.activations[l] == Activation::Elu && acc < 0.0)
        acc = std::expm1(acc);
      z[r] = acc;
    }
    a = std::move(z);
  }
  return a;
}

std::vector<std::pair<int, double>> k_nearest(const Mat& points, const Vec& q,
                                              int k) {
  const int n = static_cast<int>(points.rows());
  std::vector<std::pair<int, double>> all(n);
  for (int i = 0; i < n; ++i) {
    double d2 = 0.0;
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      const double diff = points(i, j) - q(j);
      d2 += diff * diff;
    }
    all[i] = {i, std::sqrt(d2)};
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  all.resize(std::min<std::size_t>(k, all.size()));
  return all;
}

MlpGrads finite_difference_gradients(const Mlp& mlp, const Mat& xs,
                                     const Mat& targets, const Vec* weights,
                                     double h) {
  Mlp probe = mlp;
  MlpGrads grads = MlpGrads::zeros_like(mlp);
  auto loss_at = [&]() {
    return loss_weighted_mse(probe.forward_batch(xs), targets, weights);
  };
  for (int l = 0; l < mlp.num_layers(); ++l) {
    for (Eigen::Index r = 0; r < mlp.weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < mlp.weights[l].cols(); ++c) {
        const double saved = probe.weights[l](r, c);
        probe.weights[l](r, c) = saved + h;
        const double plus = loss_at();
        probe.weights[l](r, c) = saved - h;
        const double minus = loss_at();
        probe.weights[l](r, c) = saved;
        grads.d_weights[l](r, c) = (plus - minus) / (2.0 * h);
      }
    }
    for (Eigen::Index r = 0; r < mlp.biases[l].size(); ++r) {
      const double saved = probe.biases[l](r);
      probe.biases[l](r) = saved + h;
      const double plus = loss_at();
      probe.biases[l](r) = saved - h;
      const double minus = loss_at();
      probe.biases[l](r) = saved;
      grads.d_biases[l](r) = (plus - minus) / (2.0 * h);
    }
  }
  return grads;
}

}  // namespace candyman::reference
