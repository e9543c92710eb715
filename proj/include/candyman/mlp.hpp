#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "candyman/linalg.hpp"

namespace candyman {

enum class Activation { Elu, Linear };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

/// Fully-connected feedforward network. weights[l] has shape
/// layer_dims[l+1] x layer_dims[l]; activations[l] is applied after the
/// affine map of layer l.
struct Mlp {
  std::vector<int> layer_dims;
  std::vector<Mat> weights;
  std::vector<Vec> biases;
  std::vector<Activation> activations;

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  int num_layers() const { return static_cast<int>(weights.size()); }
  long num_parameters() const;
  bool all_finite() const;

  Vec forward(const Vec& x) const;
  /// Columns are samples.
  Mat forward_batch(const Mat& x) const;
};

/// Glorot-uniform weights, zero biases. Deterministic given seed.
Mlp glorot_init(const std::vector<int>& layer_dims,
                const std::vector<Activation>& activations,
                std::uint64_t seed);

/// Per-layer activations and pre-activations saved during a batch forward
/// pass; post[0] is the input batch.
struct ForwardCache {
  std::vector<Mat> pre;   // pre[l]: dims[l+1] x N
  std::vector<Mat> post;  // post[l]: dims[l] x N, post[num_layers] = output
};

ForwardCache forward_cached(const Mlp& mlp, const Mat& x);

struct MlpGrads {
  std::vector<Mat> d_weights;
  std::vector<Vec> d_biases;

  static MlpGrads zeros_like(const Mlp& mlp);
};

/// Backpropagate an arbitrary output gradient (output_dim x N) through the
/// network. If grad_input is non-null it receives dLoss/dInput.
MlpGrads backward(const Mlp& mlp, const ForwardCache& cache,
                  const Mat& grad_output, Mat* grad_input = nullptr);

double elu(double z);
double elu_derivative(double z);

}  // namespace candyman
