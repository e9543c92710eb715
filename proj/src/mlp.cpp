#include "candyman/mlp.hpp"

#include <cmath>

#include "candyman/errors.hpp"
#include "candyman/rng.hpp"

namespace candyman {

std::string activation_name(Activation a) {
  return a == Activation::Elu ? "elu" : "linear";
}

Activation activation_from_name(const std::string& name) {
  if (name == "elu") return Activation::Elu;
  if (name == "linear") return Activation::Linear;
  throw ConfigError("unknown activation: " + name);
}

double elu(double z) { return z >= 0.0 ? z : std::expm1(z); }

double elu_derivative(double z) { return z >= 0.0 ? 1.0 : std::exp(z); }

long Mlp::num_parameters() const {
  long n = 0;
  for (int l = 0; l < num_layers(); ++l)
    n = n + weights[l].size() + biases[l].size();
  return n;
}

bool Mlp::all_finite() const {
  for (int l = 0; l < num_layers(); ++l)
    if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
  return true;
}

namespace {

void apply_activation(Activation a, Mat& z) {
  if (a == Activation::Elu)
    z = z.unaryExpr([](double v) { return elu(v); });
}

}  // namespace

Vec Mlp::forward(const Vec& x) const {
  if (x.size() != input_dim())
    throw DimensionMismatch("forward: input has dim " +
                            std::to_string(x.size()) + ", expected " +
                            std::to_string(input_dim()));
  Vec a = x;
  for (int l = 0; l < num_layers(); ++l) {
    Vec z = weights[l] * a + biases[l];
    if (activations[l] == Activation::Elu)
      z = z.unaryExpr([](double v) { return elu(v); });
    a = std::move(z);
  }
  return a;
}

Mat Mlp::forward_batch(const Mat& x) const {
  if (x.rows() != input_dim())
    throw DimensionMismatch("forward_batch: input dim mismatch");
  Mat a = x;
  for (int l = 0; l < num_layers(); ++l) {
    Mat z = (weights[l] * a).colwise() + biases[l];
    apply_activation(activations[l], z);
    a = std::move(z);
  }
  return a;
}

Mlp glorot_init(const std::vector<int>& layer_dims,
                const std::vector<Activation>& activations,
                std::uint64_t seed) {
  if (layer_dims.size() < 2)
    throw InvalidArchitecture("need at least two layer dims");
  for (int d : layer_dims)
    if (d < 1) throw InvalidArchitecture("layer dims must be positive");
  if (activations.size() != layer_dims.size() - 1)
    throw InvalidArchitecture("need one activation per layer gap");

  Mlp mlp;
  mlp.layer_dims = layer_dims;
  mlp.activations = activations;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int fan_in = layer_dims[l];
    const int fan_out = layer_dims[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Mat w(fan_out, fan_in);
    // Row-major fill order so serialization round trips reproduce draws.
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-limit, limit);
    mlp.weights.push_back(std::move(w));
    mlp.biases.push_back(Vec::Zero(fan_out));
  }
  return mlp;
}

ForwardCache forward_cached(const Mlp& mlp, const Mat& x) {
  if (x.rows() != mlp.input_dim())
    throw DimensionMismatch("forward_cached: input dim mismatch");
  ForwardCache cache;
  cache.post.push_back(x);
  for (int l = 0; l < mlp.num_layers(); ++l) {
    Mat z = (mlp.weights[l] * cache.post.back()).colwise() + mlp.biases[l];
    cache.pre.push_back(z);
    apply_activation(mlp.activations[l], z);
    cache.post.push_back(std::move(z));
  }
  return cache;
}

MlpGrads MlpGrads::zeros_like(const Mlp& mlp) {
  MlpGrads g;
  for (int l = 0; l < mlp.num_layers(); ++l) {
    g.d_weights.push_back(Mat::Zero(mlp.weights[l].rows(), mlp.weights[l].cols()));
    g.d_biases.push_back(Vec::Zero(mlp.biases[l].size()));
  }
  return g;
}

MlpGrads backward(const Mlp& mlp, const ForwardCache& cache,
                  const Mat& grad_output, Mat* grad_input) {
  const int L = mlp.num_layers();
  if (grad_output.rows() != mlp.output_dim() ||
      grad_output.cols() != cache.post[0].cols())
    throw DimensionMismatch("backward: output gradient shape mismatch");

  MlpGrads grads;
  grads.d_weights.resize(L);
  grads.d_biases.resize(L);

  Mat delta = grad_output;
  for (int l = L - 1; l >= 0; --l) {
    if (mlp.activations[l] == Activation::Elu) {
      delta.array() *=
          cache.pre[l].unaryExpr([](double v) { return elu_derivative(v); }).array();
    }
    grads.d_weights[l].noalias() = delta * cache.post[l].transpose();
    grads.d_biases[l] = delta.rowwise().sum();
    if (l > 0 || grad_input != nullptr)
      delta = mlp.weights[l].transpose() * delta;
  }
  if (grad_input != nullptr) *grad_input = std::move(delta);
  return grads;
}

}  // namespace candyman
