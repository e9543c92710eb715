#include "candyman/autoencoder.hpp"

#include <cmath>
#include <string>

#include "candyman/errors.hpp"

namespace candyman {

Mat CoordMap::encode_batch(const Mat& u) const {
  Mat out(latent_dim(), u.cols());
  for (Eigen::Index i = 0; i < u.cols(); ++i) out.col(i) = encode(u.col(i));
  return out;
}

Mat CoordMap::decode_batch(const Mat& h) const {
  Mat out(ambient_dim(), h.cols());
  for (Eigen::Index i = 0; i < h.cols(); ++i) out.col(i) = decode(h.col(i));
  return out;
}

namespace {

void check_arch(const std::vector<int>& encoder_dims,
                const std::vector<int>& decoder_dims, Eigen::Index ambient) {
  if (encoder_dims.size() < 2 || decoder_dims.size() < 2)
    throw InvalidArchitecture("autoencoder: need at least two dims per half");
  if (encoder_dims.front() != ambient || decoder_dims.back() != ambient)
    throw InvalidArchitecture("autoencoder: outer dims must match data dim " +
                              std::to_string(ambient));
  if (encoder_dims.back() != decoder_dims.front())
    throw InvalidArchitecture("autoencoder: bottleneck dims disagree");
}

}  // namespace

std::pair<std::shared_ptr<MlpCoordMap>, LossReport> train_plain_autoencoder(
    const Mat& data, const std::vector<int>& encoder_dims,
    const std::vector<Activation>& encoder_acts,
    const std::vector<int>& decoder_dims,
    const std::vector<Activation>& decoder_acts, const TrainConfig& config,
    const PretrainSpec* pretrain) {
  check_arch(encoder_dims, decoder_dims, data.rows());

  std::vector<int> combined_dims = encoder_dims;
  combined_dims.insert(combined_dims.end(), decoder_dims.begin() + 1,
                       decoder_dims.end());
  std::vector<Activation> combined_acts = encoder_acts;
  combined_acts.insert(combined_acts.end(), decoder_acts.begin(),
                       decoder_acts.end());

  Mlp combined = glorot_init(combined_dims, combined_acts, config.seed);
  LossReport report;
  if (pretrain == nullptr) {
    report = train(combined, data, data, config);
  } else {
    // Anchored run: split the network at the bottleneck and optimize
    // reconstruction plus the latent anchoring penalty. Training the halves
    // with separate Adam states is identical to training the combined
    // network, since Adam updates are elementwise.
    const int split = static_cast<int>(encoder_dims.size()) - 1;
    Mlp enc, dec;
    enc.layer_dims = encoder_dims;
    dec.layer_dims = decoder_dims;
    for (int l = 0; l < combined.num_layers(); ++l) {
      Mlp& half = l < split ? enc : dec;
      half.weights.push_back(std::move(combined.weights[l]));
      half.biases.push_back(std::move(combined.biases[l]));
      half.activations.push_back(combined.activations[l]);
    }
    AdamState enc_state = AdamState::zeros_like(enc);
    AdamState dec_state = AdamState::zeros_like(dec);
    const Vec* w =
        config.sample_weights.has_value() ? &*config.sample_weights : nullptr;
    const Mat& targets = pretrain->latent_targets;

    report.per_epoch.reserve(config.epochs);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      // Full-strength anchor while the embedding forms, then a linear ramp
      // to zero: the anchor's bias must not limit the final reconstruction
      // accuracy. Ramping inside one run keeps the optimizer moments
      // continuous; restarting them would undo the anchored embedding.
      const int hold = config.epochs / 4;
      const double ramp =
          epoch < hold ? 1.0
                       : std::max(0.0, 1.0 - static_cast<double>(epoch - hold) /
                                             std::max(1, config.epochs / 2));
      const double lambda = pretrain->weight * ramp;
      ForwardCache enc_cache = forward_cached(enc, data);
      const Mat& h = enc_cache.post.back();
      ForwardCache dec_cache = forward_cached(dec, h);
      const Mat& recon = dec_cache.post.back();

      const double loss = loss_weighted_mse(recon, data, w) +
                          lambda * loss_weighted_mse(h, targets, w);
      if (!std::isfinite(loss))
        throw TrainingDiverged(epoch, "anchored training diverged at epoch " +
                                          std::to_string(epoch));
      report.per_epoch.push_back(loss);

      Mat g_recon = loss_weighted_mse_gradient(recon, data, w);
      Mat g_h;
      MlpGrads dec_grads = backward(dec, dec_cache, g_recon, &g_h);
      g_h += lambda * loss_weighted_mse_gradient(h, targets, w);
      MlpGrads enc_grads = backward(enc, enc_cache, g_h);

      const double lr = lr_at_step(config, enc_state.step);
      adam_step(enc, enc_grads, enc_state, lr);
      adam_step(dec, dec_grads, dec_state, lr);
    }
    for (int l = 0; l < static_cast<int>(combined_dims.size()) - 1; ++l) {
      Mlp& half = l < split ? enc : dec;
      const int ll = l < split ? l : l - split;
      combined.weights[l] = std::move(half.weights[ll]);
      combined.biases[l] = std::move(half.biases[ll]);
    }
  }

  const int split = static_cast<int>(encoder_dims.size()) - 1;
  Mlp encoder, decoder;
  encoder.layer_dims = encoder_dims;
  decoder.layer_dims = decoder_dims;
  for (int l = 0; l < combined.num_layers(); ++l) {
    Mlp& half = l < split ? encoder : decoder;
    half.weights.push_back(combined.weights[l]);
    half.biases.push_back(combined.biases[l]);
    half.activations.push_back(combined.activations[l]);
  }
  return {std::make_shared<MlpCoordMap>(std::move(encoder), std::move(decoder)),
          std::move(report)};
}

std::pair<Vec, Mat> pca_projection(const Mat& data, int d) {
  const auto m = data.rows();
  const auto n = data.cols();
  if (d >= m) throw DataError("pca_projection: d must be below ambient dim");
  if (n < d + 1) throw DataError("pca_projection: need at least d+1 samples");

  Vec mean = data.rowwise().mean();
  Mat centered = data.colwise() - mean;
  Mat cov = centered * centered.transpose() / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Mat> eig(cov);

  Mat projection(d, m);
  for (int j = 0; j < d; ++j) {
    Vec v = eig.eigenvectors().col(m - 1 - j);
    Eigen::Index arg_max = 0;
    v.cwiseAbs().maxCoeff(&arg_max);
    if (v(arg_max) < 0.0) v = -v;
    projection.row(j) = v.transpose();
  }
  return {std::move(mean), std::move(projection)};
}

std::pair<std::shared_ptr<PcaAnchoredCoordMap>, LossReport>
train_pca_anchored_autoencoder(const Mat& data, double alpha,
                               const std::vector<int>& encoder_dims,
                               const std::vector<Activation>& encoder_acts,
                               const std::vector<int>& decoder_dims,
                               const std::vector<Activation>& decoder_acts,
                               const TrainConfig& config) {
  check_arch(encoder_dims, decoder_dims, data.rows());
  const int d = encoder_dims.back();
  const auto m = data.rows();
  const auto n = data.cols();

  auto [mean, projection] = pca_projection(data, d);

  Mlp enc = glorot_init(encoder_dims, encoder_acts, config.seed);
  Mlp dec = glorot_init(decoder_dims, decoder_acts, config.seed + 1);
  AdamState enc_state = AdamState::zeros_like(enc);
  AdamState dec_state = AdamState::zeros_like(dec);

  const Vec* w =
      config.sample_weights.has_value() ? &*config.sample_weights : nullptr;
  const double wsum = w != nullptr ? w->sum() : static_cast<double>(n);
  if (wsum <= 0.0) throw DataError("pca_anchored: weights sum to zero");

  const Mat h0 = projection * (data.colwise() - mean);

  LossReport report;
  report.per_epoch.reserve(config.epochs);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    ForwardCache enc_cache = forward_cached(enc, data);
    const Mat& he = enc_cache.post.back();       // d x n
    Mat h = h0 + he;
    ForwardCache dec_cache = forward_cached(dec, h);
    Mat recon =
        ((projection.transpose() * h) + dec_cache.post.back()).colwise() + mean;

    const double recon_loss = loss_weighted_mse(recon, data, w);
    const double penalty =
        w == nullptr
            ? he.squaredNorm() / static_cast<double>(n * d)
            : [&] {
                double acc = 0.0;
                for (Eigen::Index i = 0; i < n; ++i)
                  acc += (*w)(i)*he.col(i).squaredNorm();
                return acc / (wsum * d);
              }();
    const double loss = recon_loss + alpha * penalty;
    if (!std::isfinite(loss))
      throw TrainingDiverged(epoch, "pca_anchored training diverged at epoch " +
                                        std::to_string(epoch));
    report.per_epoch.push_back(loss);

    // d(recon_loss)/d(recon).
    Mat g_recon = loss_weighted_mse_gradient(recon, data, w);
    // Through decode(h) = mean + P^T h + D(h).
    Mat g_h_from_dec;
    MlpGrads dec_grads = backward(dec, dec_cache, g_recon, &g_h_from_dec);
    Mat g_h = projection * g_recon + g_h_from_dec;
    // Penalty contribution: d/d(he) of alpha * weighted mean |he|^2.
    Mat g_he = g_h;
    if (w == nullptr) {
      g_he += (2.0 * alpha / static_cast<double>(n * d)) * he;
    } else {
      for (Eigen::Index i = 0; i < n; ++i)
        g_he.col(i) += (2.0 * alpha * (*w)(i) / (wsum * d)) * he.col(i);
    }
    MlpGrads enc_grads = backward(enc, enc_cache, g_he);

    const double lr = lr_at_step(config, enc_state.step);
    adam_step(enc, enc_grads, enc_state, lr);
    adam_step(dec, dec_grads, dec_state, lr);
  }

  return {std::make_shared<PcaAnchoredCoordMap>(std::move(mean),
                                                std::move(projection),
                                                std::move(enc), std::move(dec)),
          std::move(report)};
}

}  // namespace candyman
