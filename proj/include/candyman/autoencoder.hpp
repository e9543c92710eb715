#pragma once

#include <memory>

#include "candyman/mlp.hpp"
#include "candyman/train.hpp"

namespace candyman {

/// Invertible-in-spirit coordinate map of a chart: encode is the coordinate
/// map, decode its trained approximate inverse.
class CoordMap {
 public:
  virtual ~CoordMap() = default;
  virtual int ambient_dim() const = 0;
  virtual int latent_dim() const = 0;
  virtual Vec encode(const Vec& u) const = 0;
  virtual Vec decode(const Vec& h) const = 0;
  virtual Mat encode_batch(const Mat& u) const;  // columns are samples
  virtual Mat decode_batch(const Mat& h) const;
};

/// Plain autoencoder: encoder and decoder are free Mlps trained end to end.
class MlpCoordMap : public CoordMap {
 public:
  MlpCoordMap(Mlp encoder, Mlp decoder)
      : encoder_(std::move(encoder)), decoder_(std::move(decoder)) {}

  int ambient_dim() const override { return encoder_.input_dim(); }
  int latent_dim() const override { return encoder_.output_dim(); }
  Vec encode(const Vec& u) const override { return encoder_.forward(u); }
  Vec decode(const Vec& h) const override { return decoder_.forward(h); }
  Mat encode_batch(const Mat& u) const override { return encoder_.forward_batch(u); }
  Mat decode_batch(const Mat& h) const override { return decoder_.forward_batch(h); }

  const Mlp& encoder() const { return encoder_; }
  const Mlp& decoder() const { return decoder_; }

 private:
  Mlp encoder_, decoder_;
};

/// PCA-anchored autoencoder:
///   encode(u) = P (u - mean) + E(u)
///   decode(h) = mean + P^T h + D(h)
/// with P the rank-d PCA projection of the chart's data and E, D trained
/// Mlp corrections.
class PcaAnchoredCoordMap : public CoordMap {
 public:
  PcaAnchoredCoordMap(Vec mean, Mat projection, Mlp enc_correction,
                      Mlp dec_correction)
      : mean_(std::move(mean)),
        projection_(std::move(projection)),
        enc_correction_(std::move(enc_correction)),
        dec_correction_(std::move(dec_correction)) {}

  int ambient_dim() const override { return static_cast<int>(projection_.cols()); }
  int latent_dim() const override { return static_cast<int>(projection_.rows()); }
  Vec encode(const Vec& u) const override {
    return projection_ * (u - mean_) + enc_correction_.forward(u);
  }
  Vec decode(const Vec& h) const override {
    return mean_ + projection_.transpose() * h + dec_correction_.forward(h);
  }
  Mat encode_batch(const Mat& u) const override {
    return projection_ * (u.colwise() - mean_) + enc_correction_.forward_batch(u);
  }
  Mat decode_batch(const Mat& h) const override {
    return ((projection_.transpose() * h) + dec_correction_.forward_batch(h))
        .colwise() + mean_;
  }

  const Vec& mean() const { return mean_; }
  const Mat& projection() const { return projection_; }
  const Mlp& enc_correction() const { return enc_correction_; }
  const Mlp& dec_correction() const { return dec_correction_; }

 private:
  Vec mean_;
  Mat projection_;  // d x m, rows orthonormal
  Mlp enc_correction_;  // m -> d
  Mlp dec_correction_;  // d -> m
};

/// Optional latent anchoring for train_plain_autoencoder: the joint
/// reconstruction loss gains a penalty weight * mean |enc(u) - target|^2
/// pulling the bottleneck towards the given latent targets (latent_dim x n,
/// aligned with the data columns). Used to steer charts away from folded
/// parameterizations that plain reconstruction training cannot detect. The
/// penalty is part of the loss for the whole run; a separate pretraining
/// phase does not survive the restart of the optimizer moments, whose first
/// steps move every weight by the full learning rate.
struct PretrainSpec {
  Mat latent_targets;
  double weight = 1.0;
};

/// Train a plain autoencoder end to end on data (columns are samples).
/// encoder_dims must end, and decoder_dims begin, with the latent dim.
std::pair<std::shared_ptr<MlpCoordMap>, LossReport> train_plain_autoencoder(
    const Mat& data, const std::vector<int>& encoder_dims,
    const std::vector<Activation>& encoder_acts,
    const std::vector<int>& decoder_dims,
    const std::vector<Activation>& decoder_acts, const TrainConfig& config,
    const PretrainSpec* pretrain = nullptr);

/// Train a PCA-anchored autoencoder. Loss is reconstruction MSE plus
/// alpha times the mean squared magnitude of the encoder correction E(u),
/// which discourages E from duplicating the PCA projection.
std::pair<std::shared_ptr<PcaAnchoredCoordMap>, LossReport>
train_pca_anchored_autoencoder(const Mat& data, double alpha,
                               const std::vector<int>& encoder_dims,
                               const std::vector<Activation>& encoder_acts,
                               const std::vector<int>& decoder_dims,
                               const std::vector<Activation>& decoder_acts,
                               const TrainConfig& config);

/// Rank-d PCA of data columns: returns (mean, d x m projection with
/// orthonormal rows, deterministic signs).
std::pair<Vec, Mat> pca_projection(const Mat& data, int d);

}  // namespace candyman
