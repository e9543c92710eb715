#include <doctest.h>

#include <cmath>

#include "candyman/atlas.hpp"
#include "candyman/autoencoder.hpp"
#include "candyman/errors.hpp"
#include "candyman/rng.hpp"
#include "candyman/whitener.hpp"

using namespace candyman;

namespace {

Mat arc_data(int n) {
  // Quarter-circle arc: a clean 1-D manifold in 2-D.
  Mat data(2, n);
  for (int i = 0; i < n; ++i) {
    const double t = 0.5 * M_PI * i / (n - 1);
    data(0, i) = std::cos(t);
    data(1, i) = std::sin(t);
  }
  return data;
}

}  // namespace

TEST_CASE("plain autoencoder learns a 1-D arc") {
  Mat data = arc_data(30);
  TrainConfig config;
  config.epochs = 800;
  config.lr_init = 0.01;
  config.seed = 4;
  auto [map, report] = train_plain_autoencoder(
      data, {2, 16, 8, 1}, make_arch({2, 16, 8, 1}).acts, {1, 8, 16, 2},
      make_arch({1, 8, 16, 2}).acts, config);
  CHECK(map->ambient_dim() == 2);
  CHECK(map->latent_dim() == 1);
  const Mat recon = map->decode_batch(map->encode_batch(data));
  const double mse = (recon - data).squaredNorm() / data.size();
  CHECK(mse < 1e-3);
  CHECK(report.final_loss() == doctest::Approx(mse).epsilon(0.1));  // loss is logged before the last update
}

TEST_CASE("plain autoencoder validates its architecture") {
  Mat data = arc_data(10);
  TrainConfig config;
  config.epochs = 1;
  auto acts2 = make_arch({2, 4, 1}).acts;
  auto acts_bad = make_arch({1, 4, 3}).acts;
  // Decoder output does not match the ambient dimension.
  CHECK_THROWS_AS(train_plain_autoencoder(data, {2, 4, 1}, acts2, {1, 4, 3},
                                          acts_bad, config),
                  InvalidArchitecture);
  // Bottleneck disagreement.
  CHECK_THROWS_AS(train_plain_autoencoder(data, {2, 4, 1}, acts2, {2, 4, 2},
                                          make_arch({2, 4, 2}).acts, config),
                  InvalidArchitecture);
}

TEST_CASE("pretraining steers the encoder towards given latent targets") {
  Mat data = arc_data(24);
  PretrainSpec spec;
  spec.latent_targets.resize(1, 24);
  for (int i = 0; i < 24; ++i)
    spec.latent_targets(0, i) = -1.0 + 2.0 * i / 23.0;
  TrainConfig config;
  config.epochs = 200;
  config.seed = 8;
  auto [map, report] = train_plain_autoencoder(
      data, {2, 16, 1}, make_arch({2, 16, 1}).acts, {1, 16, 2},
      make_arch({1, 16, 2}).acts, config, &spec);
  // The latent stays monotone along the arc, matching the target ordering.
  Mat latent = map->encode_batch(data);
  int sign_changes = 0;
  for (int i = 2; i < 24; ++i)
    if ((latent(0, i) - latent(0, i - 1)) * (latent(0, i - 1) - latent(0, i - 2)) < 0)
      ++sign_changes;
  CHECK(sign_changes == 0);
}

TEST_CASE("pca_projection returns an orthonormal basis with fixed signs") {
  Rng rng(12);
  Mat data(4, 40);
  for (int i = 0; i < data.size(); ++i) data(i) = rng.uniform(-1.0, 1.0);
  auto [mean, projection] = pca_projection(data, 2);
  CHECK((mean - data.rowwise().mean()).norm() < 1e-14);
  Mat gram = projection * projection.transpose();
  CHECK((gram - Mat::Identity(2, 2)).norm() < 1e-12);
  // Deterministic sign convention: the largest-magnitude entry is positive.
  for (int j = 0; j < 2; ++j) {
    Eigen::Index arg_max = 0;
    projection.row(j).cwiseAbs().maxCoeff(&arg_max);
    CHECK(projection(j, arg_max) > 0.0);
  }
  CHECK_THROWS_AS(pca_projection(data, 4), DataError);
}

TEST_CASE("pca_projection reconstructs data lying in a linear subspace") {
  Rng rng(13);
  Mat basis(5, 2);
  for (int i = 0; i < basis.size(); ++i) basis(i) = rng.uniform(-1.0, 1.0);
  Mat coeffs(2, 30);
  for (int i = 0; i < coeffs.size(); ++i) coeffs(i) = rng.uniform(-1.0, 1.0);
  Mat data = basis * coeffs;
  auto [mean, projection] = pca_projection(data, 2);
  Mat centered = data.colwise() - mean;
  Mat recon = projection.transpose() * (projection * centered);
  CHECK((recon - centered).norm() < 1e-10);
}

TEST_CASE("PCA-anchored autoencoder beats its own linear part") {
  // Data on the arc: PCA alone cannot represent the curvature in 1-D.
  Mat data = arc_data(30);
  TrainConfig config;
  config.epochs = 800;
  config.lr_init = 0.01;
  config.seed = 6;
  auto [map, report] = train_pca_anchored_autoencoder(
      data, 1.0, {2, 16, 8, 1}, make_arch({2, 16, 8, 1}).acts, {1, 8, 16, 2},
      make_arch({1, 8, 16, 2}).acts, config);

  const Mat recon = map->decode_batch(map->encode_batch(data));
  const double mse = (recon - data).squaredNorm() / data.size();

  auto [mean, projection] = pca_projection(data, 1);
  Mat centered = data.colwise() - mean;
  Mat linear = projection.transpose() * (projection * centered);
  const double linear_mse = (linear - centered).squaredNorm() / data.size();
  CHECK(mse < 0.1 * linear_mse);

  // The encode formula is PCA plus the trained correction.
  Vec u = data.col(7);
  Vec expected = map->projection() * (u - map->mean()) +
                 map->enc_correction().forward(u);
  CHECK((map->encode(u) - expected).norm() < 1e-14);
}

TEST_CASE("larger alpha shrinks the encoder correction") {
  Mat data = arc_data(30);
  TrainConfig config;
  config.epochs = 500;
  config.lr_init = 0.01;
  config.seed = 21;
  auto mean_correction = [&](double alpha) {
    auto [map, report] = train_pca_anchored_autoencoder(
        data, alpha, {2, 16, 1}, make_arch({2, 16, 1}).acts, {1, 16, 2},
        make_arch({1, 16, 2}).acts, config);
    return map->enc_correction().forward_batch(data).cwiseAbs().mean();
  };
  CHECK(mean_correction(100.0) < mean_correction(0.0));
}

TEST_CASE("whitener produces identity covariance and inverts exactly") {
  Rng rng(31);
  Mat latent(200, 3);
  for (int i = 0; i < latent.size(); ++i) latent(i) = rng.uniform(-2.0, 2.0);
  latent.col(2) = 10.0 * latent.col(0) + latent.col(2);  // correlate + stretch

  Whitener w = fit_whitener(latent);
  Mat white = w.apply_batch(latent.transpose()).transpose();
  Mat centered = white.rowwise() - white.colwise().mean();
  Mat cov = centered.transpose() * centered / (white.rows() - 1.0);
  CHECK((cov - Mat::Identity(3, 3)).norm() < 1e-8);

  Vec z = latent.row(17).transpose();
  CHECK((w.invert(w.apply(z)) - z).norm() < 1e-10);

  Mat degenerate = Mat::Zero(5, 2);  // zero variance everywhere
  CHECK_THROWS_AS(fit_whitener(degenerate), DataError);
  CHECK_THROWS_AS(fit_whitener(Mat::Zero(1, 2)), DataError);
}
