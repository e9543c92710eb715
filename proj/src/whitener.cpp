#include "candyman/whitener.hpp"

#include <cmath>

#include "candyman/errors.hpp"

namespace candyman {

Mat Whitener::apply_batch(const Mat& z) const {
  Mat centered = z.colwise() - mean;
  Mat rotated = rotation.transpose() * centered;
  return scales.cwiseInverse().asDiagonal() * rotated;
}

Mat Whitener::invert_batch(const Mat& w) const {
  Mat scaled = scales.asDiagonal() * w;
  return (rotation * scaled).colwise() + mean;
}

Whitener fit_whitener(const Mat& latent_points) {
  const auto n = latent_points.rows();
  const auto d = latent_points.cols();
  if (n < 2) throw DataError("fit_whitener: need at least two points");

  Whitener w;
  w.mean = latent_points.colwise().mean().transpose();
  Mat centered = latent_points.rowwise() - w.mean.transpose();
  Mat cov = centered.transpose() * centered / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
  // Descending eigenvalue order, deterministic sign (largest-magnitude
  // component of each direction made positive).
  Mat rotation(d, d);
  Vec variances(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Vec v = eig.eigenvectors().col(d - 1 - j);
    Eigen::Index arg_max = 0;
    v.cwiseAbs().maxCoeff(&arg_max);
    if (v(arg_max) < 0.0) v = -v;
    rotation.col(j) = v;
    variances(j) = eig.eigenvalues()(d - 1 - j);
  }

  const double floor = 1e-12 * std::max(1.0, variances.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < d; ++j)
    if (variances(j) <= floor)
      throw DataError("fit_whitener: degenerate direction " + std::to_string(j));

  w.rotation = std::move(rotation);
  w.scales = variances.cwiseSqrt();
  return w;
}

}  // namespace candyman
