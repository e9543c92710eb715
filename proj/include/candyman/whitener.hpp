#pragma once

#include "candyman/linalg.hpp"

namespace candyman {

/// Mean subtraction, PCA rotation (no dimension reduction), and
/// per-coordinate standard-deviation scaling.
struct Whitener {
  Vec mean;      // n
  Mat rotation;  // n x n, columns are principal directions
  Vec scales;    // n, per-coordinate standard deviations

  /// diag(1/scales) * rotation^T * (z - mean)
  Vec apply(const Vec& z) const {
    return (rotation.transpose() * (z - mean)).cwiseQuotient(scales);
  }

  Vec invert(const Vec& w) const {
    return mean + rotation * w.cwiseProduct(scales);
  }

  Mat apply_batch(const Mat& z) const;   // columns are samples
  Mat invert_batch(const Mat& w) const;
};

/// Fit from latent points (rows are samples). Throws DataError on fewer
/// than two points or a zero-variance direction.
Whitener fit_whitener(const Mat& latent_points);

}  // namespace candyman
