#pragma once

// Plain serial reference implementations of the numeric kernels, written
// with scalar loops and no linear-algebra library. Tests check the fast
// paths against these, and the benchmark target times both.

#include <utility>
#include <vector>

#include "candyman/linalg.hpp"
#include "candyman/mlp.hpp"

namespace candyman::reference {

/// Scalar-by-scalar forward pass.
std::vector<double> forward(const Mlp& mlp, const std::vector<double>& x);

/// Brute-force exact K nearest neighbours of q among the rows of points,
/// ascending by distance, ties by lower index.
std::vector<std::pair<int, double>> k_nearest(const Mat& points, const Vec& q,
                                              int k);

/// Central finite-difference gradient of the weighted MSE loss with respect
/// to every parameter of mlp. Slow; used as the gradient oracle.
MlpGrads finite_difference_gradients(const Mlp& mlp, const Mat& xs,
                                     const Mat& targets, const Vec* weights,
                                     double h = 1e-6);

}  // namespace candyman::reference
