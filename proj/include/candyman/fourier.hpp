#pragma once

#include <complex>

#include <Eigen/Dense>

#include "candyman/linalg.hpp"

namespace candyman {

using CVec = Eigen::VectorXcd;

/// Normalized real-to-complex FFT: returns coefficients c_k, k = 0..n/2,
/// of u(x) = sum_k c_k e^{ikx} on the 2*pi-periodic grid x_j = 2*pi*j/n.
CVec rfft(const Vec& u);

/// Inverse of rfft; n is the grid size.
Vec irfft(const CVec& coeffs, int n);

/// Circularly translate the field: coefficients c_k -> c_k e^{ik*shift}.
Vec fourier_shift(const Vec& u, double shift);

/// c_k of mode k (k = 1 or 2 mostly) of a real field.
std::complex<double> fourier_mode(const Vec& u, int k);

}  // namespace candyman
