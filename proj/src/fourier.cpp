#include "candyman/fourier.hpp"

#include <fftw3.h>

#include <mutex>

#include "candyman/errors.hpp"

namespace candyman {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

CVec rfft(const Vec& u) {
  const int n = static_cast<int>(u.size());
  CVec out(n / 2 + 1);
  Vec in = u;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_dft_r2c_1d(
        n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
        FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out / static_cast<double>(n);
}

Vec irfft(const CVec& coeffs, int n) {
  if (coeffs.size() != n / 2 + 1)
    throw DimensionMismatch("irfft: coefficient count mismatch");
  CVec in = coeffs;  // c2r destroys its input
  Vec out(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_dft_c2r_1d(
        n, reinterpret_cast<fftw_complex*>(in.data()), out.data(),
        FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

Vec fourier_shift(const Vec& u, double shift) {
  const int n = static_cast<int>(u.size());
  CVec coeffs = rfft(u);
  for (int k = 0; k < coeffs.size(); ++k)
    coeffs(k) *= std::polar(1.0, k * shift);
  return irfft(coeffs, n);
}

std::complex<double> fourier_mode(const Vec& u, int k) {
  const int n = static_cast<int>(u.size());
  std::complex<double> acc(0.0, 0.0);
  for (int j = 0; j < n; ++j)
    acc += u(j) * std::polar(1.0, -2.0 * M_PI * j * k / n);
  return acc / static_cast<double>(n);
}

}  // namespace candyman
