#include "candyman/ks.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "candyman/errors.hpp"

namespace candyman {

std::mutex& fftw_plan_mutex();

KsSolver::KsSolver(const KsConfig& config, const Vec& u0) : config_(config) {
  const int n = config_.n_modes;
  if (n < 4 || n % 2 != 0) throw ConfigError("KsSolver: n_modes must be even, >= 4");
  if (config_.dt <= 0.0) throw ConfigError("KsSolver: dt must be positive");
  if (u0.size() != n) throw DimensionMismatch("KsSolver: u0 size mismatch");

  nc_ = n / 2 + 1;
  dealias_max_ = n / 3;
  linear_ = Vec(nc_);
  for (int k = 0; k < nc_; ++k) {
    const double k2 = static_cast<double>(k) * k;
    linear_(k) = k2 - config_.nu * k2 * k2;
  }

  real_buf_ = Vec::Zero(n);
  cplx_buf_ = CVec::Zero(nc_);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan_fwd_ = fftw_plan_dft_r2c_1d(
        n, real_buf_.data(), reinterpret_cast<fftw_complex*>(cplx_buf_.data()),
        FFTW_ESTIMATE);
    plan_inv_ = fftw_plan_dft_c2r_1d(
        n, reinterpret_cast<fftw_complex*>(cplx_buf_.data()), real_buf_.data(),
        FFTW_ESTIMATE);
  }

  uhat_ = rfft(u0);
  nonlinear_prev_ = CVec::Zero(nc_);
}

KsSolver::~KsSolver() {
  std::lock_guard<std::mutex> lock(fftw_plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
}

Vec KsSolver::field() const {
  return irfft(uhat_, config_.n_modes);
}

Vec KsSolver::default_initial_condition(int n) {
  Vec u(n);
  for (int j = 0; j < n; ++j) {
    const double x = 2.0 * M_PI * j / n;
    u(j) = -std::sin(x) + 2.0 * std::cos(2.0 * x) + 3.0 * std::cos(3.0 * x) -
           4.0 * std::sin(4.0 * x);
  }
  return u;
}

CVec KsSolver::nonlinear_term(const CVec& uhat) {
  if (!config_.nonlinear) return CVec::Zero(nc_);
  const int n = config_.n_modes;
  // uhat holds normalized coefficients, so the unnormalized c2r yields u.
  cplx_buf_ = uhat;
  fftw_execute(static_cast<fftw_plan>(plan_inv_));
  // Forward transform of u^2/2 is unnormalized; divide by n.
  for (int j = 0; j < n; ++j) real_buf_(j) = 0.5 * real_buf_(j) * real_buf_(j);
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  CVec result(nc_);
  const double norm = 1.0 / static_cast<double>(n);
  for (int k = 0; k < nc_; ++k) {
    if (k > dealias_max_) {
      result(k) = 0.0;
    } else {
      // d/dx of u^2/2 in spectral space: multiply by i k.
      result(k) = std::complex<double>(0.0, k) * cplx_buf_(k) * norm;
    }
  }
  return result;
}

CVec KsSolver::rhs(const CVec& uhat) {
  CVec nl = nonlinear_term(uhat);
  CVec out(nc_);
  for (int k = 0; k < nc_; ++k) out(k) = linear_(k) * uhat(k) - nl(k);
  return out;
}

void KsSolver::check_stability() const {
  // |u|_inf <= sum |c_k| (with conjugate modes); cheap proxy on 33 values.
  double bound = std::abs(uhat_(0));
  for (int k = 1; k < nc_; ++k) bound += 2.0 * std::abs(uhat_(k));
  if (!std::isfinite(bound) || bound > 1e6)
    throw SolverInstability(step_count_, "KS solver blow-up at step " +
                                             std::to_string(step_count_));
}

void KsSolver::step() {
  const double dt = config_.dt;
  if (!have_prev_) {
    // Fourth-order Runge-Kutta bootstrap; also records N(u^0) for AB2.
    nonlinear_prev_ = nonlinear_term(uhat_);
    CVec k1 = rhs(uhat_);
    CVec k2 = rhs(uhat_ + 0.5 * dt * k1);
    CVec k3 = rhs(uhat_ + 0.5 * dt * k2);
    CVec k4 = rhs(uhat_ + dt * k3);
    uhat_ += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    have_prev_ = true;
  } else {
    CVec nl = nonlinear_term(uhat_);
    for (int k = 0; k < nc_; ++k) {
      const double half = 0.5 * dt * linear_(k);
      uhat_(k) = ((1.0 + half) * uhat_(k) -
                  dt * (1.5 * nl(k) - 0.5 * nonlinear_prev_(k))) /
                 (1.0 - half);
    }
    nonlinear_prev_ = std::move(nl);
  }
  step_count_ += 1;
  check_stability();
}

void KsSolver::advance(long steps) {
  for (long i = 0; i < steps; ++i) step();
}

std::vector<Vec> ks_simulate(const KsConfig& config, const Vec& u0,
                             long t_steps, long store_every) {
  if (t_steps < 1) throw DataError("ks_simulate: t_steps must be >= 1");
  if (store_every < 1) throw DataError("ks_simulate: store_every must be >= 1");
  KsSolver solver(config, u0);
  std::vector<Vec> fields;
  fields.push_back(solver.field());
  for (long s = 1; s <= t_steps; ++s) {
    solver.step();
    if (s % store_every == 0) fields.push_back(solver.field());
  }
  return fields;
}

}  // namespace candyman
