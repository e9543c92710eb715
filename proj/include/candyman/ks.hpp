#pragma once

#include <vector>

#include "candyman/fourier.hpp"
#include "candyman/linalg.hpp"

namespace candyman {

/// Kuramoto-Sivashinsky equation u_t + u u_x + u_xx + nu u_xxxx = 0 on
/// [0, 2*pi] with periodic boundary conditions.
struct KsConfig {
  double nu = 16.0 / 337.0;
  int n_modes = 64;    // grid points / Fourier modes
  double dt = 1e-4;
  bool nonlinear = true;  // test hook: false drops u u_x entirely
};

/// Pseudo-spectral integrator: Crank-Nicolson on the linear terms, two-step
/// Adams-Bashforth on the nonlinear term, fourth-order Runge-Kutta for the
/// first step. The nonlinear product is 2/3-rule dealiased.
class KsSolver {
 public:
  KsSolver(const KsConfig& config, const Vec& u0);
  ~KsSolver();
  KsSolver(const KsSolver&) = delete;
  KsSolver& operator=(const KsSolver&) = delete;

  /// Advance one time step. Throws SolverInstability on blow-up.
  void step();
  void advance(long steps);

  const KsConfig& config() const { return config_; }
  long step_count() const { return step_count_; }
  double time() const { return step_count_ * config_.dt; }

  /// Current field on the grid.
  Vec field() const;
  const CVec& spectrum() const { return uhat_; }

  /// Default initial condition used throughout:
  /// u(x,0) = -sin x + 2 cos 2x + 3 cos 3x - 4 sin 4x.
  static Vec default_initial_condition(int n);

 private:
  CVec nonlinear_term(const CVec& uhat);
  CVec rhs(const CVec& uhat);
  void check_stability() const;

  KsConfig config_;
  int nc_;           // n_modes/2 + 1
  int dealias_max_;  // highest retained mode in the nonlinear product
  Vec linear_;       // L_k = k^2 - nu k^4
  CVec uhat_;
  CVec nonlinear_prev_;
  bool have_prev_ = false;
  long step_count_ = 0;

  // FFTW workspace (plans are reused across steps).
  void* plan_fwd_ = nullptr;
  void* plan_inv_ = nullptr;
  Vec real_buf_;
  CVec cplx_buf_;
};

/// Integrate and collect fields every store_every steps (including the
/// initial condition). Returns t_steps/store_every + 1 fields.
std::vector<Vec> ks_simulate(const KsConfig& config, const Vec& u0,
                             long t_steps, long store_every);

}  // namespace candyman
