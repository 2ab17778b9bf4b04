#pragma once

#include <string>
#include <vector>

#include "wws/grid.hpp"

namespace wws {

// Solitary-wave profile. theta lives on the scaled grid (period Lhat); every surface
// quantity lives on the unscaled flat grid (period Lhat/eps, same node count), so node j
// of both grids is the same physical point x'_j = xhat_j / eps.
struct WaveProfile {
  double eps = 0.0;
  double alpha_hat = 0.0;
  double gamma = 1.0;
  Grid scaled;
  Grid unscaled;
  RVec theta;       // scaled strain
  RVec omega;       // Riemann strain eps^2 theta
  RVec zeta_prime;  // 1 + omega
  RVec zeta_dev;    // zeta(x') - x', odd
  RVec eta_bar;     // (tanh D / D) omega
  RVec hil_omega;   // i tanh D omega
  RVec u1;          // u at the surface, in flat coordinates
  RVec v_surf;      // v at the surface, in flat coordinates
  RVec v_prime;     // v' composed with zeta
  RVec v1;          // (1 - u1) v' / gamma
  RVec U_zeta;      // omega / (1 + omega)
  RVec V_zeta;      // hil_omega / (1 + omega)
  RVec eta_physical;  // eta(x) sampled at x = x'_j
  double eta_mean = 0.0;  // mean of eta_bar over the period
  double c0 = 0.0;        // integral of eta_bar over (0, inf)
  double fixed_point_residual = 0.0;
  std::vector<double> residual_history;
  std::string method;

  WaveProfile(const Grid& scaled_grid, const Grid& unscaled_grid) : scaled(scaled_grid), unscaled(unscaled_grid) {}

  double zeta(double xp) const;             // x' + zeta_dev(x'), zeta_dev extended with its linear drift
  RVec zeta(const RVec& xp) const;
  double inverse_stretch(double x) const;   // h(x) with zeta(h(x)) = x
  RVec inverse_stretch(const RVec& x) const;
  double physical_period() const { return unscaled.period() * (1.0 + eta_mean); }
  RVec periodic_stretch() const;            // zeta_dev minus its linear drift
};

struct ProfileOptions {
  double tol = 1e-12;
  double sigma = 0.5;
  int max_iter = 500;
  double stall_ratio = 0.98;
  bool quad_residual = true;  // evaluate the map in quad precision near convergence
};

RVec kdv_profile(const Grid& grid);

// theta -> Q P N(P theta) on the scaled grid (P: 2/3 filter).
RVec profile_map(const RVec& theta, double eps, const Grid& scaled);
// theta - map(theta) evaluated in quad precision, rounded to double.
RVec profile_residual_quad(const RVec& theta, double eps, const Grid& scaled);
// Dense Jacobian of the map at theta (node basis, scaled grid).
Eigen::MatrixXd profile_map_jacobian(const RVec& theta, double eps, const Grid& scaled);
// ||r||_{H^2} with weight exp(alpha_hat xhat).
double scaled_h2_norm(const RVec& r, double alpha_hat, const Grid& scaled);

WaveProfile solve_profile(double eps, double alpha_hat, const Grid& scaled, const ProfileOptions& opts = {});
WaveProfile derived_quantities(const RVec& theta, double eps, double alpha_hat, const Grid& scaled);
WaveProfile flat_profile(double eps, double alpha_hat, const Grid& scaled);

struct CoefficientSet {
  RVec p, q, rho, sqrt_p;
  RVec u_p, u_q, u_rho;
  RVec p_prime, q_prime, u_rho_prime;
  RVec ut_p, ut_q, ut_rho;  // scaled: u_p = eps^2 ut_p(eps x)
  double K0 = 0.0;          // max(|u_p|+|u_q|+|u_rho|) / eps^2
  double K1 = 0.0;          // max(|u_p'|+|u_q'|+|u_rho'|) / eps^3
};
CoefficientSet coefficients(const WaveProfile& profile);

// Bernoulli residual U - gamma eta - (U^2 - V^2)/2 - gamma eta V^2 at the surface, built
// from u1, v_surf, eta_bar (flat coordinates); sup norm relative to sup |omega|.
double steady_residual(const WaveProfile& profile);
// Same relation evaluated on the physical grid, with H_eta realized by composing the
// strip Hilbert transform with the stretch through trigonometric interpolation.
double steady_residual_physical(const WaveProfile& profile);

}  // namespace wws
