#pragma once

#include <vector>

#include "wws/operator.hpp"

namespace wws {

struct DecayReport {
  std::vector<double> times;
  std::vector<double> norms;  // weighted L^2 norms (dx-scaled) of the evolved state
  double beta_fit = 0.0;      // minus the least-squares slope of log norm on the tail half
  double K_fit = 0.0;         // norm ~ K exp(-beta t) ||z0|| on the tail half
  bool projected = false;
};

// exp(t A) z0 on an increasing time grid. Steps of equal length reuse one exponential.
DecayReport propagate(const CMat& A, const CVec& z0, const std::vector<double>& t_grid, double dx,
                      bool projected = false);
// State at a single time (scaling and squaring).
CVec propagate_state(const CMat& A, const CVec& z0, double t);
// t_0 = 0, ..., t_steps = horizon, uniform.
std::vector<double> uniform_times(double horizon, int steps);

// ||(lam - A)(eta4, 0)|| for eta4 = exp(i k (x + tau)) psi(eh (x + tau)) sqrt(eh), a bump
// psi(s) = exp(-1/(1 - s^2)) placed at tau = 40 + 2/eh to the left of the wave, and
// lam = A+(k) on the unweighted axis. Requires op.w.a == 0.
double approximate_eigenfunction_residual(const LinearizedOperator& op, double k_check, double eh);

}  // namespace wws
