#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "wws/grid.hpp"

namespace wws {

// Scalar symbols. Removable singularities at 0 use Taylor branches for |xi| < 1e-2.
//
// Branch of S(xi) = sqrt(-gamma xi tanh xi): on Im xi > 0 this is the principal root,
// written as -i sqrt(gamma) xi sqrt(tanh xi / xi); the same formula is kept on the real
// axis (the limit from above), which makes S odd and smooth at a = 0 and real-preserving.
// On Im xi < 0 the principal root is +i sqrt(gamma) xi sqrt(tanh xi / xi).
cplx tanh_ratio(cplx xi);            // tanh(xi)/xi
cplx one_minus_tanh_ratio(cplx xi);  // 1 - tanh(xi)/xi, cancellation-free near 0
cplx S_sym(cplx xi, double gamma);
cplx Aplus(cplx xi, double gamma);
cplx Aminus(cplx xi, double gamma);
cplx SinvD(cplx xi, double gamma);  // i xi / S(xi), analytic through xi = 0
cplx Hil(cplx xi);                  // i tanh xi
cplx DcothD(cplx xi);               // xi coth xi
cplx RiemannQ1(cplx xi);            // i (1/xi - coth xi)
cplx ProfileQ(cplx xi, double eps);  // eps^2 / (1 - gamma tanh(eps xi)/(eps xi))
cplx ProfileQ0(cplx xi);             // 1 / (1 + xi^2/3)
cplx ProfileQ1(cplx xi, double eps);
cplx m_eps(cplx lam_hat, cplx xi, double eps);
cplx m0(cplx lam_hat, cplx xi);
double gamma1(double eps);  // 2 eps^-2 (1 - sqrt(1 - eps^2)) in cancellation-free form

namespace sym {
MultiplierSymbol identity();
MultiplierSymbol derivative();
MultiplierSymbol hilbert();
MultiplierSymbol dcothd();
MultiplierSymbol riemann_q1();
MultiplierSymbol tanh_ratio();
MultiplierSymbol S(double gamma);
MultiplierSymbol S_adjoint(double gamma);  // conj(S(conj-shifted)): symbol of the L^2 adjoint
MultiplierSymbol Aplus(double gamma);
MultiplierSymbol Aminus(double gamma);
MultiplierSymbol SinvD(double gamma);
MultiplierSymbol profile_Q(double eps);
MultiplierSymbol profile_Q0();
}  // namespace sym

struct Dispersion {
  double plus, minus;    // -k +- sqrt(g k tanh k)
  double dplus, dminus;  // group velocities
};
Dispersion dispersion(double k, double gamma_t);

struct SqrtHalfplane {
  bool re_sqrt_le_a;
  bool criterion;  // (|z| + Re z)/2 <= a^2
  bool consistent;
};
SqrtHalfplane check_sqrt_halfplane(cplx z, double a);

// Margin of the weighted dispersion bound; the check holds iff margin >= 0 (up to rounding).
double dispest_margin(double k, double a);
bool check_dispest(double k, double a);

struct CDBsym {
  double margin_S;          // eps ahat (1 - eps^2/4) sqrt(tanh k/k) - Re S
  double margin_Aplus;      // -eps^3 ahat/4 - Re A+
  double margin_resolvent;  // min |lam - A+| - ahat eps^3/12 over sampled lam
  double margin_tanh;       // 1 - |tanh xi| at a shift eps*ahat/4 < pi/8
  bool ok() const;
};
CDBsym check_cDBsym(double k, const WeightParams& w);

bool check_lowfreq_bound(double kappa);
double lowfreq_margin(double kappa);  // 1 - kappa^2/9 - sqrt(tanh kappa/kappa)
inline constexpr double kLowfreqWindow = 1.0;

struct InequalityCheck {
  std::string name;
  long samples = 0;
  long violations = 0;
  double worst_margin = INFINITY;  // smallest margin seen (>= 0 where the inequality holds)
  bool passed() const { return violations == 0; }
};
struct InequalitySuiteOptions {
  unsigned long seed = 1;
  int sqrt_samples = 10000;   // random z in |z| <= 100, a in (0, 3)
  int k_points = 100000;      // uniform k-grid on [-50, 50]
  std::vector<double> eps_list{0.05, 0.1, 0.2};
  std::vector<double> alpha_hat_list{0.25, 0.5};
  std::vector<double> dispest_a{0.05, 0.2, 0.7};  // in addition to a = alpha_hat eps
  int lowfreq_points = 10000;  // on (0, 1]
  bool parallel = true;        // false runs the serial reference
};
// Runs every symbol inequality checker over its sample set, in parallel over samples.
std::vector<InequalityCheck> inequality_suite(const InequalitySuiteOptions& opts = {});

struct AplusExpansion {
  cplx exact;
  cplx truncated;
};
AplusExpansion expand_Aplus_scaled(cplx lam_hat, cplx xi, const WeightParams& w);

}  // namespace wws
