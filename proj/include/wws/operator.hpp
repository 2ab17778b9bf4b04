#pragma once

#include <vector>

#include "wws/linalg.hpp"
#include "wws/pipeline.hpp"
#include "wws/profile.hpp"

namespace wws {

struct AssembleOptions {
  bool keep_parts = true;  // keep the N x N ingredients next to the assembled 2N x 2N matrix
};

// Transformed linearization in the variables (eta4, phi4), node basis of the weighted
// representatives exp(a x) f on the unscaled flat grid.
struct LinearizedOperator {
  Grid grid;
  WeightParams w;
  CMat A;  // [[A11, J12], [J21, A22]]
  CMat A11, A22, J11, J12, J21, J22;
  // Ingredients (kept when AssembleOptions::keep_parts).
  CMat Aplus, Aminus, U, R1, R2, PSSD, Sq, SRR, Bplus, Bminus, Jt11, A11b;
  CVec aplus_modes, aminus_modes;  // per-mode symbol values (Cosine Nyquist rule)

  explicit LinearizedOperator(const Grid& g) : grid(g) {}
  int n() const { return grid.n(); }
  double junk_norm_sum() const;  // sum of the operator norms of the four J blocks
};

LinearizedOperator assemble_A(const WaveProfile& profile, const CoefficientSet& coeffs, const WeightParams& w,
                              const AssembleOptions& opts = {});

// Operator in the variables (eta3, phi3) before the diagonalizing change T = [[1,-1],[1,1]].
CMat assemble_A3(const CoefficientSet& coeffs, const Grid& grid, const WeightParams& w);
// T M T^{-1} for 2N x 2N block matrices.
CMat to_diagonalized_variables(const CMat& M3);
CVec to_diagonalized_variables(const CVec& z3);

struct SymplecticFactors {
  CMat J, L;  // A3 = J L
};
SymplecticFactors jl_factors(const CoefficientSet& coeffs, const Grid& grid, const WeightParams& w);

// Physical-variable linearization (eta_dot, phi_dot) at a = 0, on the grid of period
// L (1 + mean eta) so the flat and physical periods correspond.
Grid physical_grid(const WaveProfile& profile);
CMat assemble_A_eta_physical(const WaveProfile& profile);
// Translation mode (eta_x, phi_x) sampled on the physical grid.
CVec physical_translation_mode(const WaveProfile& profile);

// ||Pi M Pi|| with Pi the block-diagonal projection onto modes |m| <= n/3.
double filtered_norm(const CMat& M, const Grid& grid);
// Block-diagonal space reversal x -> -x (node j -> (n - j) mod n) on each component.
CMat reversal(const Grid& grid, int components);

struct FourierFilters {
  double kappa_hat = 0.0;  // unscaled wavenumber threshold eps^nu_hat
  int modes_below = 0;
  RVec sharp_mask, soft_mask;  // per-mode values
  CMat Pi_o, Pi_i, Pi_o_soft, Pi_i_soft;
};
FourierFilters fourier_filters(const Grid& grid, double eps, double nu_hat);

// 1 / sigma_min(lam - A). Throws NumericalFailure if sigma_min < 1e-12.
double resolvent_norm(const CMat& A, cplx lam);

enum class EigenClass { NearZero, Essential, Other };

struct SpectrumReport {
  CVec eigenvalues;
  std::vector<EigenClass> classes;
  CVec near_zero, essential_band, other;
  double r0 = 0.0;
  double gap_line = 0.0;  // -alpha_hat eps^3 / 6
  int gap_count = 0;      // eigenvalues with Re >= gap_line
  double max_real_excluding_kernel = 0.0;
  double max_abs_real = 0.0;
  int P0_rank = -1;
};
// Classifies eigenvalues: NearZero within r0 = alpha_hat eps^3/20 (or r0_override > 0) of
// 0, Essential within band_tol of the sampled symbol curves A+-(k + ia), otherwise Other.
SpectrumReport classify_spectrum(const CVec& eigenvalues, const Grid& grid, const WeightParams& w,
                                 double r0_override = 0.0);
SpectrumReport spectrum(const CMat& A, const Grid& grid, const WeightParams& w);

struct SpectralProjection {
  CMat P0;
  int rank = 0;
  double idempotency_error = 0.0;   // ||P0^2 - P0|| / max(1, ||P0||)
  double doubling_difference = -1;  // ||P0(64) - P0(128)|| when requested
  double min_circle_distance = 0.0; // distance of the nearest eigenvalue to the circle
};
// Trapezoid rule on the circle |lam - center| = radius. If eigenvalues are given, throws
// InvariantViolation when one lies within 10% of the radius from the circle.
SpectralProjection spectral_projection(const CMat& A, cplx center, double radius, int nodes = 64,
                                       const CVec* eigenvalues = nullptr, bool check_doubling = false);

struct EnergyReport {
  int fields = 0;
  double pdp_min_ratio = 0.0;   // min -Re<sqrt p D sqrt p z, z> / (alpha_hat eps ||z||^2)
  double qsq_min_ratio = 0.0;   // min Re<sqrt q S sqrt q z, z> / (eps alpha_hat ||z||^2)
  double qsq_max_ratio = 0.0;
  double highpass_min_ratio = 0.0;  // min -Re<pi_i (Dp + Sq) pi_i z, z> / (eps^{1+2 nu_hat} alpha_hat ||z_i||^2)
};
EnergyReport energy_estimate_checks(const CoefficientSet& coeffs, const Grid& grid, const WeightParams& w,
                                    double nu_hat, int fields, unsigned long seed);

// Bound ||[Q, g] R|| <= C* C_G for a multiplication operator g = eps^2 G(eps x) with
// Q = S/sqrt(gamma) and R = <D>^{1/2} (weighted), s = 4/3.
struct CommutatorBound {
  double measured = 0.0;
  double c_star = 0.0;
  double c_g = 0.0;
  bool holds() const { return measured <= c_star * c_g; }
};
CommutatorBound commutator_bound(const RVec& g_unscaled, const Grid& grid, const WeightParams& w);
// ||[S, g] S^{-1} D|| in the weighted norm.
double commutator_norm_SinvD(const RVec& g, const Grid& grid, const WeightParams& w);

// Eigenvectors with energy fraction above n/4 below tol and |lam| >= min_abs.
CVec resolved_eigenvalues(const EigenPairs& ep, const Grid& grid, int components, double tol = 1e-3,
                          double min_abs = 1e-6);

// Smooth random complex field: a sum of modulated Gaussians inside the middle of the domain.
CVec random_smooth_field(const Grid& grid, unsigned long seed, double k_max);

// Materialization helpers shared by the mode and bundle modules.
Stage op_multiplier(const MultiplierSymbol& s, const Grid& g, const WeightParams& w);
Stage op_pointwise(const char* name, const Grid& g, const RVec& v);

}  // namespace wws
