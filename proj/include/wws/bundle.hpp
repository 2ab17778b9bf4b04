#pragma once

#include <functional>
#include <vector>

#include "wws/operator.hpp"

namespace wws {

// Operator-valued functions lambda -> I - (lambda - A+)^{-1} (U + J*(lambda)) in the node
// basis, with J* = J11 + J12 (lambda - A22)^{-1} J21.
//   W:      the water-wave bundle at unscaled lambda.
//   WTilde: W(eps^3 lambda_hat); the dilation x -> eps x only relabels nodes.
//   W0:     the KdV bundle I + (lambda - D/2 + D^3/6)^{-1} D (3/2 w) on the scaled grid.
class Bundle {
 public:
  enum class Kind { W, WTilde, W0 };

  static Bundle water(const LinearizedOperator& op);  // needs op assembled with keep_parts
  static Bundle water_scaled(const LinearizedOperator& op);
  static Bundle kdv(const Grid& scaled, double alpha_hat);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  bool in_domain(cplx lam) const;
  CMat eval(cplx lam) const;  // throws std::domain_error outside the validity half-plane

 private:
  Kind kind_ = Kind::W;
  int n_ = 0;
  std::function<CMat(cplx)> f_;
  double re_min_ = 0.0;
};

// Same W-tilde assembled independently on the scaled grid with rescaled symbols and
// coefficients (u = eps^2 u~): a bookkeeping cross-check of the dilation.
CMat eval_W_tilde_scaled_route(const WaveProfile& profile, const CoefficientSet& coeffs, const WeightParams& w,
                               cplx lam_hat);

// Closed contour as smooth pieces t in [0, 1] -> lambda, traversed counterclockwise.
struct Contour {
  std::vector<std::function<cplx(double)>> pieces;
  std::vector<cplx> points(int per_piece) const;  // midpoints of per_piece equal parameter cells
};
// Boundary of {|lam| <= radius, Re lam >= re_min} in four pieces: lower arc, upper arc,
// upper half of the vertical segment, lower half.
Contour half_disc_contour(double radius, double re_min);
Contour circle_contour(cplx center, double radius);

struct ContourSample {
  cplx lam;
  double log_abs;
  double arg;
  double rcond;
};

struct ContourResult {
  int winding = 0;
  double winding_real = 0.0;
  double rounding_residual = 0.0;
  double max_step_arg = 0.0;  // largest |arg increment| between consecutive samples
  double min_sigma = 0.0;     // smallest singular value checked at ill-conditioned samples (0 if none)
  std::vector<ContourSample> samples;
};

// Winding of det B along the contour. Each piece starts with initial_per_piece cells and
// cells are bisected (at most 12 levels) until the arg increment is below pi/2. Throws
// NumericalFailure when a sample is singular (sigma_min <= 1e-10) or the winding does not
// round within 0.05. The initial samples of each piece are evaluated in parallel unless
// parallel is false (serial reference).
ContourResult winding_multiplicity(const Bundle& B, const Contour& C, int initial_per_piece = 8,
                                   bool parallel = true);

// Root of mu^3/6 - mu/2 + lam = 0 with Re mu < -alpha_hat.
cplx kdv_decay_root(cplx lam, double alpha_hat);

struct RootVectorReport {
  cplx mu;
  CVec f;               // f = d/dx (exp(mu x) G(x)) at the grid nodes
  double residual = 0;  // sup |exp(alpha x) r| / sup |exp(alpha x) f| for the KdV bundle equation
};
// Derivatives to fourth order come from truncated Taylor arithmetic.
RootVectorReport kdv_root_vector(cplx lam, double alpha_hat, const Grid& scaled);
// Nodes values of g = exp(mu x) G(x) and its first four derivatives (rows 0..4).
Eigen::MatrixXcd kdv_root_jets(cplx mu, const RVec& x);

struct JordanChainReport {
  RVec f0, f1;              // f0 = w', f1 = -2 d/db phi_b at b = 1
  double chain_residual = 0.0;  // ||(-D/2 + D^3/6 + 3/2 D w) f1 + f0|| / ||f0||
  double obstruction = 0.0;     // d/db of the integral of phi_b^2 at b = 1
  int winding_small_circle = 0; // winding of det W0 on |lam| = 0.1
};
JordanChainReport kdv_jordan_chain(const Grid& scaled, double alpha_hat, bool with_winding = true);

}  // namespace wws
