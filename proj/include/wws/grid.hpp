#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wws {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;

inline constexpr cplx I_unit{0.0, 1.0};

// Raised when an iteration or factorization fails numerically (CLI exit code 3).
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a computed quantity violates a documented invariant (CLI exit code 1).
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WeightParams {
  double alpha_hat = 0.0;
  double eps = 0.0;
  double a = 0.0;
  double gamma = 1.0;

  // alpha_hat = 0 selects the unweighted space; otherwise 0 < alpha_hat <= 1/2.
  static WeightParams make(double alpha_hat, double eps);
};

// Uniform periodic grid on [-L/2, L/2) with n nodes.
// Coefficients follow c_m = (L/n) sum_j f_j exp(-i k_m x_j), a Riemann sum for the
// integral transform, so that sum_j |f_j|^2 dx = (1/L) sum_m |c_m|^2.
// Coefficient vectors are stored in FFT order: index i <-> mode m = i (i <= n/2) or i - n.
class Grid {
 public:
  Grid(int n, double period);

  int n() const { return n_; }
  double period() const { return L_; }
  double dx() const { return L_ / n_; }
  double node(int j) const { return -0.5 * L_ + j * dx(); }
  int mode(int idx) const { return idx <= n_ / 2 ? idx : idx - n_; }
  double wavenumber(int idx) const;
  bool is_nyquist(int idx) const { return idx == n_ / 2; }
  RVec nodes() const;
  RVec wavenumbers() const;

  void forward(const cplx* in, cplx* out) const;
  void inverse(const cplx* in, cplx* out) const;
  CVec forward(const CVec& values) const;
  CVec inverse(const CVec& coeffs) const;

  bool same_as(const Grid& other) const { return n_ == other.n_ && L_ == other.L_; }

 private:
  struct Plans;
  int n_;
  double L_;
  std::shared_ptr<const Plans> plans_;
};

enum class Parity { Even, Odd, None };

struct MultiplierSymbol {
  std::string name;
  std::function<cplx(cplx)> eval;
  Parity parity = Parity::None;
};

// Exact: coefficient m is multiplied by sym(k_m + ia), including the Nyquist mode.
// Cosine: the Nyquist mode is read as cos(k_N x) and receives the average of
// sym(+k_N + ia) and sym(-k_N + ia); this keeps real operators real and preserves
// reflection symmetry, and is used for every assembled operator.
enum class Nyquist { Exact, Cosine };

CVec symbol_values(const MultiplierSymbol& sym, const Grid& grid, double a,
                   Nyquist rule = Nyquist::Exact);

// Discrete function in the weighted space L^2_a, stored as the coefficients of its
// representative exp(a x) f.
struct SpectralField {
  Grid grid;
  CVec coeffs;
  double weight_a = 0.0;
  bool real_valued = false;

  static SpectralField from_values(const Grid& grid, const CVec& values, double weight_a = 0.0);
  static SpectralField from_real(const Grid& grid, const RVec& values, double weight_a = 0.0);
  CVec values() const;
  RVec real_values() const;
  bool hermitian_symmetric(double rel_tol) const;
};

SpectralField apply_multiplier(const MultiplierSymbol& sym, const WeightParams& w,
                               const SpectralField& f, Nyquist rule = Nyquist::Exact);

// Node-wise product with 2/3-rule dealiasing on both factors and on the result.
SpectralField multiply_pointwise(const SpectralField& g, const SpectralField& f);

// Representative of f in L^2_a built by multiplying node values with exp((a - f.a) x).
// Only meaningful for fields that are negligible at the domain edges.
SpectralField reweight(const SpectralField& f, double a);

// (sum_m (1+k_m^2)^s |c_m|^2 / L)^(1/2) over the L^2_{w.a} representative.
double weighted_norm(const SpectralField& f, const WeightParams& w, double s);

// <f, g>_a = integral of f conj(g) exp(2ax), from the L^2_a representatives.
cplx inner_product_a(const SpectralField& f, const SpectralField& g, const WeightParams& w);

// Spectral derivative of real node values (symbol ik, Nyquist mode dropped).
RVec spectral_derivative(const Grid& grid, const RVec& values);
// Mean-free periodic antiderivative of values - mean(values); returns the mean via *mean.
RVec spectral_antiderivative(const Grid& grid, const RVec& values, double* mean);
// Real part of the inverse transform of symbol(k) * forward(values), Cosine Nyquist rule.
RVec apply_real_symbol(const Grid& grid, const RVec& values, const std::function<cplx(cplx)>& sym);
// Evaluate the trigonometric interpolant of node values at arbitrary points.
RVec trig_interpolate(const Grid& grid, const RVec& values, const RVec& points);
// Interpolation matrix: row i maps node values to the interpolant's value at points[i].
Eigen::MatrixXd interpolation_matrix(const Grid& grid, const RVec& points);

}  // namespace wws
