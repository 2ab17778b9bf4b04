#include "wws/grid.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include <fftw3.h>

namespace wws {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

WeightParams WeightParams::make(double alpha_hat, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (!(alpha_hat >= 0.0 && alpha_hat <= 0.5))
    throw std::invalid_argument("alpha_hat must lie in (0, 1/2], or be 0 for unweighted runs");
  WeightParams w;
  w.alpha_hat = alpha_hat;
  w.eps = eps;
  w.a = alpha_hat * eps;
  w.gamma = 1.0 - eps * eps;
  return w;
}

struct Grid::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  explicit Plans(int n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    std::vector<fftw_complex> a(n), b(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd = fftw_plan_dft_1d(n, a.data(), b.data(), FFTW_FORWARD, flags);
    bwd = fftw_plan_dft_1d(n, a.data(), b.data(), FFTW_BACKWARD, flags);
  }
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
};

Grid::Grid(int n, double period) : n_(n), L_(period) {
  if (!is_power_of_two(n) || n < 4) throw std::invalid_argument("grid size must be a power of two >= 4");
  if (!(period > 0.0)) throw std::invalid_argument("grid period must be positive");
  plans_ = std::make_shared<const Plans>(n);
}

double Grid::wavenumber(int idx) const { return 2.0 * M_PI * mode(idx) / L_; }

RVec Grid::nodes() const {
  RVec x(n_);
  for (int j = 0; j < n_; ++j) x[j] = node(j);
  return x;
}

RVec Grid::wavenumbers() const {
  RVec k(n_);
  for (int i = 0; i < n_; ++i) k[i] = wavenumber(i);
  return k;
}

// x_j = -L/2 + jL/n gives exp(-i k_m x_j) = (-1)^m exp(-2 pi i m j / n).
void Grid::forward(const cplx* in, cplx* out) const {
  fftw_execute_dft(plans_->fwd, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
  const double scale = L_ / n_;
  for (int i = 0; i < n_; ++i) out[i] *= (i % 2 == 0 ? scale : -scale);
}

void Grid::inverse(const cplx* in, cplx* out) const {
  std::vector<cplx> tmp(in, in + n_);
  const double scale = 1.0 / L_;
  for (int i = 0; i < n_; ++i) tmp[i] *= (i % 2 == 0 ? scale : -scale);
  fftw_execute_dft(plans_->bwd, reinterpret_cast<fftw_complex*>(tmp.data()),
                   reinterpret_cast<fftw_complex*>(out));
}

CVec Grid::forward(const CVec& values) const {
  CVec out(n_);
  forward(values.data(), out.data());
  return out;
}

CVec Grid::inverse(const CVec& coeffs) const {
  CVec out(n_);
  inverse(coeffs.data(), out.data());
  return out;
}

CVec symbol_values(const MultiplierSymbol& sym, const Grid& grid, double a, Nyquist rule) {
  const int n = grid.n();
  CVec v(n);
  auto eval_checked = [&](cplx xi) {
    cplx s = sym.eval(xi);
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "symbol " << sym.name << " is not finite at xi = " << xi.real() << " + " << xi.imag() << "i";
      throw std::domain_error(msg.str());
    }
    return s;
  };
  for (int i = 0; i < n; ++i) {
    const double k = grid.wavenumber(i);
    if (grid.is_nyquist(i) && rule == Nyquist::Cosine)
      v[i] = 0.5 * (eval_checked({k, a}) + eval_checked({-k, a}));
    else
      v[i] = eval_checked({k, a});
  }
  return v;
}

SpectralField SpectralField::from_values(const Grid& grid, const CVec& values, double weight_a) {
  if (values.size() != grid.n()) throw std::invalid_argument("value count does not match grid");
  return SpectralField{grid, grid.forward(values), weight_a, false};
}

SpectralField SpectralField::from_real(const Grid& grid, const RVec& values, double weight_a) {
  SpectralField f = from_values(grid, values.cast<cplx>(), weight_a);
  f.real_valued = true;
  return f;
}

CVec SpectralField::values() const { return grid.inverse(coeffs); }

RVec SpectralField::real_values() const { return values().real(); }

bool SpectralField::hermitian_symmetric(double rel_tol) const {
  const int n = grid.n();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const int j = (n - i) % n;
    worst = std::max(worst, std::abs(coeffs[i] - std::conj(coeffs[j])));
  }
  return worst <= rel_tol * coeffs.norm();
}

SpectralField apply_multiplier(const MultiplierSymbol& sym, const WeightParams& w,
                               const SpectralField& f, Nyquist rule) {
  SpectralField out = f;
  out.coeffs = f.coeffs.cwiseProduct(symbol_values(sym, f.grid, w.a, rule));
  out.real_valued = false;
  return out;
}

namespace {
void dealias(const Grid& grid, CVec& c) {
  const int n = grid.n();
  for (int i = 0; i < n; ++i)
    if (3 * std::abs(grid.mode(i)) > n) c[i] = 0.0;
}
}  // namespace

SpectralField multiply_pointwise(const SpectralField& g, const SpectralField& f) {
  if (!g.grid.same_as(f.grid)) throw std::invalid_argument("multiply_pointwise: grid mismatch");
  CVec cg = g.coeffs, cf = f.coeffs;
  dealias(g.grid, cg);
  dealias(f.grid, cf);
  CVec prod = g.grid.inverse(cg).cwiseProduct(f.grid.inverse(cf));
  CVec c = f.grid.forward(prod);
  dealias(f.grid, c);
  return SpectralField{f.grid, c, f.weight_a + g.weight_a, f.real_valued && g.real_valued};
}

SpectralField reweight(const SpectralField& f, double a) {
  if (a == f.weight_a) return f;
  const Grid& grid = f.grid;
  CVec v = f.values();
  for (int j = 0; j < grid.n(); ++j) v[j] *= std::exp((a - f.weight_a) * grid.node(j));
  SpectralField out = SpectralField::from_values(grid, v, a);
  out.real_valued = f.real_valued;
  return out;
}

double weighted_norm(const SpectralField& f, const WeightParams& w, double s) {
  if (s < 0.0) throw std::invalid_argument("weighted_norm: s must be nonnegative");
  const SpectralField r = reweight(f, w.a);
  double sum = 0.0;
  for (int i = 0; i < r.grid.n(); ++i) {
    const double k = r.grid.wavenumber(i);
    sum += std::pow(1.0 + k * k, s) * std::norm(r.coeffs[i]);
  }
  return std::sqrt(sum / r.grid.period());
}

cplx inner_product_a(const SpectralField& f, const SpectralField& g, const WeightParams& w) {
  if (!f.grid.same_as(g.grid)) throw std::invalid_argument("inner_product_a: grid mismatch");
  const SpectralField rf = reweight(f, w.a), rg = reweight(g, w.a);
  return rg.coeffs.dot(rf.coeffs) / f.grid.period();
}

RVec apply_real_symbol(const Grid& grid, const RVec& values, const std::function<cplx(cplx)>& sym) {
  MultiplierSymbol s{"real_symbol", sym, Parity::None};
  CVec c = grid.forward(values.cast<cplx>());
  c = c.cwiseProduct(symbol_values(s, grid, 0.0, Nyquist::Cosine));
  return grid.inverse(c).real();
}

RVec spectral_derivative(const Grid& grid, const RVec& values) {
  return apply_real_symbol(grid, values, [](cplx xi) { return I_unit * xi; });
}

RVec spectral_antiderivative(const Grid& grid, const RVec& values, double* mean) {
  CVec c = grid.forward(values.cast<cplx>());
  if (mean) *mean = c[0].real() / grid.period();
  c[0] = 0.0;
  c[grid.n() / 2] = 0.0;
  for (int i = 1; i < grid.n(); ++i)
    if (!grid.is_nyquist(i)) c[i] /= I_unit * grid.wavenumber(i);
  return grid.inverse(c).real();
}

namespace {
// Weights w_j(p) = (1/n)[1 + 2 sum_{m=1}^{n/2-1} cos(k_m (p - x_j)) + cos(k_N (p - x_j))].
void interpolation_row(const Grid& grid, double p, double* row) {
  const int n = grid.n();
  const double k1 = 2.0 * M_PI / grid.period();
  for (int j = 0; j < n; ++j) {
    const double d = p - grid.node(j);
    // Dirichlet-type closed form for sum_{m=1}^{M} cos(m t), M = n/2 - 1.
    const double t = k1 * d;
    const int M = n / 2 - 1;
    const double st = std::sin(0.5 * t);
    double s;
    if (std::abs(st) < 1e-14)
      s = M;
    else
      s = std::sin(M * 0.5 * t) * std::cos((M + 1) * 0.5 * t) / st;
    row[j] = (1.0 + 2.0 * s + std::cos(0.5 * n * t)) / n;
  }
}
}  // namespace

Eigen::MatrixXd interpolation_matrix(const Grid& grid, const RVec& points) {
  Eigen::MatrixXd M(points.size(), grid.n());
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> R(points.size(), grid.n());
  for (Eigen::Index i = 0; i < points.size(); ++i) interpolation_row(grid, points[i], R.row(i).data());
  M = R;
  return M;
}

RVec trig_interpolate(const Grid& grid, const RVec& values, const RVec& points) {
  return interpolation_matrix(grid, points) * values;
}

}  // namespace wws
