#include "wws/evolution.hpp"

#include <cmath>
#include <sstream>

#include "wws/symbols.hpp"

namespace wws {

std::vector<double> uniform_times(double horizon, int steps) {
  if (!(horizon > 0.0) || steps < 1) throw std::invalid_argument("uniform_times: positive horizon and steps required");
  std::vector<double> t(steps + 1);
  for (int i = 0; i <= steps; ++i) t[i] = horizon * i / steps;
  return t;
}

CVec propagate_state(const CMat& A, const CVec& z0, double t) {
  if (t < 0.0) throw std::invalid_argument("propagate_state: t must be nonnegative");
  if (t == 0.0) return z0;
  return expm(t * A) * z0;
}

DecayReport propagate(const CMat& A, const CVec& z0, const std::vector<double>& t, double dx, bool projected) {
  if (t.empty()) throw std::invalid_argument("propagate: empty time grid");
  for (size_t i = 0; i < t.size(); ++i)
    if (t[i] < 0.0 || (i > 0 && !(t[i] > t[i - 1])))
      throw std::invalid_argument("propagate: times must be nonnegative and increasing");
  DecayReport r;
  r.projected = projected;
  r.times = t;
  CVec z = propagate_state(A, z0, t[0]);
  const double n0 = std::sqrt(dx) * z0.norm();
  CMat E;
  double last_step = -1.0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (i > 0) {
      const double step = t[i] - t[i - 1];
      if (std::abs(step - last_step) > 1e-12 * step) {
        E = expm(step * A);
        last_step = step;
      }
      z = E * z;
    }
    const double nz = std::sqrt(dx) * z.norm();
    if (!std::isfinite(nz)) throw NumericalFailure("propagate: state overflowed");
    r.norms.push_back(nz);
  }
  // Least squares for log norm = c - beta t on the tail half.
  const size_t start = t.size() / 2;
  double st = 0, sl = 0, stt = 0, stl = 0;
  const double m = static_cast<double>(t.size() - start);
  for (size_t i = start; i < t.size(); ++i) {
    const double l = std::log(r.norms[i]);
    st += t[i];
    sl += l;
    stt += t[i] * t[i];
    stl += t[i] * l;
  }
  const double den = m * stt - st * st;
  if (den > 0.0) {
    const double slope = (m * stl - st * sl) / den;
    const double icpt = (sl - slope * st) / m;
    r.beta_fit = -slope;
    r.K_fit = std::exp(icpt) / n0;
  }
  return r;
}

double approximate_eigenfunction_residual(const LinearizedOperator& op, double k, double eh) {
  if (op.w.a != 0.0) throw std::invalid_argument("approximate_eigenfunction_residual: unweighted operator required");
  if (!(eh > 0.0)) throw std::invalid_argument("approximate_eigenfunction_residual: eh must be positive");
  const Grid& g = op.grid;
  const int n = g.n();
  const double tau = 40.0 + 2.0 / eh;
  if (tau + 1.0 / eh >= 0.5 * g.period()) {
    std::ostringstream msg;
    msg << "approximate_eigenfunction_residual: window [" << -tau - 1.0 / eh << ", " << -tau + 1.0 / eh
        << "] exceeds the domain of half-length " << 0.5 * g.period();
    throw std::invalid_argument(msg.str());
  }
  const RVec x = g.nodes();
  CVec z = CVec::Zero(2 * n);
  for (int j = 0; j < n; ++j) {
    const double s = eh * (x[j] + tau);
    if (std::abs(s) < 1.0) z[j] = std::polar(std::exp(-1.0 / (1.0 - s * s)) * std::sqrt(eh), k * (x[j] + tau));
  }
  const cplx lam = Aplus(cplx(k, 0.0), op.w.gamma);
  const CVec r = lam * z - op.A * z;
  return std::sqrt(g.dx()) * r.norm();
}

}  // namespace wws
