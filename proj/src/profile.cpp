#include "wws/profile.hpp"

#include <cmath>
#include <sstream>

#include "wws/pipeline.hpp"
#include "wws/symbols.hpp"

namespace wws {

namespace {

// Per-mode factors of the fixed-point map on the scaled grid.
struct MapModes {
  CVec keep, T, th, QP;
};

MapModes map_modes(const Grid& g, double eps) {
  const int n = g.n();
  MapModes m{CVec(n), CVec(n), CVec(n), CVec(n)};
  for (int i = 0; i < n; ++i) {
    const double k = g.wavenumber(i);
    const double keep = 3 * std::abs(g.mode(i)) <= n ? 1.0 : 0.0;
    m.keep[i] = keep;
    m.T[i] = std::real(tanh_ratio(eps * k));
    m.th[i] = g.is_nyquist(i) ? cplx(0.0) : I_unit * std::tanh(eps * k);
    m.QP[i] = keep * std::real(ProfileQ(k, eps));
  }
  return m;
}

RVec apply_modes(const Grid& g, const RVec& v, const CVec& per_mode) {
  return g.inverse(g.forward(v.cast<cplx>()).cwiseProduct(per_mode)).real();
}

// Node index of -x_j.
int reflect(int j, int n) { return (n - j) % n; }

RVec even_part(const RVec& v) {
  const int n = static_cast<int>(v.size());
  RVec r(n);
  for (int j = 0; j < n; ++j) r[j] = 0.5 * (v[j] + v[reflect(j, n)]);
  return r;
}

double wrap(double x, double L) { return x - L * std::round(x / L); }

RVec wrap(const RVec& x, double L) {
  RVec r(x.size());
  for (int i = 0; i < x.size(); ++i) r[i] = wrap(x[i], L);
  return r;
}

std::string history_text(const std::vector<double>& h) {
  std::ostringstream os;
  os.precision(3);
  for (size_t i = 0; i < h.size(); ++i) os << (i ? ", " : "") << h[i];
  return os.str();
}

}  // namespace

namespace {
RVec sample_kdv(const Grid& grid) {
  const double c = std::sqrt(3.0) / 2.0;
  RVec v(grid.n());
  for (int j = 0; j < grid.n(); ++j) {
    const double s = 1.0 / std::cosh(c * grid.node(j));
    v[j] = s * s;
  }
  return v;
}
}  // namespace

RVec kdv_profile(const Grid& grid) {
  const double s = 1.0 / std::cosh(0.25 * std::sqrt(3.0) * grid.period());
  if (s * s >= 1e-14) throw std::invalid_argument("kdv_profile: period too small, boundary value must be below 1e-14");
  return sample_kdv(grid);
}

Eigen::MatrixXd profile_map_jacobian(const RVec& theta, double eps, const Grid& scaled) {
  const MapModes m = map_modes(scaled, eps);
  const double e2 = eps * eps, g = 1.0 - e2;
  const RVec t = apply_modes(scaled, theta, m.keep);
  const RVec h = apply_modes(scaled, t, m.th);
  const RVec eta = apply_modes(scaled, t, m.T);
  const int n = scaled.n();
  RVec c1(n), c2(n), c3(n);
  for (int j = 0; j < n; ++j) {
    const double A = 1.5 * t[j] * t[j] + e2 * t[j] * t[j] * t[j] - 0.5 * h[j] * h[j] * (1.0 - 2.0 * g * e2 * eta[j]);
    const double s = 1.0 + e2 * t[j];
    const double B = s * s;
    c1[j] = (3.0 * t[j] + 3.0 * e2 * t[j] * t[j]) / B - 2.0 * e2 * (A / B) / s;
    c2[j] = -h[j] * (1.0 - 2.0 * g * e2 * eta[j]) / B;
    c3[j] = g * e2 * h[j] * h[j] / B;
  }
  const Product col = Product::Collocation;
  const Stage P = multiplier_values("P", m.keep), QP = multiplier_values("QP", m.QP);
  std::vector<Term> terms{
      {1.0, {P, pointwise("c1", scaled, c1, col), QP}},
      {1.0, {P, multiplier_values("Hil", m.th), pointwise("c2", scaled, c2, col), QP}},
      {1.0, {P, multiplier_values("T", m.T), pointwise("c3", scaled, c3, col), QP}},
  };
  return materialize(terms, scaled).real();
}

double scaled_h2_norm(const RVec& r, double alpha_hat, const Grid& scaled) {
  WeightParams w;
  w.alpha_hat = alpha_hat;
  w.a = alpha_hat;
  return weighted_norm(SpectralField::from_real(scaled, r), w, 2.0);
}

WaveProfile solve_profile(double eps, double alpha_hat, const Grid& scaled, const ProfileOptions& opts) {
  if (!(eps > 0.0 && eps <= 0.3)) throw std::invalid_argument("solve_profile: eps must lie in (0, 0.3]");
  if (!(alpha_hat >= 0.0 && alpha_hat <= 0.5)) throw std::invalid_argument("solve_profile: alpha_hat must lie in [0, 1/2]");
  if (!(opts.tol >= 1e-13)) throw std::invalid_argument("solve_profile: tol must be at least 1e-13");

  const int n = scaled.n();
  RVec theta = sample_kdv(scaled);
  std::vector<double> history;
  std::string method = "picard";

  auto residual = [&](const RVec& th, bool quad) -> RVec {
    return quad ? profile_residual_quad(th, eps, scaled) : RVec(th - profile_map(th, eps, scaled));
  };

  // Damped Picard until the residual stops dropping by at least 2% per step.
  RVec r = residual(theta, false);
  double res = scaled_h2_norm(r, alpha_hat, scaled);
  history.push_back(res);
  bool stalled = false;
  int it = 0;
  while (res >= opts.tol && it < opts.max_iter) {
    theta -= opts.sigma * r;
    r = residual(theta, false);
    const double next = scaled_h2_norm(r, alpha_hat, scaled);
    history.push_back(next);
    ++it;
    if (!std::isfinite(next) || next > opts.stall_ratio * res) {
      stalled = true;
      res = next;
      break;
    }
    res = next;
  }

  if (stalled) {
    // Newton on theta - map(theta) restricted to even functions: the odd projector
    // is added to the Jacobian so translation does not make the system singular.
    method = "picard+newton";
    theta = sample_kdv(scaled);
    Eigen::MatrixXd odd = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      odd(j, j) += 0.5;
      odd(j, reflect(j, n)) -= 0.5;
    }
    r = residual(theta, false);
    res = scaled_h2_norm(r, alpha_hat, scaled);
    history.push_back(res);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    double prev = INFINITY;
    while (it < opts.max_iter) {
      const bool quad = opts.quad_residual && res < 1e-8;
      // Near the double-precision floor the Jacobian is frozen and only the residual
      // is refreshed (iterative refinement against the quad-precision residual).
      if (!quad || lu.rows() == 0) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - profile_map_jacobian(theta, eps, scaled) + odd;
        lu.compute(M);
      }
      if (quad) r = residual(theta, true);
      theta -= lu.solve(r);
      theta = even_part(theta);
      r = residual(theta, opts.quad_residual && res < 1e-8);
      prev = res;
      res = scaled_h2_norm(r, alpha_hat, scaled);
      history.push_back(res);
      ++it;
      if (!std::isfinite(res)) break;
      if (res < opts.tol) break;
      if (res < 1e-8 && res > 0.5 * prev) {
        // No further progress: re-evaluate once in quad precision before giving up.
        r = residual(theta, true);
        res = scaled_h2_norm(r, alpha_hat, scaled);
        if (res < opts.tol || res > 0.5 * prev) break;
      }
    }
  } else if (opts.quad_residual) {
    r = residual(theta, true);
    res = scaled_h2_norm(r, alpha_hat, scaled);
    history.push_back(res);
  }

  if (!(res < opts.tol))
    throw NumericalFailure("solve_profile: no convergence (" + method + "), residual history: " + history_text(history));

  WaveProfile p = derived_quantities(theta, eps, alpha_hat, scaled);
  p.fixed_point_residual = res;
  p.residual_history = std::move(history);
  p.method = method;
  return p;
}

WaveProfile derived_quantities(const RVec& theta, double eps, double alpha_hat, const Grid& scaled) {
  if (theta.size() != scaled.n()) throw std::invalid_argument("derived_quantities: size mismatch");
  const int n = scaled.n();
  const Grid flat(n, scaled.period() / eps);
  WaveProfile p(scaled, flat);
  p.eps = eps;
  p.alpha_hat = alpha_hat;
  p.gamma = 1.0 - eps * eps;
  p.theta = theta;
  p.omega = eps * eps * theta;
  p.zeta_prime = p.omega.array() + 1.0;
  if (p.zeta_prime.minCoeff() <= 0.0) throw InvariantViolation("derived_quantities: 1 + omega must stay positive");

  p.eta_bar = apply_real_symbol(flat, p.omega, [](cplx xi) { return tanh_ratio(xi); });
  p.hil_omega = apply_real_symbol(flat, p.omega, [](cplx xi) { return Hil(xi); });
  const RVec check = apply_real_symbol(flat, p.eta_bar, [](cplx xi) { return DcothD(xi); });
  if ((check - p.omega).cwiseAbs().maxCoeff() > 1e-10)
    throw InvariantViolation("derived_quantities: omega = D coth D eta_bar fails");

  const auto& w = p.omega.array();
  const auto& h = p.hil_omega.array();
  const Eigen::ArrayXd d = (1.0 + w).square() + h.square();
  p.u1 = (w + w.square() + h.square()) / d;
  p.v_surf = -h / d;
  p.v_prime = spectral_derivative(flat, p.v_surf).array() / (1.0 + w);
  p.v1 = (1.0 - p.u1.array()) * p.v_prime.array() / p.gamma;
  p.U_zeta = w / (1.0 + w);
  p.V_zeta = h / (1.0 + w);

  // zeta - x = integral of eta_bar from 0 plus Q1(D) eta_bar: a linear drift plus an odd
  // periodic part.
  double m = 0.0;
  const RVec P = spectral_antiderivative(flat, p.eta_bar, &m);
  const RVec q1 = apply_real_symbol(flat, p.eta_bar, [](cplx xi) { return RiemannQ1(xi); });
  p.eta_mean = m;
  p.c0 = 0.5 * flat.period() * m;
  p.zeta_dev = m * flat.nodes() + P + q1;
  p.eta_physical = trig_interpolate(flat, p.eta_bar, wrap(p.inverse_stretch(flat.nodes()), flat.period()));
  return p;
}

WaveProfile flat_profile(double eps, double alpha_hat, const Grid& scaled) {
  WaveProfile p = derived_quantities(RVec::Zero(scaled.n()), eps, alpha_hat, scaled);
  p.method = "flat";
  return p;
}

RVec WaveProfile::periodic_stretch() const { return zeta_dev - eta_mean * unscaled.nodes(); }

RVec WaveProfile::zeta(const RVec& xp) const {
  const double L = unscaled.period();
  return xp * (1.0 + eta_mean) + trig_interpolate(unscaled, periodic_stretch(), wrap(xp, L));
}

double WaveProfile::zeta(double xp) const { return zeta(RVec::Constant(1, xp))[0]; }

RVec WaveProfile::inverse_stretch(const RVec& x) const {
  const double L = unscaled.period();
  const RVec per = periodic_stretch();
  const double amp = per.cwiseAbs().maxCoeff() + 1.0;
  const int m = static_cast<int>(x.size());
  RVec s = x / (1.0 + eta_mean);
  RVec lo = s.array() - amp, hi = s.array() + amp;
  // Safeguarded Newton on zeta(s) - x, which is increasing since zeta' = 1 + omega > 0.
  for (int it = 0; it < 100; ++it) {
    const RVec ws = wrap(s, L);
    const RVec f = s * (1.0 + eta_mean) + trig_interpolate(unscaled, per, ws) - x;
    const RVec fp = trig_interpolate(unscaled, zeta_prime, ws);
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      if (f[i] > 0.0) hi[i] = s[i];
      else lo[i] = s[i];
      double next = s[i] - f[i] / fp[i];
      if (!(next > lo[i] && next < hi[i])) next = 0.5 * (lo[i] + hi[i]);
      worst = std::max(worst, std::abs(next - s[i]));
      s[i] = next;
    }
    if (worst <= 1e-15 * (1.0 + x.cwiseAbs().maxCoeff())) return s;
  }
  return s;
}

double WaveProfile::inverse_stretch(double x) const { return inverse_stretch(RVec::Constant(1, x))[0]; }

CoefficientSet coefficients(const WaveProfile& prof) {
  const Grid& g = prof.unscaled;
  const double e2 = prof.eps * prof.eps, e3 = e2 * prof.eps;
  CoefficientSet c;
  const Eigen::ArrayXd zp = prof.zeta_prime.array();
  c.p = (1.0 - prof.u1.array()) / zp;
  const Eigen::ArrayXd rad = (1.0 - prof.v1.array()) / zp;
  if (c.p.minCoeff() <= 0.0 || rad.minCoeff() <= 0.0)
    throw InvariantViolation("coefficients: p and (1 - v1)/zeta' must be positive");
  c.q = rad.sqrt();
  c.rho = c.q.array().sqrt();
  c.sqrt_p = c.p.array().sqrt();
  c.u_p = c.p.array() - 1.0;
  c.u_q = c.q.array() - 1.0;
  c.u_rho = c.rho.array() - 1.0;
  c.p_prime = spectral_derivative(g, c.p);
  c.q_prime = spectral_derivative(g, c.q);
  c.u_rho_prime = spectral_derivative(g, c.rho);
  c.ut_p = c.u_p / e2;
  c.ut_q = c.u_q / e2;
  c.ut_rho = c.u_rho / e2;
  c.K0 = (c.u_p.cwiseAbs() + c.u_q.cwiseAbs() + c.u_rho.cwiseAbs()).maxCoeff() / e2;
  c.K1 = (c.p_prime.cwiseAbs() + c.q_prime.cwiseAbs() + c.u_rho_prime.cwiseAbs()).maxCoeff() / e3;
  return c;
}

double steady_residual(const WaveProfile& p) {
  const Eigen::ArrayXd U = p.U_zeta.array(), V = p.V_zeta.array(), eta = p.eta_bar.array();
  const Eigen::ArrayXd r = U - p.gamma * eta - 0.5 * (U.square() - V.square()) - p.gamma * eta * V.square();
  const double scale = U.abs().maxCoeff();
  return scale > 0.0 ? r.abs().maxCoeff() / scale : r.abs().maxCoeff();
}

double steady_residual_physical(const WaveProfile& p) {
  const Grid& flat = p.unscaled;
  const int n = flat.n();
  const double L = flat.period(), Lp = p.physical_period();
  const Grid phys(n, Lp);
  const RVec x = phys.nodes();
  const RVec s = p.inverse_stretch(x);

  // Surface potential Phi(x) with Phi o zeta = integral of omega.
  double mw = 0.0;
  const RVec Pw = spectral_antiderivative(flat, p.omega, &mw);
  const RVec Phi = mw * s + trig_interpolate(flat, Pw, wrap(s, L));
  const double drift = mw * L / Lp;
  const RVec Phi_per = Phi - drift * x;
  const RVec U = spectral_derivative(phys, Phi_per).array() + drift;

  // eta = zeta#^{-1} (tanh D / D) d/dx zeta# Phi.
  const RVec zx = p.zeta(flat.nodes());
  const RVec Phi_flat = trig_interpolate(phys, Phi_per, wrap(zx, Lp)) + drift * zx;
  const RVec dPhi = spectral_derivative(flat, RVec(Phi_flat - mw * flat.nodes())).array() + mw;
  const RVec eta_flat = apply_real_symbol(flat, dPhi, [](cplx xi) { return tanh_ratio(xi); });
  const RVec eta = trig_interpolate(flat, eta_flat, wrap(s, L));
  const RVec V = spectral_derivative(phys, eta);

  const Eigen::ArrayXd u = U.array(), v = V.array(), e = eta.array();
  const Eigen::ArrayXd r = u - p.gamma * e - 0.5 * (u.square() - v.square()) - p.gamma * e * v.square();
  const double scale = u.abs().maxCoeff();
  return scale > 0.0 ? r.abs().maxCoeff() / scale : r.abs().maxCoeff();
}

}  // namespace wws
