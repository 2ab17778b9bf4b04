#include "wws/modes.hpp"

#include <cmath>
#include <random>

#include "wws/symbols.hpp"

namespace wws {

namespace {

CVec stack(const CVec& a, const CVec& b) {
  CVec z(a.size() + b.size());
  z << a, b;
  return z;
}

CVec apply_modes(const Grid& g, const CVec& per_mode, const RVec& v) {
  return g.inverse(CVec(per_mode.cwiseProduct(g.forward(CVec(v.cast<cplx>())))));
}

CVec half_T(const CVec& z3) { return 0.5 * to_diagonalized_variables(z3); }

double cond2(const Eigen::Matrix2cd& G) {
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(G);
  const auto& s = svd.singularValues();
  return s[1] > 0.0 ? s[0] / s[1] : INFINITY;
}

}  // namespace

cplx pairing(const CVec& f, const CVec& g, double dx) { return dx * g.dot(f); }

ModePair neutral_modes(const WaveProfile& prof, const LinearizedOperator& op, const ModeOptions& opts) {
  const Grid& g = prof.unscaled;
  const int n = g.n();
  const double L = g.period(), dx = g.dx();
  const WeightParams& w = op.w;
  ModePair m;
  if (prof.theta.cwiseAbs().maxCoeff() == 0.0) {
    m.z3 = m.y3 = m.z4 = m.y4 = CVec::Zero(2 * n);
    m.z3_star = m.y3_star = m.z4_star = m.y4_star = CVec::Zero(2 * n);
    m.pairing.setZero();
    m.pairing_cond = m.pairing_cond_raw = INFINITY;
    return m;
  }
  if (!(opts.h > 1e-8 && opts.h < 1e-2)) throw NumericalFailure("neutral_modes: wave-speed step must lie in (1e-8, 1e-2)");

  // Profile family at fixed unscaled period: gamma = gamma_hat / c^2 for c = 1 +- h.
  auto member = [&](double c) {
    const double gam = prof.gamma / (c * c);
    const double e = std::sqrt(1.0 - gam);
    return solve_profile(e, prof.alpha_hat, Grid(n, e * L), opts.profile);
  };
  // Five-point centered stencil: the profile depends on c through eps ~ sqrt(1 - gamma/c^2),
  // so the higher c-derivatives grow like powers of 1/eps.
  const WaveProfile p1 = member(1.0 + opts.h), m1 = member(1.0 - opts.h);
  const WaveProfile p2 = member(1.0 + 2.0 * opts.h), m2 = member(1.0 - 2.0 * opts.h);
  auto d_c = [&](const RVec WaveProfile::*f) {
    return RVec((8.0 * (p1.*f - m1.*f) - (p2.*f - m2.*f)) / (12.0 * opts.h));
  };
  const RVec omega_c = d_c(&WaveProfile::omega);
  const RVec eta_c = d_c(&WaveProfile::eta_bar);
  const RVec zeta_c = d_c(&WaveProfile::zeta_dev);

  const Eigen::ArrayXd om = prof.omega.array(), zp = prof.zeta_prime.array();
  const RVec x = g.nodes();
  const RVec ex = (w.a * x).array().exp(), emx = (-w.a * x).array().exp();
  const CoefficientSet coef = coefficients(prof);
  const RVec gamma_q = prof.gamma * coef.q;

  // Stretched pullbacks of eta_c: composition and density forms.
  const RVec eta_bar_x = spectral_derivative(g, prof.eta_bar);
  const RVec etac_comp = eta_c.array() - eta_bar_x.array() * zeta_c.array() / zp;
  const RVec etac_dens = zp * etac_comp.array();

  const CVec S_modes = symbol_values(sym::S(w.gamma), g, w.a, Nyquist::Cosine);
  const CVec SD_modes = symbol_values(sym::SinvD(w.gamma), g, w.a, Nyquist::Cosine);
  const CVec S_over_D = SD_modes.cwiseInverse();                 // S / (i xi)
  const CVec S_adj_inv = S_modes.conjugate().cwiseInverse();      // adjoint inverse of S

  // Translation mode.
  m.z3 = stack(CVec(gamma_q.cwiseProduct(ex).cwiseProduct(prof.hil_omega).cast<cplx>()),
               apply_modes(g, S_modes, RVec(ex.cwiseProduct(prof.u1))));

  // Wave-speed mode: the second component is S applied to the weighted antiderivative of
  // the derivative of the surface potential variation.
  const RVec a1 = om * zeta_c.array() / zp;
  const RVec a2 = prof.v_surf.cwiseProduct(etac_comp);
  const RVec gprime = prof.omega + omega_c - spectral_derivative(g, a1) - spectral_derivative(g, a2);
  m.y3 = stack(CVec(gamma_q.cwiseProduct(ex).cwiseProduct(etac_dens).cast<cplx>()),
               apply_modes(g, S_over_D, RVec(ex.cwiseProduct(gprime))));

  m.z4 = to_diagonalized_variables(m.z3);
  m.y4 = to_diagonalized_variables(m.y3);
  const double nz = m.z4.norm();
  m.residual_z = (op.A * m.z4).norm() / nz;
  m.residual_y = (op.A * m.y4 + m.z4).norm() / nz;

  // Surface potentials vanishing at the right (+) and left (-) edges.
  double mw = 0.0, mc = 0.0;
  const RVec Pw = spectral_antiderivative(g, prof.omega, &mw);
  const RVec Pc = spectral_antiderivative(g, omega_c, &mc);
  const RVec Phi_plus = mw * (x.array() - 0.5 * L) + (Pw.array() - Pw[0]);
  const RVec Phi_minus = mw * (x.array() + 0.5 * L) + (Pw.array() - Pw[0]);
  m.edge_constant_gap = std::abs((Phi_minus - Phi_plus).mean() - dx * prof.omega.sum());
  const RVec Phic_minus = mc * (x.array() + 0.5 * L) + (Pc.array() - Pc[0]);
  const RVec phic_minus = Phi_minus + Phic_minus - a1 - a2;

  m.z3_star = stack(CVec((-emx.cwiseProduct(prof.u1).cwiseQuotient(gamma_q)).cast<cplx>()),
                    apply_modes(g, S_adj_inv, RVec(emx.cwiseProduct(prof.hil_omega))));
  m.y3_star = stack(CVec((-emx.cwiseProduct(phic_minus).cwiseQuotient(gamma_q)).cast<cplx>()),
                    apply_modes(g, S_adj_inv, RVec(emx.cwiseProduct(etac_dens))));
  m.z4_star = half_T(m.z3_star);
  m.y4_star = half_T(m.y3_star);

  m.pairing << pairing(m.z4, m.z4_star, dx), pairing(m.y4, m.z4_star, dx), pairing(m.z4, m.y4_star, dx),
      pairing(m.y4, m.y4_star, dx);
  m.pairing_cond_raw = cond2(m.pairing);
  const double nrm[2] = {m.z4.norm(), m.y4.norm()}, nrm_star[2] = {m.z4_star.norm(), m.y4_star.norm()};
  Eigen::Matrix2cd unit = m.pairing;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) unit(i, j) /= dx * nrm[j] * nrm_star[i];
  m.pairing_cond = cond2(unit);
  const CMat AH = op.A.adjoint();
  const double ns = m.z4_star.norm();
  m.adjoint_residual_z = (AH * m.z4_star).norm() / ns;
  m.adjoint_residual_y = (AH * m.y4_star - m.z4_star).norm() / ns;
  return m;
}

CVec symplectic_project(const CVec& z, const ModePair& m, double dx) {
  if (!(m.pairing_cond < 1e12)) throw InvariantViolation("symplectic_project: pairing matrix is rank deficient");
  const Eigen::Vector2cd rhs(pairing(z, m.z4_star, dx), pairing(z, m.y4_star, dx));
  const Eigen::Vector2cd c = m.pairing.fullPivLu().solve(rhs);
  return z - c[0] * m.z4 - c[1] * m.y4;
}

PhysicalPairing physical_pairing_check(const WaveProfile& prof, const ModePair& m, const WeightParams& w,
                                       unsigned long seed) {
  const Grid& g = prof.unscaled;
  const Grid phys = physical_grid(prof);
  const double Lp = phys.period();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  struct Bump {
    double c, s, a;
  };
  auto bumps = [&]() {
    std::vector<Bump> b(3);
    for (auto& e : b) e = {(U(rng) - 0.5) * 0.4 * Lp, (0.01 + 0.04 * U(rng)) * Lp, 2.0 * U(rng) - 1.0};
    return b;
  };
  const auto be = bumps(), bp = bumps();
  auto eval = [](const std::vector<Bump>& b, const RVec& x) {
    RVec f = RVec::Zero(x.size());
    for (const auto& e : b) f.array() += e.a * (-0.5 * ((x.array() - e.c) / e.s).square()).exp();
    return f;
  };

  const RVec xz = prof.zeta(g.nodes());
  const RVec ex = (w.a * g.nodes()).array().exp();
  const CoefficientSet coef = coefficients(prof);
  const CVec S_modes = symbol_values(sym::S(w.gamma), g, w.a, Nyquist::Cosine);
  const RVec first = prof.gamma * coef.q.array() * ex.array() * prof.zeta_prime.array() * eval(be, xz).array();
  CVec zdot3(2 * g.n());
  zdot3 << first.cast<cplx>(), apply_modes(g, S_modes, RVec(ex.cwiseProduct(eval(bp, xz))));

  PhysicalPairing r;
  r.transformed = -pairing(zdot3, m.z3_star, g.dx());
  const CVec z1 = physical_translation_mode(prof);
  const int n = phys.n();
  const RVec xp = phys.nodes();
  const RVec eta_x = z1.head(n).real(), phi_x = z1.tail(n).real();
  r.physical = phys.dx() * (eval(be, xp).cwiseProduct(phi_x) - eval(bp, xp).cwiseProduct(eta_x)).sum();
  return r;
}

}  // namespace wws
