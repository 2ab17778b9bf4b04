#include "wws/operator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "wws/symbols.hpp"

namespace wws {

namespace {

double wrap(double x, double L) { return x - L * std::round(x / L); }

RVec wrap(const RVec& x, double L) {
  RVec y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = wrap(x[i], L);
  return y;
}

CMat blocks(const CMat& a, const CMat& b, const CMat& c, const CMat& d) {
  const Eigen::Index n = a.rows();
  CMat M(2 * n, 2 * n);
  M << a, b, c, d;
  return M;
}

CMat diag(const RVec& v) { return v.cast<cplx>().asDiagonal(); }

// Node-basis derivative on a periodic grid at a = 0 (Cosine Nyquist rule).
CMat derivative_matrix(const Grid& g) {
  WeightParams w0;
  return materialize(Pipeline{multiplier(sym::derivative(), g, w0, Nyquist::Cosine)}, g);
}

}  // namespace

Stage op_multiplier(const MultiplierSymbol& s, const Grid& g, const WeightParams& w) {
  return multiplier(s, g, w, Nyquist::Cosine);
}

Stage op_pointwise(const char* name, const Grid& g, const RVec& v) {
  return pointwise(name, g, v, Product::Padded);
}

double LinearizedOperator::junk_norm_sum() const {
  return operator_norm(J11) + operator_norm(J12) + operator_norm(J21) + operator_norm(J22);
}

LinearizedOperator assemble_A(const WaveProfile& profile, const CoefficientSet& c, const WeightParams& w,
                              const AssembleOptions& opts) {
  const Grid& g = profile.unscaled;
  if (c.p.size() != g.n()) throw std::invalid_argument("assemble_A: coefficients do not match the profile grid");
  LinearizedOperator op(g);
  op.w = w;
  const Stage D = op_multiplier(sym::derivative(), g, w);
  const Stage S = op_multiplier(sym::S(w.gamma), g, w);
  const Stage SD = op_multiplier(sym::SinvD(w.gamma), g, w);
  const Stage p = op_pointwise("p", g, c.p), q = op_pointwise("q", g, c.q), rho = op_pointwise("rho", g, c.rho);
  const Stage sp = op_pointwise("sqrt_p", g, c.sqrt_p);
  const Stage up = op_pointwise("u_p", g, c.u_p), uq = op_pointwise("u_q", g, c.u_q);
  const RVec r1 = c.q_prime.cwiseProduct(c.p).cwiseQuotient(c.q);

  op.aplus_modes = symbol_values(sym::Aplus(w.gamma), g, w.a, Nyquist::Cosine);
  op.aminus_modes = symbol_values(sym::Aminus(w.gamma), g, w.a, Nyquist::Cosine);
  CMat Ap = multiplier_matrix(g, op.aplus_modes);
  CMat Am = multiplier_matrix(g, op.aminus_modes);
  CMat U = materialize({{1.0, {up, D}}, {1.0, {uq, S}}}, g);
  CMat R1 = materialize(Pipeline{op_pointwise("R1", g, r1)}, g);
  CMat PSSD = materialize({{1.0, {SD, S, p}}, {-1.0, {SD, p, S}}}, g);
  CMat R2 = materialize(Pipeline{op_pointwise("p_prime", g, c.p_prime)}, g) + PSSD;
  CMat Sq = materialize({{1.0, {q, S}}, {-1.0, {S, q}}}, g);
  CMat SRR = materialize({{1.0, {rho, rho, S}}, {-2.0, {rho, S, rho}}, {1.0, {S, rho, rho}}}, g);
  CMat BD = materialize(Pipeline{sp, D, sp}, g);
  CMat BS = materialize(Pipeline{rho, S, rho}, g);

  op.J11 = -0.5 * (R2 + R1 + Sq);
  op.J12 = -0.5 * (R1 - R2 - Sq);
  op.J21 = -0.5 * (R1 - R2 + Sq);
  op.J22 = -0.5 * (R1 + PSSD + SRR);
  op.A11 = Ap + U + op.J11;
  CMat Bm = BD - BS;
  op.A22 = Bm + op.J22;
  op.A = blocks(op.A11, op.J12, op.J21, op.A22);
  if (opts.keep_parts) {
    op.Bplus = BD + BS;
    op.Bminus = std::move(Bm);
    op.Jt11 = -0.5 * (R1 + PSSD - SRR);
    op.A11b = op.Bplus + op.Jt11;
    op.Aplus = std::move(Ap);
    op.Aminus = std::move(Am);
    op.U = std::move(U);
    op.R1 = std::move(R1);
    op.R2 = std::move(R2);
    op.PSSD = std::move(PSSD);
    op.Sq = std::move(Sq);
    op.SRR = std::move(SRR);
  }
  return op;
}

CMat assemble_A3(const CoefficientSet& c, const Grid& g, const WeightParams& w) {
  const Stage D = op_multiplier(sym::derivative(), g, w);
  const Stage S = op_multiplier(sym::S(w.gamma), g, w);
  const Stage SD = op_multiplier(sym::SinvD(w.gamma), g, w);
  const Stage p = op_pointwise("p", g, c.p), q = op_pointwise("q", g, c.q);
  const Stage pq = op_pointwise("p/q", g, c.p.cwiseQuotient(c.q));
  return blocks(materialize(Pipeline{pq, D, q}, g), -materialize(Pipeline{S, q}, g),
                -materialize(Pipeline{q, S}, g), materialize(Pipeline{SD, p, S}, g));
}

CMat to_diagonalized_variables(const CMat& M3) {
  const Eigen::Index n = M3.rows() / 2;
  const CMat a = M3.topLeftCorner(n, n), b = M3.topRightCorner(n, n);
  const CMat c = M3.bottomLeftCorner(n, n), d = M3.bottomRightCorner(n, n);
  // T = [[1,-1],[1,1]], T^{-1} = 1/2 [[1,1],[-1,1]].
  const CMat t11 = a - c, t12 = b - d, t21 = a + c, t22 = b + d;
  return 0.5 * blocks(t11 - t12, t11 + t12, t21 - t22, t21 + t22);
}

CVec to_diagonalized_variables(const CVec& z3) {
  const Eigen::Index n = z3.size() / 2;
  CVec z(2 * n);
  z << z3.head(n) - z3.tail(n), z3.head(n) + z3.tail(n);
  return z;
}

SymplecticFactors jl_factors(const CoefficientSet& c, const Grid& g, const WeightParams& w) {
  const Stage S = op_multiplier(sym::S(w.gamma), g, w);
  const Stage SD = op_multiplier(sym::SinvD(w.gamma), g, w);
  const Stage q = op_pointwise("q", g, c.q);
  const Stage pq = op_pointwise("p/q", g, c.p.cwiseQuotient(c.q));
  const int n = g.n();
  const CMat Z = CMat::Zero(n, n), I = CMat::Identity(n, n);
  SymplecticFactors f;
  f.J = blocks(Z, materialize(Pipeline{S, q}, g), -materialize(Pipeline{q, S}, g), Z);
  f.L = blocks(I, -materialize(Pipeline{SD, pq}, g), materialize(Pipeline{pq, SD}, g), -I);
  return f;
}

Grid physical_grid(const WaveProfile& p) { return Grid(p.unscaled.n(), p.physical_period()); }

CMat assemble_A_eta_physical(const WaveProfile& p) {
  const Grid& flat = p.unscaled;
  const Grid phys = physical_grid(p);
  const int n = flat.n();
  const double L = flat.period(), Lp = phys.period();
  const RVec s = wrap(p.inverse_stretch(phys.nodes()), L);
  const RVec u = trig_interpolate(flat, p.u1, s);
  const RVec vp = trig_interpolate(flat, p.v_prime, s);

  const CMat Dx = derivative_matrix(phys);
  WeightParams w0;
  const CMat Hf = materialize(Pipeline{multiplier(sym::hilbert(), flat, w0, Nyquist::Cosine)}, flat);
  const CMat Zp = interpolation_matrix(phys, wrap(p.zeta(flat.nodes()), Lp)).cast<cplx>();
  const CMat Zs = interpolation_matrix(flat, s).cast<cplx>();
  const CMat Heta = Zs * Hf * Zp;

  const RVec one_u = RVec::Ones(n) - u;
  const RVec c21 = one_u.cwiseProduct(vp).array() - p.gamma;
  return blocks(Dx * diag(one_u), -Dx * Heta, diag(c21), diag(one_u) * Dx);
}

CVec physical_translation_mode(const WaveProfile& p) {
  const Grid phys = physical_grid(p);
  const RVec s = wrap(p.inverse_stretch(phys.nodes()), p.unscaled.period());
  const RVec eta_x = trig_interpolate(p.unscaled, p.V_zeta, s);
  const RVec phi_x = trig_interpolate(p.unscaled, p.u1, s);
  CVec z(2 * phys.n());
  z << eta_x.cast<cplx>(), phi_x.cast<cplx>();
  return z;
}

double filtered_norm(const CMat& M, const Grid& g) {
  const int n = g.n();
  CVec mask(n);
  for (int i = 0; i < n; ++i) mask[i] = 3 * std::abs(g.mode(i)) <= n ? 1.0 : 0.0;
  const CMat P = multiplier_matrix(g, mask);
  const int blocks_n = static_cast<int>(M.rows() / n);
  CMat Pb = CMat::Zero(M.rows(), M.cols());
  for (int b = 0; b < blocks_n; ++b) Pb.block(b * n, b * n, n, n) = P;
  return operator_norm(Pb * M * Pb);
}

CMat reversal(const Grid& g, int components) {
  const int n = g.n();
  CMat R = CMat::Zero(components * n, components * n);
  for (int b = 0; b < components; ++b)
    for (int j = 0; j < n; ++j) R(b * n + (n - j) % n, b * n + j) = 1.0;
  return R;
}

FourierFilters fourier_filters(const Grid& g, double eps, double nu_hat) {
  const int n = g.n();
  FourierFilters f;
  f.kappa_hat = std::pow(eps, nu_hat);
  f.sharp_mask.resize(n);
  f.soft_mask.resize(n);
  for (int i = 0; i < n; ++i) {
    const double k = std::abs(g.wavenumber(i));
    f.sharp_mask[i] = k <= f.kappa_hat ? 1.0 : 0.0;
    const double s = k / f.kappa_hat;
    f.soft_mask[i] = s <= 1.0 ? 1.0 : (s >= 2.0 ? 0.0 : 2.0 - s);
    if (k < f.kappa_hat) ++f.modes_below;
  }
  if (f.modes_below < 8) {
    std::ostringstream msg;
    msg << "fourier_filters: only " << f.modes_below << " modes below kappa_hat = " << f.kappa_hat
        << "; the grid is too coarse";
    throw std::invalid_argument(msg.str());
  }
  const CMat I = CMat::Identity(n, n);
  f.Pi_o = multiplier_matrix(g, f.sharp_mask.cast<cplx>());
  f.Pi_i = I - f.Pi_o;
  f.Pi_o_soft = multiplier_matrix(g, f.soft_mask.cast<cplx>());
  f.Pi_i_soft = I - f.Pi_o_soft;
  return f;
}

double resolvent_norm(const CMat& A, cplx lam) {
  CMat M = -A;
  M.diagonal().array() += lam;
  const double smin = smallest_singular(M);
  if (smin < 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "resolvent_norm: lambda = " << lam.real() << " + " << lam.imag()
        << "i is within rounding of an eigenvalue (sigma_min = " << smin << ")";
    throw NumericalFailure(msg.str());
  }
  return 1.0 / smin;
}

namespace {

// Distance from z to the polyline through the sampled curve points.
double curve_distance(cplx z, const std::vector<cplx>& pts) {
  double best = INFINITY;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const cplx a = pts[i], b = pts[i + 1], d = b - a;
    const double len2 = std::norm(d);
    double t = len2 > 0.0 ? std::real((z - a) * std::conj(d)) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::abs(z - (a + t * d)));
  }
  return best;
}

}  // namespace

SpectrumReport classify_spectrum(const CVec& ev, const Grid& g, const WeightParams& w, double r0_override) {
  SpectrumReport r;
  r.eigenvalues = ev;
  const double e3 = w.eps * w.eps * w.eps;
  r.r0 = r0_override > 0.0 ? r0_override : w.alpha_hat * e3 / 20.0;
  r.gap_line = -w.alpha_hat * e3 / 6.0;
  const double kmax = std::abs(g.wavenumber(g.n() / 2));
  const int samples = 16 * g.n();
  std::vector<cplx> plus(samples + 1), minus(samples + 1);
  for (int i = 0; i <= samples; ++i) {
    const double k = -kmax + 2.0 * kmax * i / samples;
    plus[i] = Aplus(cplx(k, w.a), w.gamma);
    minus[i] = Aminus(cplx(k, w.a), w.gamma);
  }
  // Curve tube: a few grid steps of the curve parametrization (group speed <= 2).
  const double band = 5.0 * 2.0 * (2.0 * M_PI / g.period());
  std::vector<cplx> nz, es, ot;
  r.max_real_excluding_kernel = -INFINITY;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const cplx z = ev[i];
    EigenClass c;
    if (std::abs(z) < r.r0)
      c = EigenClass::NearZero;
    else if (std::min(curve_distance(z, plus), curve_distance(z, minus)) < band)
      c = EigenClass::Essential;
    else
      c = EigenClass::Other;
    r.classes.push_back(c);
    (c == EigenClass::NearZero ? nz : c == EigenClass::Essential ? es : ot).push_back(z);
    if (c != EigenClass::NearZero) r.max_real_excluding_kernel = std::max(r.max_real_excluding_kernel, z.real());
    if (z.real() >= r.gap_line) ++r.gap_count;
    r.max_abs_real = std::max(r.max_abs_real, std::abs(z.real()));
  }
  auto to_vec = [](const std::vector<cplx>& v) { return CVec(Eigen::Map<const CVec>(v.data(), v.size())); };
  r.near_zero = to_vec(nz);
  r.essential_band = to_vec(es);
  r.other = to_vec(ot);
  return r;
}

SpectrumReport spectrum(const CMat& A, const Grid& g, const WeightParams& w) {
  return classify_spectrum(eigenvalues(A), g, w);
}

namespace {

CMat resolvent(const CMat& A, cplx lam) {
  CMat M = -A;
  M.diagonal().array() += lam;
  Eigen::PartialPivLU<CMat> lu(M);
  return lu.inverse();
}

CMat contour_sum(const CMat& A, cplx center, double radius, int nodes, int offset, int stride) {
  const Eigen::Index n = A.rows();
  CMat P = CMat::Zero(n, n);
  for (int j = offset; j < nodes; j += stride) {
    const cplx e = std::polar(1.0, 2.0 * M_PI * (j + 0.5) / nodes);
    P += (radius * e / static_cast<double>(nodes)) * resolvent(A, center + radius * e);
  }
  return P;
}

}  // namespace

SpectralProjection spectral_projection(const CMat& A, cplx center, double radius, int nodes, const CVec* ev,
                                       bool check_doubling) {
  SpectralProjection out;
  if (ev) {
    double dmin = INFINITY;
    for (Eigen::Index i = 0; i < ev->size(); ++i) dmin = std::min(dmin, std::abs(std::abs((*ev)[i] - center) - radius));
    out.min_circle_distance = dmin;
    if (dmin < 0.1 * radius) {
      std::ostringstream msg;
      msg << "spectral_projection: an eigenvalue lies within " << dmin << " of the contour (radius " << radius << ")";
      throw InvariantViolation(msg.str());
    }
  }
  if (check_doubling) {
    // The 2M-node rule reuses the M nodes shifted by half a step.
    const CMat Pa = contour_sum(A, center, radius, 2 * nodes, 0, 2);
    const CMat Pb = contour_sum(A, center, radius, 2 * nodes, 1, 2);
    out.P0 = 2.0 * Pa;
    out.doubling_difference = operator_norm(out.P0 - (Pa + Pb));
  } else {
    out.P0 = contour_sum(A, center, radius, nodes, 0, 1);
  }
  const CVec pe = eigenvalues(out.P0);
  for (Eigen::Index i = 0; i < pe.size(); ++i)
    if (std::abs(pe[i]) > 0.5) ++out.rank;
  out.idempotency_error = operator_norm(out.P0 * out.P0 - out.P0) / std::max(1.0, operator_norm(out.P0));
  return out;
}

CVec random_smooth_field(const Grid& g, unsigned long seed, double k_max) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double L = g.period();
  const RVec x = g.nodes();
  CVec f = CVec::Zero(g.n());
  for (int b = 0; b < 4; ++b) {
    const double x0 = (U(rng) - 0.5) * 0.5 * L;
    const double width = (0.02 + 0.08 * U(rng)) * L;
    const double k = (2.0 * U(rng) - 1.0) * k_max;
    const cplx amp = std::polar(0.5 + U(rng), 2.0 * M_PI * U(rng));
    for (int j = 0; j < g.n(); ++j) {
      const double t = (x[j] - x0) / width;
      f[j] += amp * std::exp(-0.5 * t * t) * std::polar(1.0, k * x[j]);
    }
  }
  return f;
}

EnergyReport energy_estimate_checks(const CoefficientSet& c, const Grid& g, const WeightParams& w, double nu_hat,
                                    int fields, unsigned long seed) {
  const Stage D = op_multiplier(sym::derivative(), g, w);
  const Stage S = op_multiplier(sym::S(w.gamma), g, w);
  const Stage sp = op_pointwise("sqrt_p", g, c.sqrt_p), rho = op_pointwise("rho", g, c.rho);
  const Stage p = op_pointwise("p", g, c.p), q = op_pointwise("q", g, c.q);
  const FourierFilters f = fourier_filters(g, w.eps, nu_hat);
  const Pipeline pdp{sp, D, sp}, qsq{rho, S, rho}, dpsq_a{p, D}, dpsq_b{q, S};
  const Stage pi_i = multiplier_values("pi_i", (RVec::Ones(g.n()) - f.sharp_mask).cast<cplx>());
  const double dx = g.dx();
  const double scale1 = w.alpha_hat * w.eps;
  const double scale_hp = std::pow(w.eps, 1.0 + 2.0 * nu_hat) * w.alpha_hat;
  EnergyReport r;
  r.fields = fields;
  r.pdp_min_ratio = r.qsq_min_ratio = r.highpass_min_ratio = INFINITY;
  r.qsq_max_ratio = -INFINITY;
  const double kmax = std::abs(g.wavenumber(g.n() / 2)) / 3.0;
  for (int i = 0; i < fields; ++i) {
    const CVec z = random_smooth_field(g, seed + static_cast<unsigned long>(i), kmax);
    const double nz = dx * z.squaredNorm();
    const double a1 = -dx * z.dot(apply(pdp, g, z)).real();
    const double a2 = dx * z.dot(apply(qsq, g, z)).real();
    const CVec zi = apply(Pipeline{pi_i}, g, z);
    const double ni = dx * zi.squaredNorm();
    const CVec hz = apply(dpsq_a, g, zi) + apply(dpsq_b, g, zi);
    const double a3 = -dx * zi.dot(hz).real();
    r.pdp_min_ratio = std::min(r.pdp_min_ratio, a1 / (scale1 * nz));
    r.qsq_min_ratio = std::min(r.qsq_min_ratio, a2 / (scale1 * nz));
    r.qsq_max_ratio = std::max(r.qsq_max_ratio, a2 / (scale1 * nz));
    if (ni > 1e-30 * nz) r.highpass_min_ratio = std::min(r.highpass_min_ratio, a3 / (scale_hp * ni));
  }
  return r;
}

CommutatorBound commutator_bound(const RVec& gu, const Grid& g, const WeightParams& w) {
  const int n = g.n();
  const double eps = w.eps, e2 = eps * eps;
  const double s = 4.0 / 3.0;
  const double sg = std::sqrt(w.gamma);
  const MultiplierSymbol Q{"S/sqrt(gamma)", [&](cplx xi) { return S_sym(xi, w.gamma) / sg; }, Parity::Odd};
  const MultiplierSymbol R{"<D>^(1/2)", [](cplx xi) { return std::pow(1.0 + xi * xi, 0.25); }, Parity::Even};
  const CVec qv = symbol_values(Q, g, w.a, Nyquist::Cosine);
  const CVec rv = symbol_values(R, g, w.a, Nyquist::Cosine);
  const Stage Qs = multiplier_values("Q", qv), Rs = multiplier_values("R", rv);
  const Stage gs = op_pointwise("g", g, gu);
  CommutatorBound b;
  b.measured = operator_norm(materialize({{1.0, {Rs, gs, Qs}}, {-1.0, {Rs, Qs, gs}}}, g));
  // Scaled wavenumbers K = k / eps on the grid of period eps L.
  const Grid scaled(n, eps * g.period());
  double cs = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double dK = scaled.wavenumber(i) - scaled.wavenumber(j);
      const double v = e2 * std::abs(qv[i] - qv[j]) * std::abs(rv[j]) / std::pow(1.0 + dK * dK, 0.5 * s);
      cs = std::max(cs, v);
    }
  b.c_star = cs;
  const CVec G = scaled.forward(CVec((gu / e2).cast<cplx>()));
  double cg = 0.0;
  for (int i = 0; i < n; ++i) {
    const double K = scaled.wavenumber(i);
    cg += std::pow(1.0 + K * K, 0.5 * s) * std::abs(G[i]);
  }
  b.c_g = cg / scaled.period();
  return b;
}

double commutator_norm_SinvD(const RVec& gu, const Grid& g, const WeightParams& w) {
  const Stage S = op_multiplier(sym::S(w.gamma), g, w);
  const Stage SD = op_multiplier(sym::SinvD(w.gamma), g, w);
  const Stage gs = op_pointwise("g", g, gu);
  return operator_norm(materialize({{1.0, {SD, gs, S}}, {-1.0, {SD, S, gs}}}, g));
}

CVec resolved_eigenvalues(const EigenPairs& ep, const Grid& g, int components, double tol, double min_abs) {
  const int n = g.n();
  std::vector<cplx> keep;
  for (Eigen::Index c = 0; c < ep.values.size(); ++c) {
    if (std::abs(ep.values[c]) < min_abs) continue;
    double high = 0.0, total = 0.0;
    for (int b = 0; b < components; ++b) {
      const CVec coef = g.forward(CVec(ep.vectors.col(c).segment(b * n, n)));
      for (int i = 0; i < n; ++i) {
        const double e = std::norm(coef[i]);
        total += e;
        if (4 * std::abs(g.mode(i)) > n) high += e;
      }
    }
    if (total > 0.0 && high < tol * total) keep.push_back(ep.values[c]);
  }
  return Eigen::Map<const CVec>(keep.data(), keep.size());
}

}  // namespace wws
