#include "wws/bundle.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <sstream>

#include "wws/symbols.hpp"

namespace wws {

namespace {

const double kSqrt3 = std::sqrt(3.0);

CVec cosine_symbol(const Grid& g, double a, const std::function<cplx(cplx)>& f) {
  return symbol_values(MultiplierSymbol{"bundle", f, Parity::None}, g, a, Nyquist::Cosine);
}

// Shared pieces of the water-wave bundle in the node basis.
struct WaterParts {
  Grid grid;
  CVec aplus;
  CMat UJ11, J12, J21, A22;
  WaterParts(const Grid& g) : grid(g) {}
};

CMat water_eval(const WaterParts& w, cplx lam) {
  const int n = w.grid.n();
  CMat M = -w.A22;
  M.diagonal().array() += lam;
  const CMat X = M.partialPivLu().solve(w.J21);
  const CMat K = w.UJ11 + w.J12 * X;
  const CVec inv = (lam - w.aplus.array()).inverse().matrix();
  return CMat::Identity(n, n) - multiplier_matrix(w.grid, inv) * K;
}

}  // namespace

Bundle Bundle::water(const LinearizedOperator& op) {
  if (op.U.size() == 0) throw std::invalid_argument("Bundle::water: operator assembled without parts");
  auto parts = std::make_shared<WaterParts>(op.grid);
  parts->aplus = op.aplus_modes;
  parts->UJ11 = op.U + op.J11;
  parts->J12 = op.J12;
  parts->J21 = op.J21;
  parts->A22 = op.A22;
  Bundle b;
  b.kind_ = Kind::W;
  b.n_ = op.n();
  const double e = op.w.eps, ah = op.w.alpha_hat;
  b.re_min_ = std::max(-ah * e * e * e / 6.0, -0.5 * e * ah);
  b.f_ = [parts](cplx lam) { return water_eval(*parts, lam); };
  return b;
}

Bundle Bundle::water_scaled(const LinearizedOperator& op) {
  Bundle b = water(op);
  const double e3 = op.w.eps * op.w.eps * op.w.eps;
  b.kind_ = Kind::WTilde;
  b.re_min_ /= e3;
  auto f = b.f_;
  b.f_ = [f, e3](cplx lam_hat) { return f(e3 * lam_hat); };
  return b;
}

Bundle Bundle::kdv(const Grid& scaled, double alpha_hat) {
  const RVec w = kdv_profile(scaled);
  auto stage = std::make_shared<Stage>(pointwise("3/2 w", scaled, RVec(1.5 * w), Product::Padded));
  Bundle b;
  b.kind_ = Kind::W0;
  b.n_ = scaled.n();
  b.re_min_ = -0.5 * alpha_hat * (1.0 - alpha_hat * alpha_hat / 3.0);
  b.f_ = [stage, scaled, alpha_hat](cplx lam) {
    const CVec m = cosine_symbol(scaled, alpha_hat, [lam](cplx xi) {
      const cplx d = I_unit * xi;
      return d / (lam - 0.5 * d + d * d * d / 6.0);
    });
    CMat W = materialize(Pipeline{*stage, multiplier_values("kdv resolvent D", m)}, scaled);
    W.diagonal().array() += 1.0;
    return W;
  };
  return b;
}

bool Bundle::in_domain(cplx lam) const {
  return kind_ == Kind::W0 ? lam.real() > re_min_ : lam.real() >= re_min_;
}

CMat Bundle::eval(cplx lam) const {
  if (!in_domain(lam)) {
    std::ostringstream msg;
    msg << "Bundle::eval: Re lambda = " << lam.real() << " lies outside the validity half-plane Re >= " << re_min_;
    throw std::domain_error(msg.str());
  }
  return f_(lam);
}

CMat eval_W_tilde_scaled_route(const WaveProfile& prof, const CoefficientSet& c, const WeightParams& w,
                               cplx lam_hat) {
  const double e = w.eps, e2 = e * e, e3 = e2 * e, ah = w.alpha_hat, gam = w.gamma;
  if (lam_hat.real() < -ah / 6.0) throw std::domain_error("eval_W_tilde_scaled_route: Re lambda_hat < -alpha_hat/6");
  const Grid& g = prof.scaled;
  const int n = g.n();
  WeightParams ws = w;
  ws.a = ah;
  auto M = [&](const char* name, std::function<cplx(cplx)> f) {
    return multiplier(MultiplierSymbol{name, std::move(f), Parity::None}, g, ws, Nyquist::Cosine);
  };
  const Stage D = M("D", [](cplx xi) { return I_unit * xi; });
  const Stage S = M("S(eps .)/eps", [e, gam](cplx xi) { return S_sym(e * xi, gam) / e; });
  const Stage SD = M("SinvD(eps .)", [e, gam](cplx xi) { return SinvD(e * xi, gam); });
  auto P = [&](const char* name, const RVec& v) { return pointwise(name, g, v, Product::Padded); };
  const Stage up = P("u_p", c.ut_p), uq = P("u_q", c.ut_q), ur = P("u_rho", c.ut_rho);
  const Stage rho = P("rho", c.rho), sp = P("sqrt_p", c.sqrt_p);
  const RVec dup = spectral_derivative(g, c.ut_p), duq = spectral_derivative(g, c.ut_q);

  const CMat U = materialize({{1.0, {up, D}}, {1.0, {uq, S}}}, g);
  const CMat R1 = materialize(Pipeline{P("R1", RVec(duq.cwiseProduct(c.p).cwiseQuotient(c.q)))}, g);
  const CMat PSSD = materialize({{1.0, {SD, S, up}}, {-1.0, {SD, up, S}}}, g);
  const CMat R2 = materialize(Pipeline{P("p_prime", dup)}, g) + PSSD;
  const CMat Sq = materialize({{1.0, {uq, S}}, {-1.0, {S, uq}}}, g);
  const CMat SRR = e2 * materialize({{1.0, {ur, ur, S}}, {-2.0, {ur, S, ur}}, {1.0, {S, ur, ur}}}, g);
  const CMat J11 = -0.5 * (R2 + R1 + Sq), J12 = -0.5 * (R1 - R2 - Sq), J21 = -0.5 * (R1 - R2 + Sq);
  const CMat J22 = -0.5 * (R1 + PSSD + SRR);
  const CMat A22 = (materialize(Pipeline{sp, D, sp}, g) - materialize(Pipeline{rho, S, rho}, g)) / e2 + J22;

  CMat Mr = -A22;
  Mr.diagonal().array() += lam_hat;
  const CMat K = U + J11 + J12 * Mr.partialPivLu().solve(J21);
  const CVec ap = cosine_symbol(g, ah, [e, e3, gam](cplx xi) { return Aplus(e * xi, gam) / e3; });
  const CVec inv = (lam_hat - ap.array()).inverse().matrix();
  return CMat::Identity(n, n) - multiplier_matrix(g, inv) * K;
}

std::vector<cplx> Contour::points(int per_piece) const {
  std::vector<cplx> pts;
  for (const auto& p : pieces)
    for (int i = 0; i < per_piece; ++i) pts.push_back(p((i + 0.5) / per_piece));
  return pts;
}

Contour half_disc_contour(double radius, double re_min) {
  if (!(re_min < 0.0 && -re_min < radius)) throw std::invalid_argument("half_disc_contour: need -radius < re_min < 0");
  const double th = std::acos(re_min / radius);
  const double h = radius * std::sin(th);
  Contour c;
  c.pieces.push_back([=](double t) { return std::polar(radius, -th + t * th); });
  c.pieces.push_back([=](double t) { return std::polar(radius, t * th); });
  c.pieces.push_back([=](double t) { return cplx(re_min, h * (1.0 - t)); });
  c.pieces.push_back([=](double t) { return cplx(re_min, -h * t); });
  return c;
}

Contour circle_contour(cplx center, double radius) {
  Contour c;
  for (int q = 0; q < 4; ++q)
    c.pieces.push_back([=](double t) { return center + std::polar(radius, 0.5 * M_PI * (q + t)); });
  return c;
}

namespace {

ContourSample sample(const Bundle& B, cplx lam, double& min_sigma) {
  const CMat W = B.eval(lam);
  const LogDet ld = log_det(W);
  if (ld.rcond < 1e-13) {
    const double s = smallest_singular(W);
    if (s <= 1e-10) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "winding_multiplicity: characteristic value on the contour near " << lam.real() << " + " << lam.imag()
          << "i (sigma_min = " << s << ")";
      throw NumericalFailure(msg.str());
    }
    min_sigma = min_sigma == 0.0 ? s : std::min(min_sigma, s);
  }
  return {lam, ld.log_abs, ld.arg, ld.rcond};
}

double arg_step(double a, double b) { return std::remainder(b - a, 2.0 * M_PI); }

}  // namespace

ContourResult winding_multiplicity(const Bundle& B, const Contour& C, int m, bool parallel) {
  if (m < 1) throw std::invalid_argument("winding_multiplicity: at least one cell per piece");
  ContourResult r;
  double min_sigma = 0.0;
  for (const auto& piece : C.pieces) {
    std::vector<double> t(m + 1);
    std::vector<ContourSample> s(m + 1);
    for (int i = 0; i <= m; ++i) t[i] = static_cast<double>(i) / m;
    std::vector<double> sig(m + 1, 0.0);
    bool failed = false;
    std::string what;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int i = 0; i <= m; ++i) {
      try {
        s[i] = sample(B, piece(t[i]), sig[i]);
      } catch (const std::exception& e) {
#pragma omp critical
        {
          failed = true;
          what = e.what();
        }
      }
    }
    if (failed) throw NumericalFailure(what);
    for (double v : sig)
      if (v > 0.0) min_sigma = min_sigma == 0.0 ? v : std::min(min_sigma, v);
    // Sequential refinement of cells whose arg increment is too large.
    std::vector<ContourSample> out{s[0]};
    for (int i = 0; i < m; ++i) {
      struct Cell {
        double ta, tb;
        ContourSample a, b;
        int depth;
      };
      std::vector<Cell> stack{{t[i], t[i + 1], s[i], s[i + 1], 0}};
      while (!stack.empty()) {
        Cell c = stack.back();
        stack.pop_back();
        if (std::abs(arg_step(c.a.arg, c.b.arg)) >= 0.5 * M_PI && c.depth < 12) {
          const double tm = 0.5 * (c.ta + c.tb);
          const ContourSample mid = sample(B, piece(tm), min_sigma);
          stack.push_back({tm, c.tb, mid, c.b, c.depth + 1});
          stack.push_back({c.ta, tm, c.a, mid, c.depth + 1});
        } else {
          out.push_back(c.b);
        }
      }
    }
    // Pieces share endpoints; drop the duplicate start of each later piece.
    const size_t skip = r.samples.empty() ? 0 : 1;
    r.samples.insert(r.samples.end(), out.begin() + skip, out.end());
  }
  double total = 0.0;
  for (size_t i = 0; i + 1 < r.samples.size(); ++i) {
    const double d = arg_step(r.samples[i].arg, r.samples[i + 1].arg);
    r.max_step_arg = std::max(r.max_step_arg, std::abs(d));
    total += d;
  }
  const double close = arg_step(r.samples.back().arg, r.samples.front().arg);
  r.max_step_arg = std::max(r.max_step_arg, std::abs(close));
  total += close;
  r.winding_real = total / (2.0 * M_PI);
  r.winding = static_cast<int>(std::lround(r.winding_real));
  r.rounding_residual = std::abs(r.winding_real - r.winding);
  r.min_sigma = min_sigma;
  if (r.rounding_residual >= 0.05) {
    std::ostringstream msg;
    msg << "winding_multiplicity: winding " << r.winding_real << " does not round (residual " << r.rounding_residual
        << ")";
    throw NumericalFailure(msg.str());
  }
  return r;
}

cplx kdv_decay_root(cplx lam, double alpha_hat) {
  // Roots of mu^3 - 3 mu + 6 lam via the companion matrix.
  Eigen::Matrix3cd C;
  C << 0, 0, -6.0 * lam, 1, 0, 3.0, 0, 1, 0;
  const Eigen::Vector3cd mu = C.eigenvalues();
  int best = -1;
  int count = 0;
  for (int i = 0; i < 3; ++i) {
    // One Newton polish on the cubic.
    cplx z = mu[i];
    z -= (z * z * z - 3.0 * z + 6.0 * lam) / (3.0 * z * z - 3.0);
    if (z.real() < -alpha_hat) {
      ++count;
      if (best < 0 || z.real() < mu[best].real()) best = i;
    }
  }
  if (count != 1) {
    std::ostringstream msg;
    msg << "kdv_decay_root: " << count << " roots with Re mu < -alpha_hat at lambda = " << lam;
    throw std::domain_error(msg.str());
  }
  cplx z = mu[best];
  for (int it = 0; it < 3; ++it) z -= (z * z * z - 3.0 * z + 6.0 * lam) / (3.0 * z * z - 3.0);
  return z;
}

namespace {

// Truncated Taylor series c_0 + c_1 h + ... + c_4 h^4.
struct Jet {
  std::array<cplx, 5> c{};
  static Jet constant(cplx v) {
    Jet j;
    j.c[0] = v;
    return j;
  }
  static Jet variable(double x) {
    Jet j;
    j.c[0] = x;
    j.c[1] = 1.0;
    return j;
  }
};

Jet operator+(Jet a, const Jet& b) {
  for (int i = 0; i < 5; ++i) a.c[i] += b.c[i];
  return a;
}
Jet operator-(Jet a, const Jet& b) {
  for (int i = 0; i < 5; ++i) a.c[i] -= b.c[i];
  return a;
}
Jet operator*(cplx s, Jet a) {
  for (auto& v : a.c) v *= s;
  return a;
}
Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; i + j < 5; ++j) r.c[i + j] += a.c[i] * b.c[j];
  return r;
}
Jet exp(const Jet& a) {
  Jet b;
  b.c[0] = std::exp(a.c[0]);
  for (int k = 1; k < 5; ++k) {
    cplx s = 0.0;
    for (int j = 1; j <= k; ++j) s += static_cast<double>(j) * a.c[j] * b.c[k - j];
    b.c[k] = s / static_cast<double>(k);
  }
  return b;
}
Jet inverse(const Jet& a) {
  Jet b;
  b.c[0] = 1.0 / a.c[0];
  for (int k = 1; k < 5; ++k) {
    cplx s = 0.0;
    for (int j = 1; j <= k; ++j) s += a.c[j] * b.c[k - j];
    b.c[k] = -s * b.c[0];
  }
  return b;
}

}  // namespace

Eigen::MatrixXcd kdv_root_jets(cplx mu, const RVec& x) {
  Eigen::MatrixXcd out(5, x.size());
  const cplx s3mu = kSqrt3 + mu;
  const Jet one = Jet::constant(1.0);
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const Jet X = Jet::variable(x[j]);
    const double sg = x[j] >= 0.0 ? 1.0 : -1.0;
    // sech^2(sqrt3 x / 2) = 4E/(1+E)^2 with E = exp(-sg sqrt3 x) <= 1.
    const Jet E = exp(cplx(-sg * kSqrt3) * X);
    const Jet opE = one + E;
    const Jet sech2 = 4.0 * (E * inverse(opE * opE));
    // exp(sqrt3 x) sech^2(sqrt3 x / 2) = 4 / (1 + exp(-sqrt3 x))^2.
    const Jet F = one + exp(cplx(-kSqrt3) * X);
    const Jet esech2 = 4.0 * inverse(F * F);
    const Jet G = Jet::constant(s3mu * s3mu) - (kSqrt3 * s3mu) * sech2 - (kSqrt3 * mu) * esech2;
    const Jet g = exp(mu * X) * G;
    double fact = 1.0;
    for (int k = 0; k < 5; ++k) {
      if (k > 0) fact *= k;
      out(k, j) = fact * g.c[k];
    }
  }
  return out;
}

RootVectorReport kdv_root_vector(cplx lam, double alpha_hat, const Grid& scaled) {
  RootVectorReport r;
  r.mu = kdv_decay_root(lam, alpha_hat);
  const RVec x = scaled.nodes();
  const Eigen::MatrixXcd g = kdv_root_jets(r.mu, x);
  r.f = g.row(1).transpose();
  double num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double s = 1.0 / std::cosh(0.5 * kSqrt3 * x[j]);
    const double w = s * s, wp = -kSqrt3 * w * std::tanh(0.5 * kSqrt3 * x[j]);
    const cplx res = lam * g(1, j) - 0.5 * g(2, j) + g(4, j) / 6.0 + 1.5 * (wp * g(1, j) + w * g(2, j));
    const double wt = std::exp(alpha_hat * x[j]);
    num = std::max(num, wt * std::abs(res));
    den = std::max(den, wt * std::abs(g(1, j)));
  }
  r.residual = num / den;
  return r;
}

JordanChainReport kdv_jordan_chain(const Grid& g, double alpha_hat, bool with_winding) {
  JordanChainReport r;
  const RVec x = g.nodes();
  const int n = g.n();
  const RVec w = kdv_profile(g);
  r.f0.resize(n);
  r.f1.resize(n);
  for (int j = 0; j < n; ++j) {
    const double y = 0.5 * kSqrt3 * x[j];
    const double th = std::tanh(y);
    r.f0[j] = -kSqrt3 * w[j] * th;
    r.f1[j] = -2.0 * w[j] * (1.0 - y * th);
  }
  // (-D/2 + D^3/6) f1 + D(3/2 w f1) + f0, spectrally on the unweighted grid.
  const RVec lin = apply_real_symbol(g, r.f1, [](cplx xi) {
    const cplx d = I_unit * xi;
    return -0.5 * d + d * d * d / 6.0;
  });
  const RVec nl = spectral_derivative(g, RVec(1.5 * w.cwiseProduct(r.f1)));
  r.chain_residual = (lin + nl + r.f0).norm() / r.f0.norm();
  // d/db of the integral of phi_b^2 at b = 1 equals 2 * integral of w * d/db phi_b.
  r.obstruction = 2.0 * g.dx() * w.dot(RVec(-0.5 * r.f1));
  if (with_winding) {
    const ContourResult c = winding_multiplicity(Bundle::kdv(g, alpha_hat), circle_contour(0.0, 0.1), 8);
    r.winding_small_circle = c.winding;
  }
  return r;
}

}  // namespace wws
