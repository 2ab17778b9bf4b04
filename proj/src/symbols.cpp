#include "wws/symbols.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace wws {

namespace {
constexpr double kSeries = 1e-2;
}

cplx tanh_ratio(cplx xi) {
  if (std::abs(xi) < kSeries) {
    const cplx z2 = xi * xi;
    return 1.0 + z2 * (-1.0 / 3.0 + z2 * (2.0 / 15.0 + z2 * (-17.0 / 315.0 + z2 * (62.0 / 2835.0))));
  }
  return std::tanh(xi) / xi;
}

cplx one_minus_tanh_ratio(cplx xi) {
  if (std::abs(xi) < 0.1) {
    const cplx z2 = xi * xi;
    return z2 * (1.0 / 3.0 +
                 z2 * (-2.0 / 15.0 + z2 * (17.0 / 315.0 + z2 * (-62.0 / 2835.0 + z2 * (1382.0 / 155925.0)))));
  }
  return 1.0 - std::tanh(xi) / xi;
}

cplx S_sym(cplx xi, double gamma) {
  const cplx s = -I_unit * std::sqrt(gamma) * xi * std::sqrt(tanh_ratio(xi));
  return xi.imag() < 0.0 ? -s : s;
}

cplx Aplus(cplx xi, double gamma) { return I_unit * xi + S_sym(xi, gamma); }
cplx Aminus(cplx xi, double gamma) { return I_unit * xi - S_sym(xi, gamma); }

cplx SinvD(cplx xi, double gamma) {
  const cplx r = -1.0 / (std::sqrt(gamma) * std::sqrt(tanh_ratio(xi)));
  return xi.imag() < 0.0 ? -r : r;
}

cplx Hil(cplx xi) { return I_unit * std::tanh(xi); }

cplx DcothD(cplx xi) {
  if (std::abs(xi) < kSeries) {
    const cplx z2 = xi * xi;
    return 1.0 + z2 * (1.0 / 3.0 + z2 * (-1.0 / 45.0 + z2 * (2.0 / 945.0 + z2 * (-1.0 / 4725.0))));
  }
  return xi / std::tanh(xi);
}

cplx RiemannQ1(cplx xi) {
  if (std::abs(xi) < kSeries) {
    const cplx z2 = xi * xi;
    return I_unit * xi *
           (-1.0 / 3.0 + z2 * (1.0 / 45.0 + z2 * (-2.0 / 945.0 + z2 * (1.0 / 4725.0 + z2 * (-2.0 / 93555.0)))));
  }
  return I_unit * (1.0 / xi - 1.0 / std::tanh(xi));
}

cplx ProfileQ(cplx xi, double eps) {
  const double gamma = 1.0 - eps * eps;
  return eps * eps / (eps * eps + gamma * one_minus_tanh_ratio(eps * xi));
}

cplx ProfileQ0(cplx xi) { return 1.0 / (1.0 + xi * xi / 3.0); }

cplx ProfileQ1(cplx xi, double eps) { return ProfileQ(xi, eps) - ProfileQ0(xi); }

cplx m_eps(cplx lam_hat, cplx xi, double eps) {
  const double gamma = 1.0 - eps * eps;
  const double e3 = eps * eps * eps;
  return e3 * I_unit * xi / (-e3 * lam_hat + I_unit * eps * xi + S_sym(eps * xi, gamma));
}

cplx m0(cplx lam_hat, cplx xi) {
  return I_unit * xi / (-lam_hat + 0.5 * I_unit * xi + I_unit * xi * xi * xi / 6.0);
}

double gamma1(double eps) { return 2.0 / (1.0 + std::sqrt(1.0 - eps * eps)); }

namespace sym {
MultiplierSymbol identity() { return {"identity", [](cplx) { return cplx(1.0); }, Parity::Even}; }
MultiplierSymbol derivative() { return {"D", [](cplx xi) { return I_unit * xi; }, Parity::Odd}; }
MultiplierSymbol hilbert() { return {"Hil", [](cplx xi) { return Hil(xi); }, Parity::Odd}; }
MultiplierSymbol dcothd() { return {"DcothD", [](cplx xi) { return DcothD(xi); }, Parity::Even}; }
MultiplierSymbol riemann_q1() { return {"RiemannQ1", [](cplx xi) { return RiemannQ1(xi); }, Parity::Odd}; }
MultiplierSymbol tanh_ratio() { return {"tanh_ratio", [](cplx xi) { return wws::tanh_ratio(xi); }, Parity::Even}; }
MultiplierSymbol S(double gamma) {
  return {"S", [gamma](cplx xi) { return S_sym(xi, gamma); }, Parity::Odd};
}
MultiplierSymbol S_adjoint(double gamma) {
  return {"S_adjoint", [gamma](cplx xi) { return std::conj(S_sym(xi, gamma)); }, Parity::Odd};
}
MultiplierSymbol Aplus(double gamma) {
  return {"Aplus", [gamma](cplx xi) { return wws::Aplus(xi, gamma); }, Parity::Odd};
}
MultiplierSymbol Aminus(double gamma) {
  return {"Aminus", [gamma](cplx xi) { return wws::Aminus(xi, gamma); }, Parity::Odd};
}
MultiplierSymbol SinvD(double gamma) {
  return {"SinvD", [gamma](cplx xi) { return wws::SinvD(xi, gamma); }, Parity::Even};
}
MultiplierSymbol profile_Q(double eps) {
  return {"ProfileQ", [eps](cplx xi) { return ProfileQ(xi, eps); }, Parity::Even};
}
MultiplierSymbol profile_Q0() { return {"ProfileQ0", [](cplx xi) { return ProfileQ0(xi); }, Parity::Even}; }
}  // namespace sym

Dispersion dispersion(double k, double gamma_t) {
  if (!(gamma_t > 0.0 && gamma_t <= 1.0)) throw std::invalid_argument("dispersion: gamma must lie in (0, 1]");
  const double t = std::real(tanh_ratio(k));  // tanh k / k
  const double root = std::sqrt(gamma_t * t) * std::abs(k);
  // d/dk sqrt(g k tanh k) = g (tanh k + k sech^2 k) / (2 sqrt(g k tanh k)); at k = 0 the
  // one-sided limit is sign(k) sqrt(g).
  double droot;
  if (std::abs(k) < 1e-8) {
    droot = std::sqrt(gamma_t) * (k < 0 ? -1.0 : 1.0);
  } else {
    const double sech = 1.0 / std::cosh(k);
    droot = gamma_t * (std::tanh(k) + k * sech * sech) / (2.0 * root);
  }
  return {-k + root, -k - root, -1.0 + droot, -1.0 - droot};
}

SqrtHalfplane check_sqrt_halfplane(cplx z, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("check_sqrt_halfplane: a must be positive");
  const double lhs = std::sqrt(z).real();
  const double crit = 0.5 * (std::abs(z) + z.real());
  SqrtHalfplane r{lhs <= a, crit <= a * a, true};
  // Samples within rounding of the boundary are decided by the exact identity
  // (Re sqrt z)^2 = (|z| + Re z)/2 and count as consistent.
  const bool near_boundary = std::abs(lhs - a) <= 1e-12 * (1.0 + a) || std::abs(crit - a * a) <= 1e-12 * (1.0 + a * a);
  r.consistent = near_boundary || r.re_sqrt_le_a == r.criterion;
  return r;
}

double dispest_margin(double k, double a) {
  if (!(a > 0.0 && a < M_PI / 4.0)) throw std::domain_error("check_dispest: a must lie in (0, pi/4)");
  const cplx xi(k, a);
  const double re = std::sqrt(-xi * std::tanh(xi)).real();
  const double bound = a / std::sqrt(std::cos(2.0 * a)) * std::sqrt(std::real(wws::tanh_ratio(k)));
  if (!(re > 0.0)) return -1.0;
  return bound - re;
}

bool check_dispest(double k, double a) {
  const double m = dispest_margin(k, a);
  return m >= -1e-14 * (1.0 + a);
}

bool CDBsym::ok() const {
  const double tol = -1e-15;
  return margin_S >= tol && margin_Aplus >= tol && margin_resolvent >= tol && margin_tanh >= tol;
}

CDBsym check_cDBsym(double k, const WeightParams& w) {
  if (w.eps > 0.3) throw std::invalid_argument("check_cDBsym: eps <= 0.3 required");
  const double eps = w.eps, ah = w.alpha_hat, e3 = eps * eps * eps;
  const cplx xi(k, w.a);
  const double sq = std::sqrt(std::real(wws::tanh_ratio(k)));
  const cplx Ap = wws::Aplus(xi, w.gamma);
  CDBsym r{};
  r.margin_S = eps * ah * (1.0 - 0.25 * eps * eps) * sq - S_sym(xi, w.gamma).real();
  r.margin_Aplus = std::min(eps * ah * (-1.0 + (1.0 - 0.25 * eps * eps) * sq) - Ap.real(),
                            -0.25 * e3 * ah - eps * ah * (-1.0 + (1.0 - 0.25 * eps * eps) * sq));
  double worst = INFINITY;
  for (double re : {-ah * e3 / 6.0, 0.0, e3, 1.0})
    for (double dim : {0.0, 1e-3, -1e-3, 0.1})
      worst = std::min(worst, std::abs(cplx(re, Ap.imag() + dim) - Ap));
  r.margin_resolvent = worst - ah * e3 / 12.0;
  r.margin_tanh = 1.0 - std::abs(std::tanh(cplx(k, std::min(w.a, M_PI / 8.0 * 0.999))));
  return r;
}

double lowfreq_margin(double kappa) {
  return 1.0 - kappa * kappa / 9.0 - std::sqrt(std::real(wws::tanh_ratio(kappa)));
}

bool check_lowfreq_bound(double kappa) {
  if (std::abs(kappa) > kLowfreqWindow) throw std::domain_error("check_lowfreq_bound: |kappa| <= 1 required");
  return lowfreq_margin(kappa) >= -1e-15;
}

AplusExpansion expand_Aplus_scaled(cplx lam_hat, cplx xi, const WeightParams& w) {
  const double eps = w.eps, e3 = eps * eps * eps;
  if (std::abs(eps * xi) > 1.0) throw std::domain_error("expand_Aplus_scaled: |eps xi| <= 1 required");
  AplusExpansion r;
  r.exact = (-e3 * lam_hat + wws::Aplus(eps * xi, w.gamma)) / e3;
  r.truncated = -lam_hat + 0.5 * I_unit * xi * gamma1(eps) + I_unit * xi * xi * xi * w.gamma / 6.0;
  return r;
}

namespace {

// Evaluates margin(i) for i < count; a sample violates when its margin is below zero.
template <class F>
InequalityCheck sweep(std::string name, long count, bool parallel, F margin) {
  InequalityCheck c;
  c.name = std::move(name);
  c.samples = count;
  long bad = 0;
  double worst = INFINITY;
#pragma omp parallel for reduction(+ : bad) reduction(min : worst) if (parallel)
  for (long i = 0; i < count; ++i) {
    const double m = margin(i);
    if (m < 0.0) ++bad;
    worst = std::min(worst, m);
  }
  c.violations = bad;
  c.worst_margin = worst;
  return c;
}

std::string tag(const char* base, double eps, double ah) {
  std::ostringstream s;
  s << base << " eps=" << eps << " alpha_hat=" << ah;
  return s.str();
}

}  // namespace

std::vector<InequalityCheck> inequality_suite(const InequalitySuiteOptions& o) {
  std::vector<InequalityCheck> out;
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<cplx> z(o.sqrt_samples);
  std::vector<double> as(o.sqrt_samples);
  for (int i = 0; i < o.sqrt_samples; ++i) {
    z[i] = std::polar(100.0 * std::sqrt(U(rng)), 2.0 * M_PI * U(rng));
    as[i] = 3.0 * (1.0 - U(rng));
  }
  // Margin: distance of Re sqrt z from a, negated when the two forms disagree.
  out.push_back(sweep("sqrt half-plane equivalence", o.sqrt_samples, o.parallel, [&](long i) {
    const SqrtHalfplane r = check_sqrt_halfplane(z[i], as[i]);
    const double d = std::abs(std::sqrt(z[i]).real() - as[i]);
    return r.consistent ? d : -1.0 - d;
  }));

  const long nk = o.k_points;
  auto kgrid = [nk](long i) { return -50.0 + 100.0 * static_cast<double>(i) / static_cast<double>(nk - 1); };
  // The dispersion bound is an inequality in the exact sense; rounding slack matches check_dispest.
  auto dispest = [&](const std::string& name, double a) {
    out.push_back(sweep(name, nk, o.parallel, [&](long i) {
      const double m = dispest_margin(kgrid(i), a);
      return m >= -1e-14 * (1.0 + a) ? std::max(m, 0.0) : m;
    }));
  };
  for (double a : o.dispest_a) {
    std::ostringstream s;
    s << "weighted dispersion bound a=" << a;
    dispest(s.str(), a);
  }
  for (double e : o.eps_list)
    for (double ah : o.alpha_hat_list) {
      const WeightParams w = WeightParams::make(ah, e);
      dispest(tag("weighted dispersion bound", e, ah), w.a);
      out.push_back(sweep(tag("A+ and S real-part bounds", e, ah), nk, o.parallel, [&](long i) {
        const CDBsym r = check_cDBsym(kgrid(i), w);
        return r.ok() ? std::max(0.0, std::min(r.margin_S, r.margin_Aplus)) : std::min(r.margin_S, r.margin_Aplus);
      }));
      out.push_back(sweep(tag("A+ resolvent bound", e, ah), nk, o.parallel, [&](long i) {
        const CDBsym r = check_cDBsym(kgrid(i), w);
        return r.margin_resolvent >= -1e-15 ? std::max(0.0, r.margin_resolvent) : r.margin_resolvent;
      }));
      out.push_back(sweep(tag("|tanh| bound", e, ah), nk, o.parallel, [&](long i) {
        const double m = check_cDBsym(kgrid(i), w).margin_tanh;
        return m >= -1e-15 ? std::max(0.0, m) : m;
      }));
    }
  const long nl = o.lowfreq_points;
  out.push_back(sweep("low-frequency tanh bound", nl, o.parallel, [&](long i) {
    const double kappa = kLowfreqWindow * static_cast<double>(i + 1) / static_cast<double>(nl);
    return check_lowfreq_bound(kappa) ? std::max(0.0, lowfreq_margin(kappa)) : lowfreq_margin(kappa);
  }));
  return out;
}

}  // namespace wws
