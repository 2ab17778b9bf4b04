#include <cmath>
#include <random>

#include "doctest.h"
#include "wws/symbols.hpp"

using namespace wws;

namespace {

// Independent evaluation: the principal root off the real axis, the limit from above on it.
cplx S_closed(cplx xi, double g) {
  if (xi.imag() == 0.0) return cplx(0.0, -1.0) * std::sqrt(g * xi.real() * std::tanh(xi.real()));
  return std::sqrt(-g * xi * std::tanh(xi));
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

std::vector<cplx> sample_points(unsigned seed, int count, double kmax, double amax) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> K(-kmax, kmax), A(-amax, amax);
  std::vector<cplx> pts(count);
  for (auto& p : pts) p = cplx(K(rng), A(rng));
  return pts;
}

}  // namespace

TEST_CASE("catalog against closed forms") {
  const double g = 0.99;
  for (cplx xi : sample_points(1, 200, 20.0, 0.7)) {
    if (std::abs(xi) < 0.05) continue;
    CHECK(rel(tanh_ratio(xi), std::tanh(xi) / xi) < 1e-13);
    CHECK(rel(Hil(xi), I_unit * std::tanh(xi)) < 1e-13);
    CHECK(rel(DcothD(xi), xi / std::tanh(xi)) < 1e-13);
    CHECK(rel(RiemannQ1(xi), I_unit * (1.0 / xi - 1.0 / std::tanh(xi))) < 1e-12);
    CHECK(rel(S_sym(xi, g), S_closed(xi, g)) < 1e-13);
    CHECK(rel(Aplus(xi, g), I_unit * xi + S_sym(xi, g)) < 1e-14);
    CHECK(rel(Aminus(xi, g), I_unit * xi - S_sym(xi, g)) < 1e-14);
    CHECK(rel(ProfileQ0(xi), 1.0 / (1.0 + xi * xi / 3.0)) < 1e-15);
    const double eps = 0.1;
    CHECK(rel(ProfileQ(xi, eps), eps * eps / (1.0 - (1.0 - eps * eps) * std::tanh(eps * xi) / (eps * xi))) < 1e-10);
    const cplx lam(0.3, -0.2);
    const cplx d = I_unit * xi;
    CHECK(rel(m0(lam, xi), d / (-lam + 0.5 * d + I_unit * xi * xi * xi / 6.0)) < 1e-14);
    const double e3 = eps * eps * eps;
    const cplx me = e3 * d / (-e3 * lam + I_unit * eps * xi + S_closed(eps * xi, 1.0 - eps * eps));
    CHECK(rel(m_eps(lam, xi, eps), me) < 1e-9);
  }
}

TEST_CASE("S branch: nonnegative real part, squares back, real-preserving") {
  for (double g : {1.0, 0.99, 0.75}) {
    for (cplx xi : sample_points(2, 500, 30.0, 0.75)) {
      const cplx s = S_sym(xi, g);
      CHECK(s.real() >= -1e-15 * std::abs(s));
      CHECK(std::abs(s * s + g * xi * std::tanh(xi)) <= 1e-13 * (1.0 + std::norm(xi)));
      CHECK(rel(S_sym(-std::conj(xi), g), std::conj(s)) < 1e-14);
    }
    // Odd on the real axis.
    for (double k = -30.0; k <= 30.0; k += 0.37) CHECK(rel(S_sym(-k, g), -S_sym(k, g)) < 1e-14);
  }
}

TEST_CASE("SinvD times S is i xi and SinvD(0) = -1/sqrt(gamma)") {
  const double g = 0.96;
  CHECK(rel(SinvD(0.0, g), cplx(-1.0 / std::sqrt(g))) < 1e-15);
  for (cplx xi : sample_points(3, 300, 10.0, 0.7)) CHECK(rel(SinvD(xi, g) * S_sym(xi, g), I_unit * xi) < 1e-13);
}

TEST_CASE("series branches are continuous at the switchover radius") {
  const double g = 0.99;
  for (double th = 0.1; th < 2.0 * M_PI; th += 0.7) {
    const cplx in = std::polar(1e-2 * (1.0 - 1e-14), th), out = std::polar(1e-2 * (1.0 + 1e-14), th);
    CHECK(rel(tanh_ratio(in), tanh_ratio(out)) < 1e-14);
    CHECK(rel(SinvD(in, g), SinvD(out, g)) < 1e-14);
    // The direct form cancels 1/xi against coth xi: about 1e-16 / xi^2 relative.
    CHECK(rel(RiemannQ1(in), RiemannQ1(out)) < 1e-11);
    CHECK(rel(DcothD(in), DcothD(out)) < 1e-14);
    // 1 - tanh(xi)/xi switches at 0.1, where the direct form has lost only two digits.
    const cplx in1 = std::polar(0.1 * (1.0 - 1e-14), th), out1 = std::polar(0.1 * (1.0 + 1e-14), th);
    CHECK(rel(one_minus_tanh_ratio(in1), one_minus_tanh_ratio(out1)) < 5e-12);
  }
}

TEST_CASE("gamma1 stable form") {
  for (double e : {1e-6, 0.05, 0.1, 0.2}) {
    const double direct = 2.0 / (e * e) * (1.0 - std::sqrt(1.0 - e * e));
    CHECK(gamma1(e) == doctest::Approx(2.0 / (1.0 + std::sqrt(1.0 - e * e))).epsilon(1e-15));
    if (e > 1e-3) CHECK(gamma1(e) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("dispersion relation") {
  const Dispersion z = dispersion(0.0, 0.99);
  CHECK(z.plus == 0.0);
  CHECK(z.minus == 0.0);
  const Dispersion d = dispersion(1.0, 0.99);
  const double r = std::sqrt(0.99 * std::tanh(1.0));
  CHECK(r == doctest::Approx(0.868319).epsilon(1e-6));
  CHECK(d.plus == doctest::Approx(-1.0 + r));
  CHECK(d.minus == doctest::Approx(-1.0 - r));
  // Group velocities are negative for gamma_t < 1, and match finite differences.
  for (double k = -20.0; k <= 20.0; k += 0.01) {
    const Dispersion e = dispersion(k, 0.99);
    CHECK(e.dplus < 0.0);
    CHECK(e.dminus < 0.0);
  }
  const double h = 1e-6;
  CHECK(d.dplus == doctest::Approx((dispersion(1.0 + h, 0.99).plus - dispersion(1.0 - h, 0.99).plus) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("square-root half-plane criterion") {
  const SqrtHalfplane b = check_sqrt_halfplane(4.0, 2.0);
  CHECK(b.consistent);
  CHECK(b.re_sqrt_le_a);
  CHECK(check_sqrt_halfplane(-1.0, 0.3).re_sqrt_le_a);
  CHECK(check_sqrt_halfplane(-1.0, 0.3).criterion);
  CHECK_FALSE(check_sqrt_halfplane(9.0, 2.0).re_sqrt_le_a);
  CHECK_THROWS(check_sqrt_halfplane(1.0, 0.0));
}

TEST_CASE("weighted dispersion bound") {
  // k = 0: Re sqrt(a tan a) against a / sqrt(cos 2a).
  for (double a : {0.05, 0.2, 0.5, 0.7}) {
    const double lhs = std::sqrt(a * std::tan(a)), rhs = a / std::sqrt(std::cos(2.0 * a));
    CHECK(dispest_margin(0.0, a) == doctest::Approx(rhs - lhs).epsilon(1e-12));
    CHECK(check_dispest(0.0, a));
  }
  CHECK(check_dispest(10.0, 0.1));
  CHECK_THROWS(dispest_margin(1.0, 0.8));
  CHECK_THROWS(dispest_margin(1.0, 0.0));
}

TEST_CASE("A+ real-part bound at k = 0") {
  const WeightParams w = WeightParams::make(0.5, 0.1);
  const cplx ap = Aplus(cplx(0.0, w.a), w.gamma);
  const double expect = -w.a + std::sqrt(w.gamma * w.a * std::tan(w.a));
  CHECK(ap.real() == doctest::Approx(expect).epsilon(1e-12));
  // -a (1 - sqrt(gamma)) ~ -alpha_hat eps^3 / 2 to leading order.
  CHECK(ap.real() == doctest::Approx(-0.5 * w.alpha_hat * std::pow(w.eps, 3)).epsilon(0.02));
  CHECK(ap.real() <= -0.25 * std::pow(w.eps, 3) * w.alpha_hat);
  CHECK(check_cDBsym(0.0, w).ok());
  CHECK_THROWS(check_cDBsym(0.0, WeightParams::make(0.5, 0.4)));
}

TEST_CASE("low-frequency tanh bound") {
  CHECK(lowfreq_margin(1e-4) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(std::sqrt(std::tanh(0.5) / 0.5) == doctest::Approx(0.961371).epsilon(1e-6));
  CHECK(1.0 - 0.25 / 9.0 == doctest::Approx(0.9722).epsilon(1e-4));
  CHECK(check_lowfreq_bound(0.5));
  CHECK_THROWS(check_lowfreq_bound(1.5));
}

TEST_CASE("inequality suite has no violations") {
  for (const auto& c : inequality_suite()) {
    INFO(c.name);
    CHECK(c.samples > 0);
    CHECK(c.violations == 0);
  }
}

TEST_CASE("cubic expansion of the scaled A+ symbol") {
  const WeightParams w = WeightParams::make(0.5, 0.1);
  const cplx lam(0.4, 0.1);
  const AplusExpansion z = expand_Aplus_scaled(lam, 0.0, w);
  CHECK(std::abs(z.exact + lam) < 1e-10);
  CHECK(std::abs(z.truncated + lam) < 1e-15);
  const AplusExpansion ia = expand_Aplus_scaled(0.4, cplx(0.0, 0.5), w);
  const double expect = -0.4 - 0.5 * 0.5 * gamma1(w.eps) + std::pow(0.5, 3) / 6.0 * w.gamma;
  CHECK(ia.truncated.real() == doctest::Approx(expect).epsilon(1e-14));
  // Halving eps at fixed xi divides the truncation error by about four.
  const cplx xi(1.0, 0.5);
  auto err = [&](double e) {
    const AplusExpansion x = expand_Aplus_scaled(lam, xi, WeightParams::make(0.5, e));
    return std::abs(x.exact - x.truncated);
  };
  const double ratio = err(0.1) / err(0.05);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
  CHECK(err(0.1) <= 1.0 * std::pow(std::abs(xi), 5) * 0.01);
  CHECK_THROWS(expand_Aplus_scaled(lam, 20.0, w));
}

TEST_CASE("bounds on the scaled resolvent symbols") {
  const double ah = 0.5;
  // Samples of the half-disc {|lam| <= 2, Re lam >= -ah/6}.
  std::vector<cplx> lams;
  for (double r : {0.0, 0.5, 1.0, 2.0})
    for (double th = -M_PI; th < M_PI; th += M_PI / 12) {
      const cplx l = std::polar(r, th);
      if (l.real() >= -ah / 6.0) lams.push_back(l);
    }
  for (double y = -1.9; y <= 1.9; y += 0.1) lams.push_back(cplx(-ah / 6.0, y));

  double m0_ratio = 0.0;
  for (double k = -50.0; k <= 50.0; k += 0.01) {
    const cplx xi(k, ah);
    for (cplx l : lams) m0_ratio = std::max(m0_ratio, std::abs(m0(l, xi)) * ah * std::abs(xi) / 6.0);
  }
  CHECK(m0_ratio <= 1.0);

  // Low-frequency window |eps xi| <= eps^0.4: sup |m_eps - m0| / eps^0.8 stays stable.
  auto K_hat = [&](double e) {
    double worst = 0.0;
    const double kmax = std::pow(e, 0.4) / e;
    for (double k = -kmax; k <= kmax; k += kmax / 2000.0) {
      const cplx xi(k, ah);
      if (std::abs(e * xi) > std::pow(e, 0.4)) continue;
      for (cplx l : lams) worst = std::max(worst, std::abs(m_eps(l, xi, e) - m0(l, xi)));
    }
    return worst / std::pow(e, 0.8);
  };
  const double K1 = K_hat(0.1), K2 = K_hat(0.05);
  MESSAGE("fitted low-frequency constants " << K1 << " (eps 0.1), " << K2 << " (eps 0.05)");
  CHECK(K2 <= 2.0 * K1);

  // High frequencies |eps xi| >= 4: |m_eps| <= 2 eps^2.
  for (double e : {0.05, 0.1, 0.2}) {
    double worst = 0.0;
    for (double k = 4.0 / e; k <= 400.0 / e; k += 0.05 / e)
      for (double s : {-1.0, 1.0})
        for (cplx l : lams) worst = std::max(worst, std::abs(m_eps(l, cplx(s * k, ah), e)));
    CHECK(worst <= 2.0 * e * e);
  }
}

TEST_CASE("serial and parallel suites agree") {
  InequalitySuiteOptions o;
  o.k_points = 20000;
  const auto par = inequality_suite(o);
  o.parallel = false;
  const auto ser = inequality_suite(o);
  REQUIRE(par.size() == ser.size());
  for (size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].violations == ser[i].violations);
    CHECK(par[i].worst_margin == ser[i].worst_margin);
  }
}
