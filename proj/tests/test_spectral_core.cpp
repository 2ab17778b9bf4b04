#include <cmath>
#include <random>

#include "doctest.h"
#include "wws/linalg.hpp"
#include "wws/pipeline.hpp"
#include "wws/symbols.hpp"

using namespace wws;

namespace {

CVec random_values(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  CVec v(n);
  for (auto& x : v) x = cplx(N(rng), N(rng));
  return v;
}

RVec sech2(const RVec& x) { return (1.0 / (0.5 * std::sqrt(3.0) * x.array()).cosh()).square(); }

}  // namespace

TEST_CASE("grid construction and layout") {
  CHECK_THROWS_AS(Grid(12, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(16, -1.0), std::invalid_argument);
  const Grid g(8, 2.0 * M_PI);
  CHECK(g.node(0) == doctest::Approx(-M_PI));
  CHECK(g.dx() == doctest::Approx(M_PI / 4));
  CHECK(g.mode(4) == 4);
  CHECK(g.mode(5) == -3);
  CHECK(g.wavenumber(3) == doctest::Approx(3.0));
}

TEST_CASE("transform round trip") {
  for (int n : {16, 256, 1024}) {
    const Grid g(n, 37.0);
    const CVec f = random_values(n, n);
    const CVec back = g.inverse(g.forward(f));
    CHECK((back - f).norm() <= 1e-13 * f.norm());
  }
}

TEST_CASE("Parseval convention: sum |f|^2 dx = (1/L) sum |c|^2") {
  const Grid g(64, 5.0);
  const CVec f = random_values(64, 3);
  const CVec c = g.forward(f);
  CHECK(f.squaredNorm() * g.dx() == doctest::Approx(c.squaredNorm() / g.period()).epsilon(1e-13));
}

TEST_CASE("weight parameters") {
  const WeightParams w = WeightParams::make(0.5, 0.1);
  CHECK(w.a == 0.5 * 0.1);
  CHECK(w.gamma == 1.0 - 0.1 * 0.1);
  CHECK_THROWS(WeightParams::make(0.6, 0.1));
  CHECK_THROWS(WeightParams::make(0.5, 0.0));
}

TEST_CASE("multiplier action on exponentials") {
  const Grid g(32, 2.0 * M_PI);
  const RVec x = g.nodes();
  const WeightParams w0 = WeightParams::make(0.0, 0.1);
  SUBCASE("identity") {
    const CVec v = random_values(32, 1);
    const SpectralField f = SpectralField::from_values(g, v);
    CHECK((apply_multiplier(sym::identity(), w0, f).values() - v).norm() < 1e-13);
  }
  SUBCASE("strip Hilbert transform") {
    const int k = 3;
    const CVec e = (I_unit * double(k) * x.array()).exp().matrix();
    const SpectralField h = apply_multiplier(sym::hilbert(), w0, SpectralField::from_values(g, e));
    CHECK((h.values() - I_unit * std::tanh(3.0) * e).norm() < 1e-12);
  }
  SUBCASE("D coth D on cos x") {
    const RVec c = x.array().cos();
    const SpectralField r = apply_multiplier(sym::dcothd(), w0, SpectralField::from_real(g, c));
    const double coth1 = std::cosh(1.0) / std::sinh(1.0);
    CHECK(coth1 == doctest::Approx(1.3130352854993313));
    CHECK((r.real_values() - coth1 * c).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("non-finite symbols are reported") {
  const Grid g(16, 2.0 * M_PI);
  const MultiplierSymbol bad{"one over xi", [](cplx xi) { return 1.0 / xi; }, Parity::Odd};
  const WeightParams w0 = WeightParams::make(0.0, 0.1);
  CHECK_THROWS(apply_multiplier(bad, w0, SpectralField::from_values(g, CVec::Ones(16))));
}

TEST_CASE("dealiased pointwise products") {
  const Grid g(32, 2.0 * M_PI);
  const RVec x = g.nodes();
  const RVec c = x.array().cos();
  SUBCASE("constant one") {
    const RVec f = (x.array().sin() + 0.3 * (2.0 * x.array()).cos()).matrix();
    const SpectralField r =
        multiply_pointwise(SpectralField::from_real(g, RVec::Ones(32)), SpectralField::from_real(g, f));
    CHECK((r.real_values() - f).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("product to sum") {
    const SpectralField r = multiply_pointwise(SpectralField::from_real(g, c), SpectralField::from_real(g, c));
    const RVec expect = 0.5 + 0.5 * (2.0 * x.array()).cos();
    CHECK((r.real_values() - expect).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("sech^4 at the origin") {
    const Grid G(512, 40.0);
    const RVec s = sech2(G.nodes());
    const SpectralField r = multiply_pointwise(SpectralField::from_real(G, s), SpectralField::from_real(G, s));
    CHECK(r.real_values()[256] == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("real fields are Hermitian symmetric") {
  const Grid g(64, 10.0);
  RVec v = random_values(64, 9).real();
  CHECK(SpectralField::from_real(g, v).hermitian_symmetric(10 * 2.2e-16));
  CHECK_FALSE(SpectralField::from_values(g, random_values(64, 9)).hermitian_symmetric(1e-8));
}

TEST_CASE("weighted norms") {
  const WeightParams w0 = WeightParams::make(0.0, 0.1);
  SUBCASE("zero and constant") {
    const Grid g(16, 2.0 * M_PI);
    CHECK(weighted_norm(SpectralField::from_values(g, CVec::Zero(16)), w0, 1.0) == 0.0);
    const SpectralField one = SpectralField::from_values(g, CVec::Ones(16));
    for (double s : {0.0, 1.0, 2.5}) CHECK(weighted_norm(one, w0, s) == doctest::Approx(std::sqrt(2.0 * M_PI)));
  }
  SUBCASE("sech^2 L2 norm against the closed-form integral") {
    const Grid g(512, 80.0);
    const double expect = std::sqrt(8.0 / (3.0 * std::sqrt(3.0)));
    CHECK(weighted_norm(SpectralField::from_real(g, sech2(g.nodes())), w0, 0.0) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("Parseval for the weighted inner product") {
    const Grid g(128, 40.0);
    const WeightParams w = WeightParams::make(0.5, 0.1);
    const SpectralField f = SpectralField::from_values(g, random_values(128, 4), w.a);
    const double n2 = std::pow(weighted_norm(f, w, 0.0), 2);
    CHECK(inner_product_a(f, f, w).real() == doctest::Approx(n2).epsilon(1e-12));
    CHECK(std::abs(inner_product_a(f, f, w).imag()) < 1e-12 * n2);
    const SpectralField h = SpectralField::from_values(g, random_values(128, 5), w.a);
    CHECK(std::abs(inner_product_a(f, h, w) - std::conj(inner_product_a(h, f, w))) < 1e-12 * n2);
  }
}

TEST_CASE("materialized operators") {
  SUBCASE("identity") {
    const Grid g(16, 3.0);
    const WeightParams w = WeightParams::make(0.5, 0.1);
    const CMat M = materialize(Pipeline{multiplier(sym::identity(), g, w)}, g);
    CHECK((M - CMat::Identity(16, 16)).norm() < 1e-14);
  }
  SUBCASE("D is skew-Hermitian unweighted and has norm max |k|") {
    const Grid g(8, 2.0 * M_PI);
    const WeightParams w0 = WeightParams::make(0.0, 0.1);
    const CMat M = materialize(Pipeline{multiplier(sym::derivative(), g, w0, Nyquist::Cosine)}, g);
    CHECK((M + M.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    const Grid g16(16, 2.0 * M_PI);
    const CMat M16 = materialize(Pipeline{multiplier(sym::derivative(), g16, w0)}, g16);
    CHECK(operator_norm(M16) == doctest::Approx(8.0).epsilon(1e-12));
  }
  SUBCASE("shifted derivative has eigenvalues i k_m - a") {
    const Grid g(16, 2.0 * M_PI);
    const WeightParams w = WeightParams::make(0.5, 0.2);
    const CMat M = materialize(Pipeline{multiplier(sym::derivative(), g, w)}, g);
    const CVec ev = eigenvalues(M);
    CVec expect(16);
    for (int i = 0; i < 16; ++i) expect[i] = I_unit * g.wavenumber(i) - w.a;
    CHECK(directed_hausdorff(ev, expect) < 1e-12);
    CHECK(directed_hausdorff(expect, ev) < 1e-12);
  }
  SUBCASE("pure multipliers are diagonal in the mode basis") {
    const Grid g(32, 12.0);
    const WeightParams w = WeightParams::make(0.5, 0.1);
    const CMat M = materialize(Pipeline{multiplier(sym::S(w.gamma), g, w)}, g);
    const CVec vals = symbol_values(sym::S(w.gamma), g, w.a);
    CMat F(32, 32);
    for (int j = 0; j < 32; ++j) F.col(j) = g.forward(CVec(CVec::Unit(32, j)));
    const CMat Dm = F * M * F.inverse();
    CHECK((Dm.diagonal() - vals).cwiseAbs().maxCoeff() < 1e-12 * vals.cwiseAbs().maxCoeff());
    CHECK((Dm - CMat(Dm.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-12 * vals.cwiseAbs().maxCoeff());
  }
  SUBCASE("pointwise stages act node-wise on band-limited fields") {
    // A pointwise stage carries no weight: exp(ax) g exp(-ax) = g.
    const Grid g(64, 2.0 * M_PI);
    const RVec x = g.nodes();
    const RVec v = 1.0 + 0.5 * x.array().cos();
    const CVec f = (I_unit * 3.0 * x.array()).exp().matrix();
    const CMat P = materialize(Pipeline{pointwise("g", g, v)}, g);
    CHECK((P * f - CVec(v.cast<cplx>().cwiseProduct(f))).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("matrix agrees with the pipeline on random fields") {
    const Grid g(64, 20.0);
    const WeightParams w = WeightParams::make(0.5, 0.1);
    const Pipeline p{pointwise("g", g, sech2(g.nodes())), multiplier(sym::S(w.gamma), g, w),
                     multiplier(sym::derivative(), g, w)};
    const CMat M = materialize(p, g);
    for (unsigned s = 0; s < 3; ++s) {
      const CVec f = random_values(64, 20 + s);
      const CVec a = apply(p, g, f);
      CHECK((M * f - a).norm() < 1e-10 * a.norm());
    }
  }
  SUBCASE("parallel and serial materialization agree bitwise") {
    const Grid g(128, 20.0);
    const WeightParams w = WeightParams::make(0.5, 0.1);
    const Pipeline p{pointwise("g", g, sech2(g.nodes())), multiplier(sym::SinvD(w.gamma), g, w)};
    CHECK(materialize(p, g) == materialize_serial(p, g));
  }
}

TEST_CASE("singular values and norms") {
  CHECK(operator_norm(CMat::Identity(5, 5)) == doctest::Approx(1.0));
  CHECK(smallest_singular(CMat::Identity(5, 5)) == doctest::Approx(1.0));
  CMat D = CMat::Zero(2, 2);
  D(0, 0) = 2.0;
  D(1, 1) = 3.0;
  CHECK(operator_norm(D) == doctest::Approx(3.0));
  CHECK(smallest_singular(D) == doctest::Approx(2.0));
  CHECK_THROWS(operator_norm(CMat::Zero(2, 3)));
}

TEST_CASE("log determinant") {
  CMat A = CMat::Identity(3, 3);
  A(0, 0) = -2.0;
  A(1, 1) = I_unit;
  const LogDet ld = log_det(A);
  CHECK(ld.log_abs == doctest::Approx(std::log(2.0)));
  CHECK(std::abs(std::remainder(ld.arg - 1.5 * M_PI, 2.0 * M_PI)) < 1e-14);
}

TEST_CASE("spectral derivative and antiderivative") {
  const Grid g(64, 2.0 * M_PI);
  const RVec x = g.nodes();
  const RVec f = (3.0 * x.array()).sin();
  CHECK((spectral_derivative(g, f) - RVec(3.0 * (3.0 * x.array()).cos())).cwiseAbs().maxCoeff() < 1e-12);
  double mean = 0.0;
  const RVec F = spectral_antiderivative(g, RVec(f.array() + 2.0), &mean);
  CHECK(mean == doctest::Approx(2.0));
  CHECK((F - RVec(-(3.0 * x.array()).cos() / 3.0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trigonometric interpolation") {
  const Grid g(64, 2.0 * M_PI);
  const RVec f = (2.0 * g.nodes().array()).cos();
  RVec pts(3);
  pts << 0.1, -1.3, 2.9;
  const RVec v = trig_interpolate(g, f, pts);
  for (int i = 0; i < 3; ++i) CHECK(v[i] == doctest::Approx(std::cos(2.0 * pts[i])).epsilon(1e-13));
  CHECK((interpolation_matrix(g, pts) * f - v).cwiseAbs().maxCoeff() < 1e-13);
}
