#include <cmath>
#include <map>
#include <memory>

#include "doctest.h"
#include "wws/modes.hpp"
#include "wws/symbols.hpp"

using namespace wws;

namespace {

const double kAlpha = 0.5;
const double kNuHat = 0.75;

struct Wave {
  WaveProfile profile;
  CoefficientSet coeffs;
  WeightParams w;
  LinearizedOperator op;
};

// Cached by (eps, n, weighted).
const Wave& wave(double eps, int n = 256, bool weighted = true) {
  static std::map<std::tuple<double, int, bool>, std::unique_ptr<Wave>> cache;
  auto key = std::make_tuple(eps, n, weighted);
  auto it = cache.find(key);
  if (it == cache.end()) {
    WaveProfile p = solve_profile(eps, kAlpha, Grid(n, 40.0));
    CoefficientSet c = coefficients(p);
    WeightParams w = WeightParams::make(kAlpha, eps);
    if (!weighted) w.a = 0.0;
    LinearizedOperator op = assemble_A(p, c, w);
    it = cache.emplace(key, std::make_unique<Wave>(Wave{p, c, w, op})).first;
  }
  return *it->second;
}

struct Flat {
  WaveProfile profile;
  CoefficientSet coeffs;
  WeightParams w;
  LinearizedOperator op;
};

const Flat& flat() {
  static const Flat f = [] {
    WaveProfile p = flat_profile(0.1, kAlpha, Grid(128, 40.0));
    CoefficientSet c = coefficients(p);
    WeightParams w = WeightParams::make(kAlpha, 0.1);
    LinearizedOperator op = assemble_A(p, c, w);
    return Flat{p, c, w, op};
  }();
  return f;
}

double hausdorff(const CVec& a, const CVec& b) { return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a)); }

CVec concat(const CVec& a, const CVec& b) {
  CVec c(a.size() + b.size());
  c << a, b;
  return c;
}

CVec random_pair(const Grid& g, unsigned long seed) {
  return concat(random_smooth_field(g, seed, 1.0), random_smooth_field(g, seed + 1, 1.0));
}

}  // namespace

TEST_CASE("flat water degenerates to Fourier multipliers") {
  const Flat& f = flat();
  const LinearizedOperator& op = f.op;
  CHECK(operator_norm(op.A11 - op.Aplus) < 1e-12);
  CHECK(operator_norm(op.A22 - op.Aminus) < 1e-12);
  CHECK(op.junk_norm_sum() < 1e-12);
  const CVec ev = eigenvalues(op.A);
  CHECK(ev.size() == 2 * op.n());
  const CVec curves = concat(op.aplus_modes, op.aminus_modes);
  CHECK(hausdorff(ev, curves) < 1e-10);
  CHECK(ev.real().maxCoeff() <= -0.25 * kAlpha * 1e-3);
}

TEST_CASE("the two expressions for A11 and the diagonalizing change agree") {
  const Wave& wv = wave(0.1);
  const LinearizedOperator& op = wv.op;
  CHECK(filtered_norm(op.A11 - op.A11b, op.grid) < 1e-9);
  const CMat TA = to_diagonalized_variables(assemble_A3(wv.coeffs, op.grid, wv.w));
  CHECK(filtered_norm(op.A - TA, op.grid) < 1e-9);
}

TEST_CASE("symmetrization identity D p = sqrt p D sqrt p + p'/2") {
  const Wave& wv = wave(0.1);
  const Grid& g = wv.op.grid;
  const RVec dp = spectral_derivative(g, wv.coeffs.p);
  const Stage D = op_multiplier(sym::derivative(), g, wv.w);
  const CMat lhs = materialize(Pipeline{op_pointwise("p", g, wv.coeffs.p), D}, g);
  const CMat rhs = materialize(std::vector<Term>{
      {1.0, {op_pointwise("sp", g, wv.coeffs.sqrt_p), D, op_pointwise("sp", g, wv.coeffs.sqrt_p)}},
      {0.5, {op_pointwise("dp", g, dp)}}}, g);
  CHECK(filtered_norm(lhs - rhs, g) < 1e-9);
}

TEST_CASE("junk blocks and the commutator scale like eps cubed") {
  std::vector<double> junk, comm;
  for (double e : {0.2, 0.1, 0.05}) {
    const Wave& wv = wave(e);
    junk.push_back(wv.op.junk_norm_sum() / (e * e * e));
    comm.push_back(commutator_norm_SinvD(wv.coeffs.u_rho, wv.op.grid, wv.w) / (e * e * e));
  }
  MESSAGE("junk / eps^3: " << junk[0] << " " << junk[1] << " " << junk[2]);
  MESSAGE("commutator / eps^3: " << comm[0] << " " << comm[1] << " " << comm[2]);
  for (int j = 0; j < 2; ++j) {
    CHECK(junk[j + 1] / junk[j] == doctest::Approx(1.0).epsilon(0.25));
    CHECK(comm[j + 1] / comm[j] >= 0.5);
    CHECK(comm[j + 1] / comm[j] <= 2.0);
  }
}

TEST_CASE("commutator bound for the coefficient deviations") {
  const Wave& wv = wave(0.1);
  for (const RVec* g : {&wv.coeffs.u_p, &wv.coeffs.u_q, &wv.coeffs.u_rho}) {
    const CommutatorBound b = commutator_bound(*g, wv.op.grid, wv.w);
    CHECK(b.measured > 0.0);
    CHECK(b.holds());
  }
}

TEST_CASE("physical-variable operator") {
  SUBCASE("flat water dispersion") {
    const WaveProfile p = flat_profile(0.1, kAlpha, Grid(128, 40.0));
    const CMat Ae = assemble_A_eta_physical(p);
    const Grid g = physical_grid(p);
    // The Nyquist mode is left out: its derivative convention differs between the two grids.
    // The zero mode is a 2x2 Jordan block, so its eigenvalues split by about sqrt(machine eps).
    CVec curves(2 * g.n() - 2);
    int c = 0;
    for (int i = 0; i < g.n(); ++i) {
      if (g.is_nyquist(i)) continue;
      const Dispersion d = dispersion(g.wavenumber(i), p.gamma);
      curves[c++] = cplx(0.0, d.plus);
      curves[c++] = cplx(0.0, d.minus);
    }
    const CVec ev = eigenvalues(Ae);
    CHECK(directed_hausdorff(curves, ev) < 1e-7);
    int matched = 0;
    for (int i = 0; i < ev.size(); ++i) matched += (curves.array() - ev[i]).abs().minCoeff() < 1e-7;
    CHECK(matched >= 2 * g.n() - 2);
  }
  SUBCASE("translation mode is in the kernel") {
    const WaveProfile& p = wave(0.1).profile;
    const CVec z1 = physical_translation_mode(p);
    CHECK((assemble_A_eta_physical(p) * z1).norm() / z1.norm() < 1e-8);
  }
}

TEST_CASE("Fourier filters") {
  const Wave& wv = wave(0.1);
  const Grid& g = wv.op.grid;
  const FourierFilters f = fourier_filters(g, 0.1, kNuHat);
  const CMat I = CMat::Identity(g.n(), g.n());
  CHECK((f.Pi_o + f.Pi_i - I).cwiseAbs().maxCoeff() == 0.0);
  CHECK(operator_norm(f.Pi_o * f.Pi_o - f.Pi_o) < 1e-12);
  CHECK(operator_norm(f.Pi_i * f.Pi_i - f.Pi_i) < 1e-12);
  CHECK(operator_norm(f.Pi_o * f.Pi_i) < 1e-12);

  // A plane wave below the threshold passes unchanged.
  const int m = 3;
  REQUIRE(2 * M_PI * m / g.period() < f.kappa_hat);
  CVec e(g.n());
  const RVec x = g.nodes();
  for (int j = 0; j < g.n(); ++j) e[j] = std::exp(cplx(0.0, 2 * M_PI * m * x[j] / g.period()));
  CHECK((f.Pi_o * e - e).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((f.Pi_i * e).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(fourier_filters(Grid(16, 40.0), 0.1, kNuHat), std::invalid_argument);

  std::vector<double> ratio;
  for (double eps : {0.2, 0.1, 0.05}) {
    const Wave& we = wave(eps);
    const FourierFilters fe = fourier_filters(we.op.grid, eps, kNuHat);
    const CMat S = materialize(Pipeline{op_multiplier(sym::S(we.w.gamma), we.op.grid, we.w)}, we.op.grid);
    ratio.push_back(operator_norm(fe.Pi_o * S) / std::pow(eps, kNuHat));
  }
  MESSAGE("||pi_o S|| / eps^nu: " << ratio[0] << " " << ratio[1] << " " << ratio[2]);
  for (double r : ratio) CHECK(r <= 1.5);
}

TEST_CASE("resolvent norms") {
  SUBCASE("flat water: inverse distance to the symbol values") {
    const LinearizedOperator& op = flat().op;
    for (cplx lam : {cplx(0.01, 0.3), cplx(-0.001, -1.2), cplx(0.5, 0.0)}) {
      const double dist = (op.aplus_modes.array() - lam).abs().minCoeff();
      CHECK(resolvent_norm(op.Aplus, lam) == doctest::Approx(1.0 / dist).epsilon(1e-10));
    }
  }
  SUBCASE("throws at an eigenvalue") {
    const LinearizedOperator& op = flat().op;
    CHECK_THROWS_AS(resolvent_norm(op.Aplus, op.aplus_modes[3]), NumericalFailure);
  }
  SUBCASE("lower block on an arc") {
    std::vector<double> sup;
    for (double eps : {0.2, 0.1}) {
      const Wave& wv = wave(eps);
      double s = 0.0;
      for (int j = 0; j < 20; ++j) {
        const double th = -M_PI / 2 + M_PI * (j + 0.5) / 20;
        const cplx lam = -0.5 * eps * kAlpha + 0.5 * std::polar(1.0, th);
        s = std::max(s, resolvent_norm(wv.op.A22, lam) * eps * kAlpha);
      }
      sup.push_back(s);
    }
    MESSAGE("sup eps alpha ||(lam - A22)^-1||: " << sup[0] << " " << sup[1]);
    CHECK(sup[0] <= 2.0);
    CHECK(sup[1] <= 2.0);
  }
  SUBCASE("full operator away from the origin") {
    std::vector<double> sup;
    for (double eps : {0.2, 0.1}) {
      const Wave& wv = wave(eps);
      const double re = -kAlpha * eps * eps * eps / 6, r = std::sqrt(eps);
      double s = 0.0;
      for (int j = 0; j < 24; ++j) {
        const double t = -1.0 + 2.0 * j / 23;
        const cplx lam = j % 2 ? cplx(re, std::copysign(r + 2 * std::abs(t), t)) : std::polar(r, t * M_PI / 2);
        s = std::max(s, resolvent_norm(wv.op.A, lam) * std::pow(eps, 1 + 2 * kNuHat));
      }
      sup.push_back(s);
    }
    MESSAGE("sup eps^(1+2nu) ||(lam - A)^-1||: " << sup[0] << " " << sup[1]);
    CHECK(sup[1] / sup[0] <= 3.0);
    CHECK(sup[0] / sup[1] <= 3.0);
  }
}

TEST_CASE("spectrum and the projection onto the neutral modes") {
  SUBCASE("flat water") {
    const Flat& f = flat();
    const CVec ev = eigenvalues(f.op.A);
    const SpectrumReport r = classify_spectrum(ev, f.op.grid, f.w);
    CHECK(r.eigenvalues.size() == 2 * f.op.n());
    CHECK(r.near_zero.size() + r.essential_band.size() + r.other.size() == r.eigenvalues.size());
    CHECK(r.gap_count == 0);
    const SpectralProjection pr = spectral_projection(f.op.A, 0.0, kAlpha * 1e-4, 64, &ev);
    CHECK(pr.rank == 0);
  }
  SUBCASE("solitary wave") {
    const Wave& wv = wave(0.1, 512);
    const CVec ev = eigenvalues(wv.op.A);
    const SpectrumReport r = classify_spectrum(ev, wv.op.grid, wv.w);
    CHECK(r.near_zero.size() + r.essential_band.size() + r.other.size() == r.eigenvalues.size());
    CHECK(r.gap_count == 2);
    CHECK(r.near_zero.size() == 2);
    const SpectralProjection pr = spectral_projection(wv.op.A, 0.0, kAlpha * 1e-4, 64, &ev);
    CHECK(pr.rank == 2);
    CHECK(pr.idempotency_error < 1e-8);
    CHECK_THROWS_AS(spectral_projection(wv.op.A, 0.0, std::abs(r.near_zero[0]), 64, &ev), InvariantViolation);

    const ModePair m = neutral_modes(wv.profile, wv.op);
    CHECK(m.residual_z < 1e-7);
    CHECK(m.residual_y < 1e-5);
    CHECK(m.pairing_cond < 10.0);
    const double dx = wv.op.grid.dx();
    const CVec z = random_pair(wv.op.grid, 5);
    const CVec pz = symplectic_project(z, m, dx);
    CHECK(std::abs(pairing(pz, m.z4_star, dx)) < 1e-8 * z.norm() * m.z4_star.norm() * dx);
    CHECK(std::abs(pairing(pz, m.y4_star, dx)) < 1e-8 * z.norm() * m.y4_star.norm() * dx);
    CHECK((symplectic_project(pz, m, dx) - pz).norm() < 1e-8 * pz.norm());
    CHECK(symplectic_project(m.z4, m, dx).norm() < 1e-6 * m.z4.norm());
    CHECK((z - pr.P0 * z - pz).norm() < 1e-6 * z.norm());
    for (unsigned long seed : {1ul, 2ul}) {
      const PhysicalPairing pp = physical_pairing_check(wv.profile, m, wv.w, seed);
      CHECK(std::abs(pp.transformed - pp.physical) < 1e-8 * std::max(1.0, std::abs(pp.physical)));
    }
  }
}

TEST_CASE("flat water has no neutral modes") {
  const Flat& f = flat();
  const ModePair m = neutral_modes(f.profile, f.op);
  CHECK(m.z4.norm() == 0.0);
}

TEST_CASE("unweighted spectrum") {
  const Wave& wv = wave(0.1, 256, false);
  const EigenPairs ep = eigen_pairs(wv.op.A);
  CHECK(ep.values.cwiseAbs().maxCoeff() > 0.0);
  CHECK(ep.values.real().cwiseAbs().maxCoeff() < 1e-7);
  // Space reversal combined with the sign change of the first component maps A to -A.
  const CMat R = reversal(wv.op.grid, 2);
  CHECK(operator_norm(R * wv.op.A * R + wv.op.A) < 1e-9 * operator_norm(wv.op.A));
  CHECK(hausdorff(eigenvalues(R * wv.op.A * R), -ep.values) < 1e-8);

  // Resolved eigenvalues agree with those of the physical-variable operator.
  const CMat Ae = assemble_A_eta_physical(wv.profile);
  const EigenPairs epe = eigen_pairs(Ae);
  const CVec ra = resolved_eigenvalues(ep, wv.op.grid, 2);
  const CVec re = resolved_eigenvalues(epe, physical_grid(wv.profile), 2);
  CHECK(ra.size() > 0);
  CHECK(re.size() > 0);
  CHECK(directed_hausdorff(ra, epe.values) < 1e-6);
  CHECK(directed_hausdorff(re, ep.values) < 1e-6);
}

TEST_CASE("J L factorization at a = 0") {
  const Wave& wv = wave(0.1, 256, false);
  const SymplecticFactors f = jl_factors(wv.coeffs, wv.op.grid, wv.w);
  const CMat A3 = assemble_A3(wv.coeffs, wv.op.grid, wv.w);
  CHECK(filtered_norm(f.J * f.L - A3, wv.op.grid) < 1e-9);
}

// Off the real axis conj S(k + ia) = S(k - ia), so in the unweighted pairing the adjoint of
// a factor at weight a is the factor at weight -a.
TEST_CASE("weighted adjoints are the factors at the opposite weight") {
  const Wave& wv = wave(0.1);
  WeightParams wm = wv.w;
  wm.a = -wv.w.a;
  const SymplecticFactors fp = jl_factors(wv.coeffs, wv.op.grid, wv.w);
  const SymplecticFactors fm = jl_factors(wv.coeffs, wv.op.grid, wm);
  CHECK(filtered_norm(fp.J.adjoint() + fm.J, wv.op.grid) < 1e-9 * operator_norm(fp.J));
  CHECK(filtered_norm(fp.L.adjoint() - fm.L, wv.op.grid) < 1e-9 * operator_norm(fp.L));
}

TEST_CASE("quadratic-form lower bounds") {
  for (double eps : {0.1, 0.05}) {
    const Wave& wv = wave(eps);
    const EnergyReport r = energy_estimate_checks(wv.coeffs, wv.op.grid, wv.w, kNuHat, 200, 7);
    MESSAGE("eps " << eps << ": pdp " << r.pdp_min_ratio << " qsq " << r.qsq_min_ratio << ".." << r.qsq_max_ratio
                   << " high-pass " << r.highpass_min_ratio);
    CHECK(r.fields == 200);
    CHECK(r.pdp_min_ratio >= 1.0 - 10.0 * eps * eps);
    CHECK(r.qsq_min_ratio >= 0.0);
    CHECK(r.qsq_max_ratio <= 1.0 + 10.0 * eps * eps);
    CHECK(r.highpass_min_ratio >= 0.1);
  }
}
