#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wws/bundle.hpp"
#include "wws/evolution.hpp"
#include "wws/modes.hpp"
#include "wws/report.hpp"
#include "wws/symbols.hpp"

using namespace wws;

namespace {

enum Exit { kPass = 0, kInvariant = 1, kUsage = 2, kNumerical = 3 };

struct RunConfig {
  std::vector<double> eps{0.1};
  double alpha_hat = 0.5;
  int n = 512;
  double L_hat = 40.0;
  double nu_hat = 0.75;
  double nu_flat = 0.5;
  double tol = 1e-12;
  unsigned long seed = 1;
  std::string output_dir = ".";
  int steps = 100;
  bool all = false;
};

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string out_path(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.output_dir) / name).string();
}

double single_eps(const RunConfig& c) {
  if (c.eps.size() != 1) throw UsageError("this command takes exactly one --eps");
  return c.eps.front();
}

json config_json(const RunConfig& c) {
  json j = json::object();
  j["eps"] = number_array(c.eps);
  put_number(j, "alpha_hat", c.alpha_hat);
  j["n"] = c.n;
  put_number(j, "L_hat", c.L_hat);
  put_number(j, "nu_hat", c.nu_hat);
  put_number(j, "nu_flat", c.nu_flat);
  put_number(j, "tol", c.tol);
  j["seed"] = c.seed;
  return j;
}

std::string eps_tag(double e) {
  std::ostringstream s;
  s << e;
  return s.str();
}

int cmd_solve(const RunConfig& c) {
  const Grid g(c.n, c.L_hat);
  const RVec w = kdv_profile(g);
  ProfileOptions po;
  po.tol = c.tol;
  json table = json::array();
  CsvWriter conv(out_path(c, "convergence.csv"), {"eps", "theta_w_distance", "fixed_point_residual", "steady_residual"});
  double prev = INFINITY;
  bool monotone = true;
  for (size_t i = 0; i < c.eps.size(); ++i) {
    const double e = c.eps[i];
    const WaveProfile p = solve_profile(e, c.alpha_hat, g, po);
    const double dist = scaled_h2_norm(p.theta - w, c.alpha_hat, g);
    const double steady = steady_residual(p);
    std::printf("eps=%g theta-w distance %.6e fixed-point residual %.3e (%s)\n", e, dist, p.fixed_point_residual,
                p.method.c_str());
    conv.row(std::vector<double>{e, dist, p.fixed_point_residual, steady});
    json row = json::object();
    put_number(row, "eps", e);
    put_number(row, "theta_w_distance", dist);
    put_number(row, "fixed_point_residual", p.fixed_point_residual);
    put_number(row, "steady_residual", steady);
    table.push_back(row);
    if (i > 0 && (e < c.eps[i - 1]) != (dist < prev)) monotone = false;
    prev = dist;
    if (i == 0) {
      json j = report_header("profile");
      j["config"] = config_json(c);
      put_number(j, "eps", e);
      put_number(j, "alpha_hat", c.alpha_hat);
      j["n"] = c.n;
      put_number(j, "L", g.period());
      j["method"] = p.method;
      put_number(j, "fixed_point_residual", p.fixed_point_residual);
      j["residual_history"] = number_array(p.residual_history);
      put_number(j, "theta_w_distance", dist);
      put_number(j, "steady_residual", steady);
      put_number(j, "gamma", p.gamma);
      put_number(j, "eta_mean", p.eta_mean);
      put_number(j, "c0", p.c0);
      j["theta_real"] = number_array(p.theta);
      j["omega"] = number_array(p.omega);
      j["eta_bar"] = number_array(p.eta_bar);
      j["u1"] = number_array(p.u1);
      j["v_surf"] = number_array(p.v_surf);
      write_json(out_path(c, "profile.json"), j);
      CsvWriter csv(out_path(c, "profile.csv"), {"x", "eta", "u", "v"});
      const RVec x = p.unscaled.nodes();
      for (int k = 0; k < c.n; ++k) csv.row(std::vector<double>{x[k], p.eta_physical[k], p.u1[k], p.v_surf[k]});
    }
  }
  json conv_json = report_header("convergence");
  conv_json["config"] = config_json(c);
  conv_json["table"] = table;
  conv_json["monotone"] = monotone;
  write_json(out_path(c, "convergence.json"), conv_json);
  if (c.eps.size() > 1) std::printf("error table %s\n", monotone ? "monotone in eps" : "NOT monotone in eps");
  return monotone ? kPass : kInvariant;
}

const char* class_name(EigenClass k) {
  switch (k) {
    case EigenClass::NearZero: return "near_zero";
    case EigenClass::Essential: return "essential";
    default: return "other";
  }
}

int cmd_spectrum(const RunConfig& c) {
  const double e = single_eps(c);
  const Grid g(c.n, c.L_hat);
  const WaveProfile p = solve_profile(e, c.alpha_hat, g);
  const WeightParams w = WeightParams::make(c.alpha_hat, e);
  const LinearizedOperator op = assemble_A(p, coefficients(p), w);
  SpectrumReport s = spectrum(op.A, op.grid, w);
  const SpectralProjection pr = spectral_projection(op.A, 0.0, 2.0 * s.r0, 64, &s.eigenvalues);
  s.P0_rank = pr.rank;
  const bool ok = s.gap_count == 2 && pr.rank == 2 && pr.idempotency_error < 1e-8;
  std::printf("%d eigenvalues in the gap half-plane; P0 rank %d\n", s.gap_count, pr.rank);
  std::printf("max Re lambda excluding the kernel %.6e (gap line %.6e); idempotency %.2e\n",
              s.max_real_excluding_kernel, s.gap_line, pr.idempotency_error);

  json j = report_header("spectrum");
  j["config"] = config_json(c);
  j["eigenvalue_count"] = static_cast<int>(s.eigenvalues.size());
  j["gap_count"] = s.gap_count;
  put_number(j, "gap_line", s.gap_line);
  put_number(j, "r0", s.r0);
  j["near_zero"] = complex_array(s.near_zero);
  j["other"] = complex_array(s.other);
  j["essential_count"] = static_cast<int>(s.essential_band.size());
  put_number(j, "max_real_excluding_kernel", s.max_real_excluding_kernel);
  put_number(j, "max_abs_real", s.max_abs_real);
  j["P0_rank"] = pr.rank;
  put_number(j, "P0_idempotency_error", pr.idempotency_error);
  put_number(j, "P0_min_circle_distance", pr.min_circle_distance);
  j["passed"] = ok;
  write_json(out_path(c, "spectrum.json"), j);
  CsvWriter csv(out_path(c, "spectrum.csv"), {"re", "im", "class"});
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
    csv.row(std::vector<std::string>{format_number(s.eigenvalues[i].real()), format_number(s.eigenvalues[i].imag()),
                                     class_name(s.classes[i])});
  return ok ? kPass : kInvariant;
}

void write_contour(const std::string& path, const ContourResult& r) {
  CsvWriter csv(path, {"re", "im", "log_abs_det", "arg_det"});
  for (const auto& s : r.samples) csv.row(std::vector<double>{s.lam.real(), s.lam.imag(), s.log_abs, s.arg});
}

json contour_json(const ContourResult& r) {
  json j = json::object();
  j["winding"] = r.winding;
  put_number(j, "winding_real", r.winding_real);
  put_number(j, "rounding_residual", r.rounding_residual);
  put_number(j, "max_step_arg", r.max_step_arg);
  put_number(j, "min_sigma", r.min_sigma);
  j["samples"] = static_cast<int>(r.samples.size());
  return j;
}

int cmd_bundle(const RunConfig& c) {
  const Grid g(c.n, c.L_hat);
  const Contour C = half_disc_contour(2.0, -0.9 * c.alpha_hat / 6.0);
  const Bundle W0 = Bundle::kdv(g, c.alpha_hat);
  const ContourResult r0 = winding_multiplicity(W0, C);
  write_contour(out_path(c, "contour_W0.csv"), r0);
  json j = report_header("bundle");
  j["config"] = config_json(c);
  j["W0"] = contour_json(r0);
  json runs = json::array();
  bool ok = true;
  std::ostringstream line;
  line << "winding(W0)=" << r0.winding;
  const std::vector<cplx> pts = C.points(4);
  for (double e : c.eps) {
    const WaveProfile p = solve_profile(e, c.alpha_hat, g);
    const WeightParams w = WeightParams::make(c.alpha_hat, e);
    const LinearizedOperator op = assemble_A(p, coefficients(p), w, {true});
    const Bundle Wt = Bundle::water_scaled(op);
    const ContourResult rt = winding_multiplicity(Wt, C);
    write_contour(out_path(c, "contour_Wtilde_eps" + eps_tag(e) + ".csv"), rt);
    double sup = 0.0;
    for (cplx l : pts) sup = std::max(sup, operator_norm(Wt.eval(l) - W0.eval(l)));
    json r = contour_json(rt);
    put_number(r, "eps", e);
    put_number(r, "sup_distance_to_W0", sup);
    runs.push_back(r);
    ok = ok && rt.winding == r0.winding;
    line << " winding(W~)=" << rt.winding;
    if (c.eps.size() > 1) line << " [eps=" << e << "]";
    std::printf("eps=%g sup over %zu contour points of |W~ - W0| = %.6e\n", e, pts.size(), sup);
  }
  std::printf("%s\n", line.str().c_str());
  j["W_tilde"] = runs;
  const JordanChainReport jc = kdv_jordan_chain(g, c.alpha_hat, false);
  put_number(j, "jordan_chain_residual", jc.chain_residual);
  put_number(j, "obstruction", jc.obstruction);
  j["passed"] = ok;
  write_json(out_path(c, "bundle.json"), j);
  return ok ? kPass : kInvariant;
}

int cmd_decay(const RunConfig& c) {
  const double e = single_eps(c);
  if (c.steps < 2) throw UsageError("--steps must be at least 2");
  const Grid g(c.n, c.L_hat);
  const WaveProfile p = solve_profile(e, c.alpha_hat, g);
  const WeightParams w = WeightParams::make(c.alpha_hat, e);
  const LinearizedOperator op = assemble_A(p, coefficients(p), w);
  const ModePair m = neutral_modes(p, op);
  const Grid& ug = op.grid;
  CVec z0(2 * ug.n());
  z0 << random_smooth_field(ug, c.seed, 1.0), random_smooth_field(ug, c.seed + 1, 1.0);
  const CVec zp = symplectic_project(z0, m, ug.dx());
  const double horizon = 5.0 / (c.alpha_hat * e * e * e);
  const std::vector<double> t = uniform_times(horizon, c.steps);
  const DecayReport d = propagate(op.A, zp, t, ug.dx(), true);
  const DecayReport dm = propagate(op.A, m.z4, t, ug.dx(), false);
  double drift = 0.0;
  for (double v : dm.norms) drift = std::max(drift, std::abs(v / dm.norms.front() - 1.0));
  const double target = 0.8 * c.alpha_hat * e * e * e / 6.0;
  const bool ok = d.beta_fit >= target && drift < 1e-6;
  std::printf("beta_fit %.6e (required >= %.6e) K_fit %.4f neutral-mode drift %.2e\n", d.beta_fit, target, d.K_fit,
              drift);
  json j = report_header("decay");
  j["config"] = config_json(c);
  j["steps"] = c.steps;
  put_number(j, "horizon", horizon);
  put_number(j, "beta_fit", d.beta_fit);
  put_number(j, "K_fit", d.K_fit);
  put_number(j, "beta_required", target);
  put_number(j, "neutral_mode_drift", drift);
  j["passed"] = ok;
  write_json(out_path(c, "decay.json"), j);
  CsvWriter csv(out_path(c, "decay.csv"), {"t", "norm_projected", "norm_neutral_mode"});
  for (size_t i = 0; i < t.size(); ++i) csv.row(std::vector<double>{t[i], d.norms[i], dm.norms[i]});
  return ok ? kPass : kInvariant;
}

int cmd_symbols(const RunConfig& c) {
  InequalitySuiteOptions o;
  o.seed = c.seed;
  const auto checks = inequality_suite(o);
  bool ok = true;
  json j = report_header("symbols");
  j["config"] = config_json(c);
  json arr = json::array();
  CsvWriter csv(out_path(c, "symbols.csv"), {"check", "samples", "violations", "worst_margin"});
  for (const auto& k : checks) {
    std::printf("%s  %-52s samples %7ld violations %ld worst margin %.3e\n", k.passed() ? "PASS" : "FAIL",
                k.name.c_str(), k.samples, k.violations, k.worst_margin);
    ok = ok && k.passed();
    json r = json::object();
    r["check"] = k.name;
    r["samples"] = k.samples;
    r["violations"] = k.violations;
    put_number(r, "worst_margin", k.worst_margin);
    arr.push_back(r);
    csv.row(std::vector<std::string>{k.name, std::to_string(k.samples), std::to_string(k.violations),
                                     format_number(k.worst_margin)});
  }
  j["checks"] = arr;
  j["passed"] = ok;
  write_json(out_path(c, "symbols.json"), j);
  return ok ? kPass : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  ensure_blas_kernel(argv);
  CLI::App app{"Solitary water-wave profiles, weighted linearized spectra, bundle windings and decay"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; command-line flags override it");
  RunConfig c;
  app.add_option("--eps", c.eps, "Amplitude parameter(s); repeat for a sweep")
      ->check(CLI::PositiveNumber)
      ->check(CLI::Range(0.0, 0.3))
      ->capture_default_str();
  app.add_option("--alpha", c.alpha_hat, "Scaled weight alpha_hat")->check(CLI::Range(0.0, 0.5))->capture_default_str();
  app.add_option("--n", c.n, "Grid points")->check(CLI::Range(16, 4096))->capture_default_str();
  app.add_option("--L-hat", c.L_hat, "Scaled period")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--nu-hat", c.nu_hat, "Filter exponent")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  app.add_option("--nu-flat", c.nu_flat, "Resolvent sweep exponent")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  app.add_option("--tol", c.tol, "Profile solver tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--seed", c.seed, "Seed for all random fields")->capture_default_str();
  app.add_option("--output-dir", c.output_dir, "Directory for JSON and CSV output")->capture_default_str();
  app.add_option("--steps", c.steps, "Time steps for decay")->capture_default_str();

  auto* solve = app.add_subcommand("solve", "Solve the profile; writes profile.json, profile.csv and a convergence table");
  auto* spectrum = app.add_subcommand("spectrum", "Weighted spectrum, gap count and spectral projection rank");
  auto* bund = app.add_subcommand("bundle", "Winding numbers of the KdV and water-wave bundles");
  auto* decay = app.add_subcommand("decay", "Decay of projected random data under the linear flow");
  auto* syms = app.add_subcommand("symbols", "Symbol inequality suite");
  syms->add_flag("--all", c.all, "Run every checker (the default)");
  for (auto* s : {solve, spectrum, bund, decay, syms}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  try {
    std::filesystem::create_directories(c.output_dir);
    if (*solve) return cmd_solve(c);
    if (*spectrum) return cmd_spectrum(c);
    if (*bund) return cmd_bundle(c);
    if (*decay) return cmd_decay(c);
    if (*syms) return cmd_symbols(c);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const InvariantViolation& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return kInvariant;
  } catch (const NumericalFailure& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  }
  return kUsage;
}
