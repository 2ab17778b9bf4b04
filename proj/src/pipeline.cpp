#include "wws/pipeline.hpp"

#include <cmath>

namespace wws {

CVec pad_coefficients(const CVec& c) {
  const int n = static_cast<int>(c.size());
  CVec out = CVec::Zero(2 * n);
  for (int i = 0; i < n / 2; ++i) out[i] = c[i];
  for (int i = n / 2 + 1; i < n; ++i) out[i + n] = c[i];
  out[n / 2] = 0.5 * c[n / 2];
  out[2 * n - n / 2] = 0.5 * c[n / 2];
  return out;
}

CVec truncate_coefficients(const CVec& c) {
  const int n = static_cast<int>(c.size()) / 2;
  CVec out(n);
  for (int i = 0; i < n / 2; ++i) out[i] = c[i];
  for (int i = n / 2 + 1; i < n; ++i) out[i] = c[i + n];
  out[n / 2] = c[n / 2] + c[2 * n - n / 2];
  return out;
}

Stage multiplier(const MultiplierSymbol& sym, const Grid& grid, const WeightParams& w, Nyquist rule) {
  Stage s;
  s.kind = Stage::Kind::Multiplier;
  s.name = sym.name;
  s.values = symbol_values(sym, grid, w.a, rule);
  return s;
}

Stage multiplier_values(std::string name, CVec per_mode) {
  Stage s;
  s.kind = Stage::Kind::Multiplier;
  s.name = std::move(name);
  s.values = std::move(per_mode);
  return s;
}

Stage pointwise(std::string name, const Grid& grid, const CVec& node_values, Product product) {
  if (node_values.size() != grid.n()) throw std::invalid_argument("pointwise stage: size mismatch");
  Stage s;
  s.kind = Stage::Kind::Pointwise;
  s.name = std::move(name);
  s.values = node_values;
  s.product = product;
  if (product == Product::Padded) {
    Grid fine(2 * grid.n(), grid.period());
    s.fine_values = fine.inverse(pad_coefficients(grid.forward(node_values)));
  }
  return s;
}

Stage pointwise(std::string name, const Grid& grid, const RVec& node_values, Product product) {
  return pointwise(std::move(name), grid, CVec(node_values.cast<cplx>()), product);
}

namespace {

struct Workspace {
  Grid fine;
  CVec c, v, cf, vf;
  explicit Workspace(const Grid& g) : fine(2 * g.n(), g.period()), c(g.n()), v(g.n()), cf(2 * g.n()), vf(2 * g.n()) {}
};

// Runs the stages on coefficient vector ws.c in place.
void run_stages(const Pipeline& p, const Grid& grid, Workspace& ws) {
  for (const Stage& s : p) {
    if (s.kind == Stage::Kind::Multiplier) {
      ws.c = ws.c.cwiseProduct(s.values);
    } else if (s.product == Product::Collocation) {
      grid.inverse(ws.c.data(), ws.v.data());
      ws.v = ws.v.cwiseProduct(s.values);
      grid.forward(ws.v.data(), ws.c.data());
    } else {
      ws.cf = pad_coefficients(ws.c);
      ws.fine.inverse(ws.cf.data(), ws.vf.data());
      ws.vf = ws.vf.cwiseProduct(s.fine_values);
      ws.fine.forward(ws.vf.data(), ws.cf.data());
      ws.c = truncate_coefficients(ws.cf);
    }
  }
}

// Coefficients of the node basis vector e_j: (L/n) (-1)^i exp(-2 pi i i j / n).
void basis_coefficients(const Grid& grid, int j, CVec& c) {
  const int n = grid.n();
  const double scale = grid.period() / n;
  for (int i = 0; i < n; ++i) {
    const double ang = -2.0 * M_PI * static_cast<double>((static_cast<long>(i) * j) % n) / n;
    c[i] = (i % 2 == 0 ? scale : -scale) * cplx(std::cos(ang), std::sin(ang));
  }
}

void column(const std::vector<Term>& terms, const Grid& grid, int j, Workspace& ws, CVec& acc) {
  acc.setZero();
  for (const Term& t : terms) {
    basis_coefficients(grid, j, ws.c);
    run_stages(t.pipeline, grid, ws);
    acc += t.coef * ws.c;
  }
  grid.inverse(acc.data(), ws.v.data());
  acc = ws.v;
}

CMat materialize_impl(const std::vector<Term>& terms, const Grid& grid, bool parallel) {
  const int n = grid.n();
  CMat M(n, n);
#pragma omp parallel if (parallel)
  {
    Workspace ws(grid);
    CVec acc(n);
#pragma omp for schedule(static)
    for (int j = 0; j < n; ++j) {
      column(terms, grid, j, ws, acc);
      M.col(j) = acc;
    }
  }
  return M;
}

}  // namespace

CVec apply(const Pipeline& p, const Grid& grid, const CVec& node_values) {
  Workspace ws(grid);
  grid.forward(node_values.data(), ws.c.data());
  run_stages(p, grid, ws);
  return grid.inverse(ws.c);
}

CMat materialize(const Pipeline& p, const Grid& grid) { return materialize_impl({{1.0, p}}, grid, true); }

CMat materialize_serial(const Pipeline& p, const Grid& grid) {
  return materialize_impl({{1.0, p}}, grid, false);
}

CMat materialize(const std::vector<Term>& terms, const Grid& grid) {
  return materialize_impl(terms, grid, true);
}

CMat multiplier_matrix(const Grid& grid, const CVec& per_mode) {
  return materialize(Pipeline{multiplier_values("values", per_mode)}, grid);
}

}  // namespace wws
