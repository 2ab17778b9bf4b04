#pragma once

#include <string>
#include <vector>

#include "wws/grid.hpp"

namespace wws {

// Padded: exact product of the two trigonometric interpolants on a doubled grid,
// truncated back to the retained modes (Galerkin product; no aliasing, no lost modes).
// Collocation: plain node-wise product.
enum class Product { Padded, Collocation };

struct Stage {
  enum class Kind { Multiplier, Pointwise };
  Kind kind = Kind::Multiplier;
  std::string name;
  CVec values;       // per-coefficient factors (Multiplier) or node values (Pointwise)
  CVec fine_values;  // node values on the doubled grid (Padded pointwise only)
  Product product = Product::Padded;
};

using Pipeline = std::vector<Stage>;  // stages act first to last

Stage multiplier(const MultiplierSymbol& sym, const Grid& grid, const WeightParams& w,
                 Nyquist rule = Nyquist::Exact);
Stage multiplier_values(std::string name, CVec per_mode);
Stage pointwise(std::string name, const Grid& grid, const CVec& node_values,
                Product product = Product::Padded);
Stage pointwise(std::string name, const Grid& grid, const RVec& node_values,
                Product product = Product::Padded);

// Applies the pipeline to node values.
CVec apply(const Pipeline& p, const Grid& grid, const CVec& node_values);

// Dense matrix in the node basis: column j is the pipeline applied to e_j.
// The parallel and serial versions run the same column kernel and agree bitwise.
CMat materialize(const Pipeline& p, const Grid& grid);
CMat materialize_serial(const Pipeline& p, const Grid& grid);

// Sum of weighted pipelines, materialized column by column.
struct Term {
  cplx coef;
  Pipeline pipeline;
};
CMat materialize(const std::vector<Term>& terms, const Grid& grid);

// Multiplier matrix from per-mode values.
CMat multiplier_matrix(const Grid& grid, const CVec& per_mode);

// Zero-pads FFT-ordered coefficients from n to 2n modes (Nyquist split in halves) and back.
CVec pad_coefficients(const CVec& c);
CVec truncate_coefficients(const CVec& c);

}  // namespace wws
