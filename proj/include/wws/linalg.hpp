#pragma once

#include "wws/grid.hpp"

namespace wws {

CVec eigenvalues(const CMat& A);

struct EigenPairs {
  CVec values;
  CMat vectors;  // right eigenvectors, unit 2-norm columns
};
EigenPairs eigen_pairs(const CMat& A);

RVec singular_values(const CMat& A);  // descending
double operator_norm(const CMat& A);
double smallest_singular(const CMat& A);

// Discrete L^2 operator norm of a node-basis matrix (the node basis is orthogonal
// with uniform weight dx, so this equals the 2-norm).
inline double l2_norm(const CVec& v, double dx) { return std::sqrt(dx) * v.norm(); }

// log|det| and arg det (principal) from an LU factorization.
struct LogDet {
  double log_abs;
  double arg;
  double min_pivot;
  double rcond;  // reciprocal 1-norm condition estimate
};
LogDet log_det(const CMat& A);

CMat expm(const CMat& A);

// max over a in from of min over b in to of |a - b|.
double directed_hausdorff(const CVec& from, const CVec& to);

// Some OpenBLAS builds pick a dgemm kernel that returns wrong products on CPUs they
// misdetect. Executables call this first: on a failed self-check the process re-executes
// itself with OPENBLAS_CORETYPE=Haswell, which is read when the library loads.
bool blas_products_consistent();
void ensure_blas_kernel(char** argv);

}  // namespace wws
