#include "wws/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <complex>
#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <lapacke.h>

#include <unsupported/Eigen/MatrixFunctions>
#include <unistd.h>

namespace wws {

namespace {
void require_square(const CMat& A, const char* what) {
  if (A.rows() != A.cols()) throw std::invalid_argument(std::string(what) + ": non-square matrix");
}
}  // namespace

CVec eigenvalues(const CMat& A) {
  require_square(A, "eigenvalues");
  const int n = static_cast<int>(A.rows());
  CMat B = A;
  CVec w(n);
  const int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, B.data(), n, w.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw NumericalFailure("zgeev failed to converge (info " + std::to_string(info) + ")");
  return w;
}

EigenPairs eigen_pairs(const CMat& A) {
  require_square(A, "eigen_pairs");
  const int n = static_cast<int>(A.rows());
  CMat B = A;
  EigenPairs out{CVec(n), CMat(n, n)};
  const int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, B.data(), n, out.values.data(), nullptr, 1, out.vectors.data(), n);
  if (info != 0) throw NumericalFailure("zgeev failed to converge (info " + std::to_string(info) + ")");
  return out;
}

RVec singular_values(const CMat& A) {
  const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
  CMat B = A;
  RVec s(std::min(m, n));
  const int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, B.data(), m, s.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw NumericalFailure("zgesdd failed to converge (info " + std::to_string(info) + ")");
  return s;
}

double operator_norm(const CMat& A) {
  require_square(A, "operator_norm");
  return singular_values(A)[0];
}

double smallest_singular(const CMat& A) {
  require_square(A, "smallest_singular");
  RVec s = singular_values(A);
  return s[s.size() - 1];
}

LogDet log_det(const CMat& A) {
  require_square(A, "log_det");
  const int n = static_cast<int>(A.rows());
  CMat B = A;
  std::vector<lapack_int> piv(n);
  const double anorm = A.cwiseAbs().colwise().sum().maxCoeff();
  const int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, B.data(), n, piv.data());
  if (info < 0) throw NumericalFailure("zgetrf: invalid argument");
  LogDet out{0.0, 0.0, INFINITY, 0.0};
  int swaps = 0;
  for (int i = 0; i < n; ++i) {
    const cplx d = B(i, i);
    out.log_abs += std::log(std::abs(d));
    out.arg += std::arg(d);
    out.min_pivot = std::min(out.min_pivot, std::abs(d));
    if (piv[i] != i + 1) ++swaps;
  }
  if (swaps % 2) out.arg += M_PI;
  out.arg = std::remainder(out.arg, 2.0 * M_PI);
  if (info == 0) {
    double rcond = 0.0;
    LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n, B.data(), n, anorm, &rcond);
    out.rcond = rcond;
  }
  return out;
}

CMat expm(const CMat& A) {
  require_square(A, "expm");
  return A.exp();
}

double directed_hausdorff(const CVec& from, const CVec& to) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < from.size(); ++i) {
    double best = INFINITY;
    for (Eigen::Index j = 0; j < to.size(); ++j) best = std::min(best, std::abs(from[i] - to[j]));
    worst = std::max(worst, best);
  }
  return worst;
}

bool blas_products_consistent() {
  // Large enough to reach the blocked dgemm kernels.
  const int n = 256;
  Eigen::MatrixXd A(n, n), B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      A(i, j) = std::sin(1.0 + i + 3.0 * j);
      B(i, j) = std::cos(2.0 * i - j);
    }
  const Eigen::MatrixXd C = A * B;
  const Eigen::MatrixXd D = A.lazyProduct(B);
  return (C - D).norm() <= 1e-10 * D.norm();
}

void ensure_blas_kernel(char** argv) {
  if (blas_products_consistent()) return;
  if (std::getenv("OPENBLAS_CORETYPE") == nullptr) {
    setenv("OPENBLAS_CORETYPE", "Haswell", 1);
    execv("/proc/self/exe", argv);
  }
  std::fprintf(stderr, "BLAS dgemm self-check failed; set OPENBLAS_CORETYPE to a working kernel\n");
  std::exit(3);
}

}  // namespace wws
