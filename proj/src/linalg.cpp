#include "diracbvp/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <limits>
#include <string>

#include "diracbvp/errors.hpp"

namespace diracbvp::linalg {

namespace {

lapack_complex_double* lp(Complex* p) { return reinterpret_cast<lapack_complex_double*>(p); }

void check_info(lapack_int info, const char* routine) {
  if (info != 0) throw NumericalFailure(std::string(routine) + " failed with info = " + std::to_string(info));
}

}  // namespace

Eigensystem eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("eig: matrix must be square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigensystem out{Vector(n), Matrix(n, n)};
  if (n == 0) return out;
  Matrix work = a;
  check_info(LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, lp(work.data()), n, lp(out.values.data()), nullptr, n,
                           lp(out.vectors.data()), n),
             "zgeev");
  return out;
}

Eigen::VectorXd singular_values(const Matrix& a) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  Eigen::VectorXd s(std::min(m, n));
  if (s.size() == 0) return s;
  Matrix work = a;
  check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, lp(work.data()), m, s.data(), nullptr, 1, nullptr, 1),
             "zgesdd");
  return s;
}

ThinSvd svd(const Matrix& a) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  ThinSvd out{Matrix(m, k), Eigen::VectorXd(k), Matrix(n, k)};
  if (k == 0) return out;
  Matrix work = a;
  Matrix vh(k, n);
  check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, lp(work.data()), m, out.s.data(), lp(out.u.data()), m,
                            lp(vh.data()), k),
             "zgesdd");
  out.v = vh.adjoint();
  return out;
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a)[0];
}

double cond2(const Matrix& a) {
  const Eigen::VectorXd s = singular_values(a);
  if (s.size() == 0) return 1.0;
  const double smin = s[s.size() - 1];
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

double cond1(const Matrix& a, const Matrix& a_inv) {
  const auto one_norm = [](const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); };
  return one_norm(a) * one_norm(a_inv);
}

Matrix null_space(const Matrix& a, double rel_tol) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return Matrix::Identity(n, n);
  // Reduce tall systems to their square triangular factor; singular values are unchanged.
  Matrix core = a;
  if (a.rows() > n) {
    Eigen::HouseholderQR<Matrix> qr(a);
    core = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  }
  const lapack_int m = static_cast<lapack_int>(core.rows());
  const lapack_int nn = static_cast<lapack_int>(n);
  Eigen::VectorXd s(std::min(m, nn));
  Matrix vh(nn, nn);
  Matrix u(m, m);
  Matrix work = core;
  check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'A', m, nn, lp(work.data()), m, s.data(), lp(u.data()), m,
                            lp(vh.data()), nn),
             "zgesdd");
  const double smax = s.size() > 0 ? s[0] : 0.0;
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > rel_tol * smax) ++rank;
  return vh.bottomRows(nn - rank).adjoint();
}

Matrix orthonormal_range(const Matrix& a, double rel_tol) {
  const ThinSvd d = svd(a);
  const double smax = d.s.size() > 0 ? d.s[0] : 0.0;
  Eigen::Index rank = 0;
  while (rank < d.s.size() && d.s[rank] > rel_tol * smax) ++rank;
  return d.u.leftCols(rank);
}

namespace {

Eigen::PartialPivLU<Matrix> checked_lu(const Matrix& a, double rcond_min) {
  if (a.rows() != a.cols()) throw DimensionMismatch("solve: matrix must be square");
  Eigen::PartialPivLU<Matrix> lu(a);
  const double rc = lu.rcond();
  const bool zero_pivot = a.rows() > 0 && lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0;
  if (zero_pivot || !(rc >= rcond_min))
    throw SingularOperator("linear system is numerically singular (rcond = " + std::to_string(rc) + ")");
  return lu;
}

}  // namespace

Matrix checked_inverse(const Matrix& a, double rcond_min) { return checked_lu(a, rcond_min).inverse(); }

Vector checked_solve(const Matrix& a, const Vector& b, double rcond_min) { return checked_lu(a, rcond_min).solve(b); }

Matrix checked_solve(const Matrix& a, const Matrix& b, double rcond_min) { return checked_lu(a, rcond_min).solve(b); }

}  // namespace diracbvp::linalg
