#pragma once

#include <Eigen/Dense>

#include "diracbvp/exterior_algebra.hpp"

namespace diracbvp::linalg {

struct Eigensystem {
  Vector values;
  Matrix vectors;  // unit 2-norm columns
};

/// General complex eigendecomposition (right eigenvectors).
Eigensystem eig(const Matrix& a);

/// Singular values in decreasing order.
Eigen::VectorXd singular_values(const Matrix& a);

struct ThinSvd {
  Matrix u;
  Eigen::VectorXd s;
  Matrix v;  // a = u * diag(s) * v^H
};
ThinSvd svd(const Matrix& a);

double spectral_norm(const Matrix& a);
/// 2-norm condition number; +inf if the smallest singular value is zero.
double cond2(const Matrix& a);
/// Exact 1-norm condition number from a matrix and its known inverse.
double cond1(const Matrix& a, const Matrix& a_inv);

/// Orthonormal basis of {x : a x = 0}, singular values below rel_tol * sigma_max counted as zero.
Matrix null_space(const Matrix& a, double rel_tol);
/// Orthonormal basis of the column space, same rank rule.
Matrix orthonormal_range(const Matrix& a, double rel_tol);

/// LU inverse; throws SingularOperator when the reciprocal condition estimate is below rcond_min.
Matrix checked_inverse(const Matrix& a, double rcond_min = 1e-14);
Vector checked_solve(const Matrix& a, const Vector& b, double rcond_min = 1e-14);
Matrix checked_solve(const Matrix& a, const Matrix& b, double rcond_min = 1e-14);

}  // namespace diracbvp::linalg
