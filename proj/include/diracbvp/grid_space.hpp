#pragma once

#include <array>
#include <numbers>
#include <vector>

#include "diracbvp/exterior_algebra.hpp"

namespace diracbvp {

/// Periodic boundary grid: N points per axis on [0, L)^n, n in {1, 2}.
class Torus {
 public:
  Torus(int dim_n, int points_per_axis, double period = 2.0 * std::numbers::pi);

  int dim_n() const { return dim_n_; }
  int points_per_axis() const { return points_; }
  double period() const { return period_; }
  int point_count() const { return point_count_; }
  int lambda_dim() const { return diracbvp::lambda_dim(dim_n_); }
  int field_dim() const { return point_count_ * lambda_dim(); }
  double spacing() const { return period_ / points_; }
  /// Quadrature weight (L/N)^n of one grid point.
  double cell_weight() const;

  /// Per-axis integer index of flat point p (axis 0 varies slowest).
  std::array<int, 2> axis_index(int p) const;
  int flat_index(std::array<int, 2> idx) const;
  double coordinate(int p, int axis) const;
  /// Signed wavenumber k in [-N/2, N/2) for an unshifted transform index.
  int wavenumber(int transform_index) const;
  /// Angular frequency component 2 pi k / L of spectral point p along an axis.
  double frequency(int p, int axis) const;
  double frequency_norm(int p) const;

  bool operator==(const Torus& other) const = default;

 private:
  int dim_n_;
  int points_;
  double period_;
  int point_count_;
};

/// Multivector-valued grid function; storage is point-major, mask-minor.
class Field {
 public:
  explicit Field(const Torus& torus);
  Field(const Torus& torus, Vector data);

  const Torus& torus() const { return torus_; }
  const Vector& data() const { return data_; }
  Vector& data() { return data_; }
  MultiVector at(int p) const;
  void set(int p, const MultiVector& value);
  Complex& coeff(int p, BasisIndex s) { return data_[p * torus_.lambda_dim() + s.bits()]; }
  Complex coeff(int p, BasisIndex s) const { return data_[p * torus_.lambda_dim() + s.bits()]; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(Complex c);

 private:
  Torus torus_;
  Vector data_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Complex c, Field a);

/// Fourier coefficients of a Field: c_k = N^{-n} sum_x f(x) exp(-i xi_k x), same layout as Field.
struct SpectralField {
  Torus torus;
  Vector data;
};

/// Scalar grid function.
class ScalarField {
 public:
  explicit ScalarField(const Torus& torus);
  ScalarField(const Torus& torus, Vector values);

  const Torus& torus() const { return torus_; }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }

 private:
  Torus torus_;
  Vector values_;
};

SpectralField fourier_forward(const Field& f);
Field fourier_inverse(const SpectralField& f);
Vector fourier_forward(const ScalarField& f);
ScalarField fourier_inverse_scalar(const Torus& torus, const Vector& coefficients);

/// Spectral derivative along one axis.
Field partial(const Field& f, int axis);
ScalarField partial(const ScalarField& f, int axis);

Field d_op(const Field& f);
Field d_star_op(const Field& f);
Field underline_d(const Field& f);

Complex inner_product(const Field& f, const Field& g);
double norm(const Field& f);
Complex inner_product(const ScalarField& f, const ScalarField& g);
double norm(const ScalarField& f);

/// Per-point linear map on Lambda, block diagonal by degree.
class CoefficientField {
 public:
  CoefficientField(const Torus& torus, std::vector<Matrix> maps);

  static CoefficientField identity(const Torus& torus);
  static CoefficientField scaled_identity(const Torus& torus, Complex c);
  /// Identity on every degree except the vector block, given in the basis e_0, ..., e_n.
  static CoefficientField from_vector_block(const Torus& torus, const std::vector<Matrix>& a);
  static CoefficientField constant_vector_block(const Torus& torus, const Matrix& a);

  const Torus& torus() const { return torus_; }
  const Matrix& at(int p) const { return maps_[p]; }
  /// Throws SingularOperator (with the first offending grid point) if some map is not invertible.
  const Matrix& inverse_at(int p) const;
  bool is_invertible() const { return singular_point_ < 0; }
  const std::vector<Matrix>& maps() const { return maps_; }
  /// Degree-one block at point p in the basis e_0, ..., e_n.
  Matrix vector_block(int p) const;
  /// Restriction to degree k in increasing mask order.
  Matrix degree_block(int p, int k) const;

  double kappa() const { return kappa_; }
  double sup_norm() const { return sup_norm_; }
  bool is_accretive() const { return kappa_ > 0.0; }
  /// Commutes with the normal/tangential splitting at every point.
  bool is_block(double tol = 1e-14) const;
  bool is_hermitian(double tol = 1e-14) const;
  bool is_constant(double tol = 0.0) const;

  CoefficientField adjoint() const;
  /// max_x ||B(x) - other(x)||.
  double sup_distance(const CoefficientField& other) const;
  /// this + eps * direction.
  CoefficientField perturbed(const CoefficientField& direction, double eps) const;

 private:
  Torus torus_;
  std::vector<Matrix> maps_;
  std::vector<Matrix> inverses_;
  double kappa_ = 0.0;
  double sup_norm_ = 0.0;
  long singular_point_ = -1;
};

Field apply_coeff(const CoefficientField& b, const Field& f);
Field apply_coeff_inverse(const CoefficientField& b, const Field& f);
/// B^{-1} (i m d*) B.
Field underline_d_star_B(const Field& f, const CoefficientField& b);

/// Smallest eigenvalue of the hermitian part, and spectral norm, of a single matrix.
double accretivity(const Matrix& b);
double operator_norm(const Matrix& b);

}  // namespace diracbvp
