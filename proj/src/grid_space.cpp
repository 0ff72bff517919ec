#include "diracbvp/grid_space.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <string>

#include "diracbvp/errors.hpp"

namespace diracbvp {

// ---------------------------------------------------------------- Torus

Torus::Torus(int dim_n, int points_per_axis, double period)
    : dim_n_(dim_n), points_(points_per_axis), period_(period), point_count_(1) {
  if (dim_n != 1 && dim_n != 2) throw InvalidArgument("Torus: dimension must be 1 or 2");
  if (points_per_axis < 8 || (points_per_axis & (points_per_axis - 1)) != 0)
    throw InvalidArgument("Torus: points per axis must be a power of two >= 8");
  const int max_points = dim_n == 1 ? 512 : 32;
  if (points_per_axis > max_points)
    throw InvalidArgument("Torus: at most " + std::to_string(max_points) + " points per axis for n = " +
                          std::to_string(dim_n));
  if (!(period > 0.0) || !std::isfinite(period)) throw InvalidArgument("Torus: period must be positive");
  for (int i = 0; i < dim_n; ++i) point_count_ *= points_per_axis;
}

double Torus::cell_weight() const { return std::pow(spacing(), dim_n_); }

std::array<int, 2> Torus::axis_index(int p) const {
  if (dim_n_ == 1) return {p, 0};
  return {p / points_, p % points_};
}

int Torus::flat_index(std::array<int, 2> idx) const {
  const auto wrap = [this](int i) { return ((i % points_) + points_) % points_; };
  if (dim_n_ == 1) return wrap(idx[0]);
  return wrap(idx[0]) * points_ + wrap(idx[1]);
}

double Torus::coordinate(int p, int axis) const { return spacing() * axis_index(p)[axis]; }

int Torus::wavenumber(int transform_index) const {
  return transform_index < points_ / 2 ? transform_index : transform_index - points_;
}

double Torus::frequency(int p, int axis) const {
  return 2.0 * std::numbers::pi * wavenumber(axis_index(p)[axis]) / period_;
}

double Torus::frequency_norm(int p) const {
  double s = 0.0;
  for (int a = 0; a < dim_n_; ++a) s += std::pow(frequency(p, a), 2);
  return std::sqrt(s);
}

// ---------------------------------------------------------------- Field

Field::Field(const Torus& torus) : torus_(torus), data_(Vector::Zero(torus.field_dim())) {}

Field::Field(const Torus& torus, Vector data) : torus_(torus), data_(std::move(data)) {
  if (data_.size() != torus_.field_dim()) throw DimensionMismatch("Field: data size does not match torus");
}

MultiVector Field::at(int p) const {
  const int m = torus_.lambda_dim();
  return MultiVector(torus_.dim_n(), data_.segment(static_cast<Eigen::Index>(p) * m, m));
}

void Field::set(int p, const MultiVector& value) {
  if (value.dim_n() != torus_.dim_n()) throw DimensionMismatch("Field::set: multivector dimension mismatch");
  const int m = torus_.lambda_dim();
  data_.segment(static_cast<Eigen::Index>(p) * m, m) = value.coeffs();
}

Field& Field::operator+=(const Field& other) {
  if (!(other.torus_ == torus_)) throw DimensionMismatch("Field: torus mismatch");
  data_ += other.data_;
  return *this;
}

Field& Field::operator-=(const Field& other) {
  if (!(other.torus_ == torus_)) throw DimensionMismatch("Field: torus mismatch");
  data_ -= other.data_;
  return *this;
}

Field& Field::operator*=(Complex c) {
  data_ *= c;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(Complex c, Field a) { return a *= c; }

ScalarField::ScalarField(const Torus& torus) : torus_(torus), values_(Vector::Zero(torus.point_count())) {}

ScalarField::ScalarField(const Torus& torus, Vector values) : torus_(torus), values_(std::move(values)) {
  if (values_.size() != torus_.point_count()) throw DimensionMismatch("ScalarField: size does not match torus");
}

// ---------------------------------------------------------------- transforms

namespace {

class FftwPlan {
 public:
  FftwPlan(const Torus& torus, int components, Complex* buffer, int sign) {
    int dims[2] = {torus.points_per_axis(), torus.points_per_axis()};
    auto* io = reinterpret_cast<fftw_complex*>(buffer);
    plan_ = fftw_plan_many_dft(torus.dim_n(), dims, components, io, nullptr, components, 1, io, nullptr, components, 1,
                               sign, FFTW_ESTIMATE);
    if (plan_ == nullptr) throw NumericalFailure("FFTW plan creation failed");
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  ~FftwPlan() { fftw_destroy_plan(plan_); }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

Vector transform(const Torus& torus, Vector data, int components, int sign) {
  if (data.size() != static_cast<Eigen::Index>(torus.point_count()) * components)
    throw DimensionMismatch("transform: size mismatch");
  FftwPlan plan(torus, components, data.data(), sign);
  plan.execute();
  if (sign == FFTW_FORWARD) data /= static_cast<double>(torus.point_count());
  return data;
}

Vector partial_data(const Torus& torus, const Vector& data, int components, int axis) {
  if (axis < 0 || axis >= torus.dim_n()) throw InvalidArgument("partial: axis out of range");
  Vector spec = transform(torus, data, components, FFTW_FORWARD);
  for (int p = 0; p < torus.point_count(); ++p)
    spec.segment(static_cast<Eigen::Index>(p) * components, components) *= Complex(0.0, torus.frequency(p, axis));
  return transform(torus, std::move(spec), components, FFTW_BACKWARD);
}

/// Applies a Lambda matrix at every grid point.
Field pointwise(const Matrix& op, const Field& f) {
  const Torus& t = f.torus();
  const int m = t.lambda_dim();
  Field out(t);
  Eigen::Map<const Matrix> in(f.data().data(), m, t.point_count());
  Eigen::Map<Matrix> res(out.data().data(), m, t.point_count());
  res = op * in;
  return out;
}

}  // namespace

SpectralField fourier_forward(const Field& f) {
  return {f.torus(), transform(f.torus(), f.data(), f.torus().lambda_dim(), FFTW_FORWARD)};
}

Field fourier_inverse(const SpectralField& f) {
  return Field(f.torus, transform(f.torus, f.data, f.torus.lambda_dim(), FFTW_BACKWARD));
}

Vector fourier_forward(const ScalarField& f) { return transform(f.torus(), f.values(), 1, FFTW_FORWARD); }

ScalarField fourier_inverse_scalar(const Torus& torus, const Vector& coefficients) {
  return ScalarField(torus, transform(torus, coefficients, 1, FFTW_BACKWARD));
}

Field partial(const Field& f, int axis) {
  return Field(f.torus(), partial_data(f.torus(), f.data(), f.torus().lambda_dim(), axis));
}

ScalarField partial(const ScalarField& f, int axis) {
  return ScalarField(f.torus(), partial_data(f.torus(), f.values(), 1, axis));
}

Field d_op(const Field& f) {
  const int n = f.torus().dim_n();
  Field out(f.torus());
  for (int j = 1; j <= n; ++j)
    out += pointwise(wedge_matrix(MultiVector::basis(n, BasisIndex(1u << j))), partial(f, j - 1));
  return out;
}

Field d_star_op(const Field& f) {
  const int n = f.torus().dim_n();
  Field out(f.torus());
  for (int j = 1; j <= n; ++j)
    out -= pointwise(hook_matrix(MultiVector::basis(n, BasisIndex(1u << j))), partial(f, j - 1));
  return out;
}

Field underline_d(const Field& f) {
  return Complex(0.0, 1.0) * pointwise(m_matrix(f.torus().dim_n()), d_op(f));
}

Field underline_d_star_B(const Field& f, const CoefficientField& b) {
  const Field inner = Complex(0.0, 1.0) * pointwise(m_matrix(f.torus().dim_n()), d_star_op(apply_coeff(b, f)));
  return apply_coeff_inverse(b, inner);
}

Complex inner_product(const Field& f, const Field& g) {
  if (!(f.torus() == g.torus())) throw DimensionMismatch("inner_product: torus mismatch");
  return f.torus().cell_weight() * g.data().dot(f.data());
}

double norm(const Field& f) { return std::sqrt(f.torus().cell_weight()) * f.data().norm(); }

Complex inner_product(const ScalarField& f, const ScalarField& g) {
  if (!(f.torus() == g.torus())) throw DimensionMismatch("inner_product: torus mismatch");
  return f.torus().cell_weight() * g.values().dot(f.values());
}

double norm(const ScalarField& f) { return std::sqrt(f.torus().cell_weight()) * f.values().norm(); }

// ---------------------------------------------------------------- coefficients

double accretivity(const Matrix& b) {
  const Matrix h = 0.5 * (b + b.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

double operator_norm(const Matrix& b) {
  Eigen::JacobiSVD<Matrix> svd(b);
  return svd.singularValues()[0];
}

CoefficientField::CoefficientField(const Torus& torus, std::vector<Matrix> maps)
    : torus_(torus), maps_(std::move(maps)) {
  const int m = torus_.lambda_dim();
  if (static_cast<int>(maps_.size()) != torus_.point_count())
    throw DimensionMismatch("CoefficientField: one map per grid point required");
  kappa_ = std::numeric_limits<double>::infinity();
  inverses_.reserve(maps_.size());
  for (int p = 0; p < torus_.point_count(); ++p) {
    const Matrix& b = maps_[p];
    if (b.rows() != m || b.cols() != m) throw DimensionMismatch("CoefficientField: map has wrong size");
    if (!b.allFinite()) throw InvalidArgument("CoefficientField: non-finite entry at grid point " + std::to_string(p));
    const double scale = 1.0 + b.cwiseAbs().maxCoeff();
    for (int s = 0; s < m; ++s)
      for (int t = 0; t < m; ++t)
        if (BasisIndex(s).degree() != BasisIndex(t).degree() && std::abs(b(s, t)) > 1e-14 * scale)
          throw InvalidArgument("CoefficientField: map does not preserve degree at grid point " + std::to_string(p));
    kappa_ = std::min(kappa_, accretivity(b));
    sup_norm_ = std::max(sup_norm_, operator_norm(b));
    Eigen::PartialPivLU<Matrix> lu(b);
    Matrix inv = lu.inverse();
    if (lu.rcond() > 1e-14 && inv.allFinite()) {
      inverses_.push_back(std::move(inv));
    } else {
      inverses_.emplace_back();
      if (singular_point_ < 0) singular_point_ = p;
    }
  }
}

CoefficientField CoefficientField::identity(const Torus& torus) { return scaled_identity(torus, 1.0); }

CoefficientField CoefficientField::scaled_identity(const Torus& torus, Complex c) {
  const int m = torus.lambda_dim();
  return CoefficientField(torus, std::vector<Matrix>(torus.point_count(), c * Matrix::Identity(m, m)));
}

CoefficientField CoefficientField::from_vector_block(const Torus& torus, const std::vector<Matrix>& a) {
  const int n = torus.dim_n();
  const int m = torus.lambda_dim();
  if (static_cast<int>(a.size()) != torus.point_count())
    throw DimensionMismatch("from_vector_block: one block per grid point required");
  std::vector<Matrix> maps(a.size(), Matrix::Identity(m, m));
  for (std::size_t p = 0; p < a.size(); ++p) {
    if (a[p].rows() != n + 1 || a[p].cols() != n + 1)
      throw DimensionMismatch("from_vector_block: block must be (n+1)x(n+1)");
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) maps[p](1 << i, 1 << j) = a[p](i, j);
  }
  return CoefficientField(torus, std::move(maps));
}

CoefficientField CoefficientField::constant_vector_block(const Torus& torus, const Matrix& a) {
  return from_vector_block(torus, std::vector<Matrix>(torus.point_count(), a));
}

Matrix CoefficientField::vector_block(int p) const {
  const int n = torus_.dim_n();
  Matrix a(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) a(i, j) = maps_[p](1 << i, 1 << j);
  return a;
}

Matrix CoefficientField::degree_block(int p, int k) const {
  const auto masks = degree_masks(torus_.dim_n(), k);
  const int size = static_cast<int>(masks.size());
  Matrix out(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) out(i, j) = maps_[p](masks[i].bits(), masks[j].bits());
  return out;
}

bool CoefficientField::is_block(double tol) const {
  const int m = torus_.lambda_dim();
  for (const Matrix& b : maps_) {
    const double scale = 1.0 + b.cwiseAbs().maxCoeff();
    for (int s = 0; s < m; ++s)
      for (int t = 0; t < m; ++t)
        if (BasisIndex(s).contains_normal() != BasisIndex(t).contains_normal() && std::abs(b(s, t)) > tol * scale)
          return false;
  }
  return true;
}

bool CoefficientField::is_hermitian(double tol) const {
  for (const Matrix& b : maps_)
    if ((b - b.adjoint()).cwiseAbs().maxCoeff() > tol * (1.0 + b.cwiseAbs().maxCoeff())) return false;
  return true;
}

bool CoefficientField::is_constant(double tol) const {
  for (const Matrix& b : maps_)
    if ((b - maps_[0]).cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

CoefficientField CoefficientField::adjoint() const {
  std::vector<Matrix> adj;
  adj.reserve(maps_.size());
  for (const Matrix& b : maps_) adj.push_back(b.adjoint());
  return CoefficientField(torus_, std::move(adj));
}

double CoefficientField::sup_distance(const CoefficientField& other) const {
  if (!(other.torus_ == torus_)) throw DimensionMismatch("sup_distance: torus mismatch");
  double d = 0.0;
  for (int p = 0; p < torus_.point_count(); ++p) d = std::max(d, operator_norm(maps_[p] - other.maps_[p]));
  return d;
}

CoefficientField CoefficientField::perturbed(const CoefficientField& direction, double eps) const {
  if (!(direction.torus_ == torus_)) throw DimensionMismatch("perturbed: torus mismatch");
  std::vector<Matrix> maps;
  maps.reserve(maps_.size());
  for (int p = 0; p < torus_.point_count(); ++p) maps.push_back(maps_[p] + eps * direction.maps_[p]);
  return CoefficientField(torus_, std::move(maps));
}

Field apply_coeff(const CoefficientField& b, const Field& f) {
  if (!(b.torus() == f.torus())) throw DimensionMismatch("apply_coeff: torus mismatch");
  const int m = f.torus().lambda_dim();
  Field out(f.torus());
  for (int p = 0; p < f.torus().point_count(); ++p)
    out.data().segment(static_cast<Eigen::Index>(p) * m, m) = b.at(p) * f.data().segment(static_cast<Eigen::Index>(p) * m, m);
  return out;
}

const Matrix& CoefficientField::inverse_at(int p) const {
  if (singular_point_ >= 0)
    throw SingularOperator("CoefficientField: map is singular at grid point " + std::to_string(singular_point_),
                           singular_point_);
  return inverses_[p];
}

Field apply_coeff_inverse(const CoefficientField& b, const Field& f) {
  if (!(b.torus() == f.torus())) throw DimensionMismatch("apply_coeff_inverse: torus mismatch");
  const int m = f.torus().lambda_dim();
  Field out(f.torus());
  for (int p = 0; p < f.torus().point_count(); ++p)
    out.data().segment(static_cast<Eigen::Index>(p) * m, m) =
        b.inverse_at(p) * f.data().segment(static_cast<Eigen::Index>(p) * m, m);
  return out;
}

}  // namespace diracbvp
