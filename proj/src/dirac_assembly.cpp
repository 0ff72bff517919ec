#include "diracbvp/dirac_assembly.hpp"

#include <cmath>
#include <numbers>

#include "diracbvp/errors.hpp"
#include "diracbvp/linalg.hpp"

namespace diracbvp {

namespace {

constexpr Complex kI{0.0, 1.0};

Matrix basis_wedge(int n, int j) { return wedge_matrix(MultiVector::basis(n, BasisIndex(1u << j))); }
Matrix basis_hook(int n, int j) { return hook_matrix(MultiVector::basis(n, BasisIndex(1u << j))); }

std::vector<Matrix> repeat(const Torus& t, const Matrix& op) {
  return std::vector<Matrix>(static_cast<std::size_t>(t.point_count()), op);
}

/// rows of x for point p replaced by blocks[p] * rows.
void left_blockdiag(const std::vector<Matrix>& blocks, Matrix& x) {
  const Eigen::Index m = blocks.front().rows();
  for (std::size_t p = 0; p < blocks.size(); ++p) {
    const Eigen::Index r = static_cast<Eigen::Index>(p) * m;
    Matrix rows = blocks[p] * x.middleRows(r, m);
    x.middleRows(r, m) = rows;
  }
}

void right_blockdiag(Matrix& x, const std::vector<Matrix>& blocks) {
  const Eigen::Index m = blocks.front().rows();
  for (std::size_t p = 0; p < blocks.size(); ++p) {
    const Eigen::Index c = static_cast<Eigen::Index>(p) * m;
    Matrix cols = x.middleCols(c, m) * blocks[p];
    x.middleCols(c, m) = cols;
  }
}

Matrix spectral_derivative_1d(int points, double period) {
  Vector kernel = Vector::Zero(points);
  for (int j = 0; j < points; ++j) {
    Complex acc = 0.0;
    for (int idx = 0; idx < points; ++idx) {
      const int k = idx < points / 2 ? idx : idx - points;
      const double xi = 2.0 * std::numbers::pi * k / period;
      acc += kI * xi * std::polar(1.0, 2.0 * std::numbers::pi * k * j / points);
    }
    kernel[j] = acc / static_cast<double>(points);
  }
  Matrix d(points, points);
  for (int x = 0; x < points; ++x)
    for (int y = 0; y < points; ++y) d(x, y) = kernel[((x - y) % points + points) % points];
  return d;
}

std::vector<Matrix> inverse_maps(const CoefficientField& b) {
  std::vector<Matrix> inv;
  inv.reserve(b.maps().size());
  for (int p = 0; p < b.torus().point_count(); ++p) inv.push_back(b.inverse_at(p));
  return inv;
}

Matrix invert_at_point(const Matrix& a, int p, const char* what) {
  try {
    return linalg::checked_inverse(a, 1e-13);
  } catch (const SingularOperator&) {
    throw SingularOperator(std::string(what) + " is not invertible at grid point " + std::to_string(p), p);
  }
}

void check_same_dim(const OperatorMatrix& op, const SubspaceBasis& basis) {
  if (op.entries.rows() != op.entries.cols()) throw DimensionMismatch("operator matrix must be square");
  if (op.dim() != basis.ambient_dim) throw DimensionMismatch("basis ambient dimension does not match operator");
}

std::string label_tag(SubspaceLabel label) {
  switch (label) {
    case SubspaceLabel::full: return "full";
    case SubspaceLabel::hat_h1: return "hat_h1";
    case SubspaceLabel::hat_hk: return "hat_hk";
    case SubspaceLabel::mean_zero_complement: return "mean_zero_complement";
    case SubspaceLabel::custom: return "custom";
  }
  return "custom";
}

}  // namespace

Vector SubspaceBasis::coordinates_of(const Vector& ambient_vec) const {
  if (ambient_vec.size() != ambient_dim) throw DimensionMismatch("coordinates_of: ambient size mismatch");
  if (!coordinates.empty()) {
    Vector c(dim());
    for (Eigen::Index i = 0; i < dim(); ++i) c[i] = ambient_vec[coordinates[static_cast<std::size_t>(i)]];
    return c;
  }
  return columns.adjoint() * ambient_vec;
}

Vector SubspaceBasis::ambient(const Vector& coords) const {
  if (coords.size() != dim()) throw DimensionMismatch("ambient: coordinate size mismatch");
  if (!coordinates.empty()) {
    Vector a = Vector::Zero(ambient_dim);
    for (Eigen::Index i = 0; i < dim(); ++i) a[coordinates[static_cast<std::size_t>(i)]] = coords[i];
    return a;
  }
  return columns * coords;
}

// ---------------------------------------------------------------- dense grid operators

Matrix partial_matrix(const Torus& torus, int axis) {
  if (axis < 0 || axis >= torus.dim_n()) throw InvalidArgument("partial_matrix: axis out of range");
  const int n_pts = torus.points_per_axis();
  const Matrix d1 = spectral_derivative_1d(n_pts, torus.period());
  if (torus.dim_n() == 1) return d1;
  const Eigen::Index total = torus.point_count();
  Matrix d = Matrix::Zero(total, total);
  for (int a = 0; a < n_pts; ++a)
    for (int b = 0; b < n_pts; ++b)
      for (int c = 0; c < n_pts; ++c) {
        if (axis == 0)
          d(a * n_pts + c, b * n_pts + c) = d1(a, b);
        else
          d(c * n_pts + a, c * n_pts + b) = d1(a, b);
      }
  return d;
}

Matrix pointwise_matrix(const Torus& torus, const Matrix& lambda_op) {
  return pointwise_matrix(torus, repeat(torus, lambda_op));
}

Matrix pointwise_matrix(const Torus& torus, const std::vector<Matrix>& per_point) {
  const int m = torus.lambda_dim();
  if (static_cast<int>(per_point.size()) != torus.point_count())
    throw DimensionMismatch("pointwise_matrix: one map per grid point required");
  Matrix out = Matrix::Zero(torus.field_dim(), torus.field_dim());
  for (int p = 0; p < torus.point_count(); ++p) {
    if (per_point[p].rows() != m || per_point[p].cols() != m)
      throw DimensionMismatch("pointwise_matrix: map has wrong size");
    out.block(p * m, p * m, m, m) = per_point[p];
  }
  return out;
}

Matrix first_order_matrix(const Torus& torus, const std::vector<std::vector<Matrix>>& left,
                          const std::vector<Matrix>& right) {
  const int m = torus.lambda_dim();
  const int pts = torus.point_count();
  if (static_cast<int>(left.size()) != torus.dim_n()) throw DimensionMismatch("first_order_matrix: one axis per term");
  if (!right.empty() && static_cast<int>(right.size()) != pts)
    throw DimensionMismatch("first_order_matrix: right factor needs one map per point");
  const Matrix id = Matrix::Identity(m, m);
  Matrix out = Matrix::Zero(torus.field_dim(), torus.field_dim());
  Matrix y_mat(torus.field_dim(), torus.field_dim());
  for (int axis = 0; axis < torus.dim_n(); ++axis) {
    if (static_cast<int>(left[axis].size()) != pts) throw DimensionMismatch("first_order_matrix: left factor size");
    const Matrix d = partial_matrix(torus, axis);
    for (int y = 0; y < pts; ++y) {
      const Matrix& r = right.empty() ? id : right[y];
      for (int x = 0; x < pts; ++x) {
        if (d(x, y) == Complex(0.0))
          y_mat.block(x * m, y * m, m, m).setZero();
        else
          y_mat.block(x * m, y * m, m, m) = d(x, y) * r;
      }
    }
    for (int x = 0; x < pts; ++x) out.middleRows(x * m, m).noalias() += left[axis][x] * y_mat.middleRows(x * m, m);
  }
  return out;
}

Matrix d_matrix(const Torus& torus) {
  std::vector<std::vector<Matrix>> left;
  for (int j = 1; j <= torus.dim_n(); ++j) left.push_back(repeat(torus, basis_wedge(torus.dim_n(), j)));
  return first_order_matrix(torus, left, {});
}

Matrix d_star_matrix(const Torus& torus) {
  std::vector<std::vector<Matrix>> left;
  for (int j = 1; j <= torus.dim_n(); ++j) left.push_back(repeat(torus, Matrix(-basis_hook(torus.dim_n(), j))));
  return first_order_matrix(torus, left, {});
}

Matrix underline_d_matrix(const Torus& torus) {
  const Matrix im = kI * m_matrix(torus.dim_n());
  std::vector<std::vector<Matrix>> left;
  for (int j = 1; j <= torus.dim_n(); ++j) left.push_back(repeat(torus, Matrix(im * basis_wedge(torus.dim_n(), j))));
  return first_order_matrix(torus, left, {});
}

Matrix underline_d_star_matrix(const CoefficientField& b) {
  const Torus& t = b.torus();
  const Matrix im = kI * m_matrix(t.dim_n());
  const std::vector<Matrix> inv = inverse_maps(b);
  std::vector<std::vector<Matrix>> left;
  for (int j = 1; j <= t.dim_n(); ++j) {
    const Matrix h = -im * basis_hook(t.dim_n(), j);
    std::vector<Matrix> lj;
    lj.reserve(inv.size());
    for (const Matrix& bi : inv) lj.push_back(bi * h);
    left.push_back(std::move(lj));
  }
  return first_order_matrix(t, left, b.maps());
}

// ---------------------------------------------------------------- structured operators

OperatorMatrix assemble_N(const Torus& torus) {
  return {pointwise_matrix(torus, reflection_matrix(torus.dim_n())), "full"};
}

namespace {

std::vector<Matrix> mb_inverse_maps(const CoefficientField& b) {
  const int n = b.torus().dim_n();
  const Matrix n_plus = tangential_projector(n);
  const Matrix n_minus = normal_projector(n);
  std::vector<Matrix> out;
  out.reserve(b.maps().size());
  for (int p = 0; p < b.torus().point_count(); ++p) {
    const Matrix mb = n_plus - b.inverse_at(p) * n_minus * b.at(p);
    out.push_back(invert_at_point(mb, p, "M_B"));
  }
  return out;
}

}  // namespace

OperatorMatrix assemble_MB(const CoefficientField& b) {
  const int n = b.torus().dim_n();
  const Matrix n_plus = tangential_projector(n);
  const Matrix n_minus = normal_projector(n);
  std::vector<Matrix> maps;
  maps.reserve(b.maps().size());
  for (int p = 0; p < b.torus().point_count(); ++p) {
    Matrix mb = n_plus - b.inverse_at(p) * n_minus * b.at(p);
    invert_at_point(mb, p, "M_B");
    maps.push_back(std::move(mb));
  }
  return {pointwise_matrix(b.torus(), maps), "full"};
}

OperatorMatrix assemble_TB(const CoefficientField& b) {
  const Torus& t = b.torus();
  const int n = t.dim_n();
  const Matrix m = m_matrix(n);
  const std::vector<Matrix> mb_inv = mb_inverse_maps(b);
  std::vector<std::vector<Matrix>> exterior(n), interior(n);
  for (int j = 1; j <= n; ++j) {
    const Matrix mw = m * basis_wedge(n, j);
    const Matrix mh = -m * basis_hook(n, j);
    for (int p = 0; p < t.point_count(); ++p) {
      exterior[j - 1].push_back(mb_inv[p] * mw);
      interior[j - 1].push_back(mb_inv[p] * b.inverse_at(p) * mh);
    }
  }
  Matrix entries = first_order_matrix(t, exterior, {});
  entries += first_order_matrix(t, interior, b.maps());
  return {std::move(entries), "full"};
}

OperatorMatrix assemble_gamma(const Torus& torus) {
  const int n = torus.dim_n();
  const Matrix nm = reflection_matrix(n) * m_matrix(n);
  std::vector<std::vector<Matrix>> left;
  for (int j = 1; j <= n; ++j) left.push_back(repeat(torus, Matrix(nm * basis_wedge(n, j))));
  return {first_order_matrix(torus, left, {}), "full"};
}

ReflectionPair assemble_NB(const CoefficientField& b) {
  const int n = b.torus().dim_n();
  const Matrix mu = mu_matrix(n);
  const Matrix mu_s = mu_star_matrix(n);
  std::vector<Matrix> plus, minus;
  for (int p = 0; p < b.torus().point_count(); ++p) {
    const Matrix mu_s_b = b.inverse_at(p) * mu_s * b.at(p);
    const Matrix inv = invert_at_point(mu + mu_s_b, p, "mu + mu*_B");
    plus.push_back(mu_s_b * inv);
    minus.push_back(mu * inv);
  }
  OperatorMatrix pl{pointwise_matrix(b.torus(), plus), "full"};
  OperatorMatrix mi{pointwise_matrix(b.torus(), minus), "full"};
  OperatorMatrix refl{pl.entries - mi.entries, "full"};
  return {std::move(pl), std::move(mi), std::move(refl)};
}

ReflectionPair assemble_NB_hut(const CoefficientField& b) {
  const int n = b.torus().dim_n();
  const Matrix mu = mu_matrix(n);
  const Matrix mu_s = mu_star_matrix(n);
  std::vector<Matrix> plus, minus;
  for (int p = 0; p < b.torus().point_count(); ++p) {
    const Matrix mu_b = b.inverse_at(p) * mu * b.at(p);
    const Matrix inv = invert_at_point(mu_b + mu_s, p, "mu_B + mu*");
    plus.push_back(mu_s * inv);
    minus.push_back(mu_b * inv);
  }
  OperatorMatrix pl{pointwise_matrix(b.torus(), plus), "full"};
  OperatorMatrix mi{pointwise_matrix(b.torus(), minus), "full"};
  OperatorMatrix refl{pl.entries - mi.entries, "full"};
  return {std::move(pl), std::move(mi), std::move(refl)};
}

// ---------------------------------------------------------------- duality

std::vector<Matrix> duality_weight(const CoefficientField& b) {
  const int n = b.torus().dim_n();
  const Matrix n_plus = tangential_projector(n);
  const Matrix n_minus = normal_projector(n);
  std::vector<Matrix> w;
  w.reserve(b.maps().size());
  for (const Matrix& bp : b.maps()) w.push_back(bp * n_plus - n_minus * bp);
  return w;
}

Complex duality_pairing(const Field& f, const Field& g, const CoefficientField& b) {
  if (!(f.torus() == g.torus()) || !(f.torus() == b.torus())) throw DimensionMismatch("duality_pairing: torus mismatch");
  const int m = f.torus().lambda_dim();
  const std::vector<Matrix> w = duality_weight(b);
  Complex acc = 0.0;
  for (int p = 0; p < f.torus().point_count(); ++p)
    acc += g.data().segment(p * m, m).dot(w[p] * f.data().segment(p * m, m));
  return f.torus().cell_weight() * acc;
}

OperatorMatrix adjoint_in_duality(const OperatorMatrix& op, const CoefficientField& b) {
  if (op.dim() != b.torus().field_dim()) throw DimensionMismatch("adjoint_in_duality: operator must act on full space");
  const std::vector<Matrix> w = duality_weight(b);
  std::vector<Matrix> w_adj, w_inv_adj;
  for (std::size_t p = 0; p < w.size(); ++p) {
    w_adj.push_back(w[p].adjoint());
    w_inv_adj.push_back(invert_at_point(w[p], static_cast<int>(p), "duality weight").adjoint());
  }
  Matrix out = op.entries.adjoint();
  right_blockdiag(out, w_adj);
  left_blockdiag(w_inv_adj, out);
  return {std::move(out), op.basis_tag};
}

// ---------------------------------------------------------------- subspaces

SubspaceBasis full_basis(const Torus& torus) {
  SubspaceBasis basis;
  basis.ambient_dim = torus.field_dim();
  basis.columns = Matrix::Identity(basis.ambient_dim, basis.ambient_dim);
  basis.label = SubspaceLabel::full;
  basis.tag = "full";
  basis.coordinates.resize(static_cast<std::size_t>(basis.ambient_dim));
  for (Eigen::Index i = 0; i < basis.ambient_dim; ++i) basis.coordinates[static_cast<std::size_t>(i)] = i;
  const int m = torus.lambda_dim();
  basis.constant_modes = Matrix::Zero(basis.ambient_dim, m);
  const double c = 1.0 / std::sqrt(static_cast<double>(torus.point_count()));
  for (int p = 0; p < torus.point_count(); ++p)
    for (int s = 0; s < m; ++s) basis.constant_modes(p * m + s, s) = c;
  return basis;
}

SubspaceBasis hat_h1_basis(const Torus& torus) {
  const int m = torus.lambda_dim();
  const int pts = torus.point_count();
  SubspaceBasis basis;
  basis.ambient_dim = torus.field_dim();
  basis.label = SubspaceLabel::hat_h1;
  basis.tag = "hat_h1";
  const double c = 1.0 / std::sqrt(static_cast<double>(pts));
  if (torus.dim_n() == 1) {
    basis.columns = Matrix::Zero(basis.ambient_dim, 2 * pts);
    basis.constant_modes = Matrix::Zero(2 * pts, 2);
    for (int p = 0; p < pts; ++p)
      for (int s = 0; s < 2; ++s) {
        const Eigen::Index row = static_cast<Eigen::Index>(p) * m + (1 << s);
        basis.columns(row, 2 * p + s) = 1.0;
        basis.coordinates.push_back(row);
        basis.constant_modes(2 * p + s, s) = c;
      }
    return basis;
  }
  // n = 2: Fourier columns {e_0, xi/|xi|} per nonzero mode, {e_0, e_1, e_2} at xi = 0.
  basis.columns = Matrix::Zero(basis.ambient_dim, 2 * pts + 1);
  basis.constant_modes = Matrix::Zero(2 * pts + 1, 3);
  Eigen::Index col = 0;
  for (int q = 0; q < pts; ++q) {
    const double xi0 = torus.frequency(q, 0);
    const double xi1 = torus.frequency(q, 1);
    const double norm_xi = std::hypot(xi0, xi1);
    std::vector<Eigen::Vector3d> directions;
    if (norm_xi == 0.0) {
      directions = {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()};
      for (int s = 0; s < 3; ++s) basis.constant_modes(col + s, s) = 1.0;
    } else {
      directions = {Eigen::Vector3d::UnitX(), Eigen::Vector3d(0.0, xi0 / norm_xi, xi1 / norm_xi)};
    }
    for (const auto& v : directions) {
      for (int p = 0; p < pts; ++p) {
        const Complex phase = c * std::polar(1.0, xi0 * torus.coordinate(p, 0) + xi1 * torus.coordinate(p, 1));
        for (int s = 0; s < 3; ++s)
          if (v[s] != 0.0) basis.columns(static_cast<Eigen::Index>(p) * m + (1 << s), col) = phase * v[s];
      }
      ++col;
    }
  }
  return basis;
}

SubspaceBasis hat_hk_basis(const CoefficientField& b, int k) {
  const Torus& t = b.torus();
  const int n = t.dim_n();
  if (k < 0 || k > n + 1) throw InvalidArgument("hat_hk_basis: degree out of range");
  const int m = t.lambda_dim();
  const int pts = t.point_count();
  const Matrix p_tan = tangential_projector(n);
  const Matrix p_nor = normal_projector(n);

  std::vector<std::vector<Matrix>> ext(n), inn(n);
  std::vector<Matrix> right;
  for (int p = 0; p < pts; ++p) right.push_back(p_nor * b.at(p));
  for (int j = 1; j <= n; ++j) {
    ext[j - 1] = repeat(t, Matrix(basis_wedge(n, j) * p_tan));
    inn[j - 1] = repeat(t, Matrix(-basis_hook(n, j)));
  }
  const Matrix c_ext = first_order_matrix(t, ext, {});
  const Matrix c_int = first_order_matrix(t, inn, right);

  auto coords_of_degree = [&](int deg) {
    std::vector<Eigen::Index> idx;
    if (deg < 0 || deg > n + 1) return idx;
    for (int p = 0; p < pts; ++p)
      for (BasisIndex s : degree_masks(n, deg)) idx.push_back(static_cast<Eigen::Index>(p) * m + s.bits());
    return idx;
  };
  const auto cols = coords_of_degree(k);
  const auto rows_ext = coords_of_degree(k + 1);
  const auto rows_int = coords_of_degree(k - 1);
  const Eigen::Index nc = static_cast<Eigen::Index>(cols.size());
  Matrix stacked(static_cast<Eigen::Index>(rows_ext.size() + rows_int.size()), nc);
  for (Eigen::Index c = 0; c < nc; ++c) {
    Eigen::Index r = 0;
    for (Eigen::Index row : rows_ext) stacked(r++, c) = c_ext(row, cols[static_cast<std::size_t>(c)]);
    for (Eigen::Index row : rows_int) stacked(r++, c) = c_int(row, cols[static_cast<std::size_t>(c)]);
  }
  const Matrix null = linalg::null_space(stacked, 1e-10);
  if (null.cols() == 0) throw NumericalFailure("hat_hk_basis: constrained subspace is empty");

  SubspaceBasis basis;
  basis.ambient_dim = t.field_dim();
  basis.label = SubspaceLabel::hat_hk;
  basis.tag = "hat_h" + std::to_string(k);
  basis.columns = Matrix::Zero(basis.ambient_dim, null.cols());
  for (Eigen::Index c = 0; c < nc; ++c) basis.columns.row(cols[static_cast<std::size_t>(c)]) = null.row(c);

  // Constant degree-k fields that satisfy both constraints.
  const double w = 1.0 / std::sqrt(static_cast<double>(pts));
  const auto masks = degree_masks(n, k);
  Matrix consts = Matrix::Zero(basis.ambient_dim, static_cast<Eigen::Index>(masks.size()));
  for (std::size_t s = 0; s < masks.size(); ++s)
    for (int p = 0; p < pts; ++p) consts(static_cast<Eigen::Index>(p) * m + masks[s].bits(), s) = w;
  const Matrix coords = basis.columns.adjoint() * consts;
  const Matrix resid = consts - basis.columns * coords;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index s = 0; s < consts.cols(); ++s)
    if (resid.col(s).norm() < 1e-8) keep.push_back(s);
  basis.constant_modes = Matrix(basis.dim(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) basis.constant_modes.col(static_cast<Eigen::Index>(i)) = coords.col(keep[i]);
  if (basis.constant_modes.cols() > 0)
    basis.constant_modes = linalg::orthonormal_range(basis.constant_modes, 1e-10);
  return basis;
}

SubspaceBasis complement_in(const SubspaceBasis& basis, const Matrix& directions, SubspaceLabel label,
                            const std::string& tag) {
  if (directions.rows() != basis.dim()) throw DimensionMismatch("complement_in: directions must be subspace coordinates");
  Matrix q = directions.cols() > 0 ? linalg::orthonormal_range(directions, 1e-12) : Matrix(basis.dim(), 0);
  Matrix proj = Matrix::Identity(basis.dim(), basis.dim()) - q * q.adjoint();
  const Matrix inner = linalg::orthonormal_range(proj, 1e-10);
  SubspaceBasis out;
  out.ambient_dim = basis.ambient_dim;
  out.columns = basis.columns * inner;
  out.label = label;
  out.tag = tag.empty() ? label_tag(label) : tag;
  out.constant_modes = Matrix(out.dim(), 0);
  return out;
}

SubspaceBasis custom_basis(const Matrix& ambient_columns, const std::string& tag) {
  SubspaceBasis out;
  out.ambient_dim = ambient_columns.rows();
  out.columns = linalg::orthonormal_range(ambient_columns, 1e-12);
  if (out.columns.cols() == 0) throw NumericalFailure("custom_basis: columns span the zero subspace");
  out.label = SubspaceLabel::custom;
  out.tag = tag.empty() ? "custom" : tag;
  out.constant_modes = Matrix(out.dim(), 0);
  return out;
}

Restriction restrict_with_defect(const OperatorMatrix& op, const SubspaceBasis& basis, double tol) {
  check_same_dim(op, basis);
  Matrix restricted;
  double residual = 0.0;
  double total = 0.0;
  if (!basis.coordinates.empty()) {
    const Eigen::Index k = basis.dim();
    Matrix op_c(op.dim(), k);
    for (Eigen::Index j = 0; j < k; ++j) op_c.col(j) = op.entries.col(basis.coordinates[static_cast<std::size_t>(j)]);
    restricted.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i) restricted.row(i) = op_c.row(basis.coordinates[static_cast<std::size_t>(i)]);
    total = op_c.squaredNorm();
    residual = std::max(0.0, total - restricted.squaredNorm());
  } else {
    const Matrix op_c = op.entries * basis.columns;
    restricted = basis.columns.adjoint() * op_c;
    total = op_c.squaredNorm();
    residual = (op_c - basis.columns * restricted).squaredNorm();
  }
  // Operators that annihilate the subspace up to roundoff count as invariant.
  const double floor = 1e-12 * op.entries.norm();
  const double defect = std::sqrt(total) <= floor ? 0.0 : std::sqrt(residual / total);
  if (!(defect <= tol))
    throw SubspaceInvarianceError("operator does not preserve subspace " + basis.tag + " (defect " +
                                      std::to_string(defect) + ")",
                                  defect);
  return {{std::move(restricted), basis.tag}, defect};
}

OperatorMatrix restrict(const OperatorMatrix& op, const SubspaceBasis& basis, double tol) {
  return restrict_with_defect(op, basis, tol).op;
}

OperatorMatrix compress(const Matrix& op, const SubspaceBasis& basis) {
  if (op.rows() != basis.ambient_dim || op.cols() != basis.ambient_dim)
    throw DimensionMismatch("compress: basis ambient dimension does not match operator");
  return {basis.columns.adjoint() * op * basis.columns, basis.tag};
}

HodgeSplitting hodge_splitting(const CoefficientField& b) {
  const Matrix range = linalg::orthonormal_range(underline_d_matrix(b.torus()), 1e-10);
  const Matrix null = linalg::null_space(underline_d_star_matrix(b), 1e-10);
  if (range.cols() + null.cols() != range.rows())
    throw NumericalFailure("hodge_splitting: dimensions of R(d) and N(d*_B) do not add up");
  Matrix frame(range.rows(), range.rows());
  frame << range, null;
  const Matrix coeffs = linalg::checked_inverse(frame, 1e-12);
  HodgeSplitting out;
  out.range_dim = range.cols();
  out.null_dim = null.cols();
  out.range_projection_norm = linalg::spectral_norm(coeffs.topRows(range.cols()));
  out.null_projection_norm = linalg::spectral_norm(coeffs.bottomRows(null.cols()));
  out.constant = out.range_projection_norm + out.null_projection_norm;
  return out;
}

}  // namespace diracbvp
