#pragma once

#include <string>
#include <vector>

#include "diracbvp/grid_space.hpp"

namespace diracbvp {

/// Dense operator on a (possibly restricted) discrete field space.
struct OperatorMatrix {
  Matrix entries;
  std::string basis_tag = "full";

  Eigen::Index dim() const { return entries.rows(); }
};

enum class SubspaceLabel { full, hat_h1, hat_hk, mean_zero_complement, custom };

/// Orthonormal columns spanning a subspace of the ambient field space.
struct SubspaceBasis {
  Eigen::Index ambient_dim = 0;
  Matrix columns;
  SubspaceLabel label = SubspaceLabel::custom;
  std::string tag;
  /// Ambient coordinate of each column when the basis is a coordinate selection; empty otherwise.
  std::vector<Eigen::Index> coordinates;
  /// Constant-mode directions inside the subspace, in subspace coordinates (orthonormal columns).
  Matrix constant_modes;

  Eigen::Index dim() const { return columns.cols(); }
  /// Subspace coordinates of an ambient vector (orthogonal projection).
  Vector coordinates_of(const Vector& ambient) const;
  Vector ambient(const Vector& coords) const;
};

// Dense matrices of grid operators on the ambient field space (index = point * 2^{n+1} + mask).
Matrix partial_matrix(const Torus& torus, int axis);
Matrix pointwise_matrix(const Torus& torus, const Matrix& lambda_op);
Matrix pointwise_matrix(const Torus& torus, const std::vector<Matrix>& per_point);
/// sum_j L_j(x) d_j R(y): left[j][x] per axis and point, right[y] per point (identity if empty).
Matrix first_order_matrix(const Torus& torus, const std::vector<std::vector<Matrix>>& left,
                          const std::vector<Matrix>& right);
Matrix d_matrix(const Torus& torus);
Matrix d_star_matrix(const Torus& torus);
Matrix underline_d_matrix(const Torus& torus);
Matrix underline_d_star_matrix(const CoefficientField& b);

OperatorMatrix assemble_N(const Torus& torus);
OperatorMatrix assemble_MB(const CoefficientField& b);
OperatorMatrix assemble_TB(const CoefficientField& b);
/// N m d, the nilpotent part of T_B for block coefficients.
OperatorMatrix assemble_gamma(const Torus& torus);

struct ReflectionPair {
  OperatorMatrix plus;
  OperatorMatrix minus;
  OperatorMatrix reflection;  // plus - minus
};
/// Projections for the splitting B^{-1} N+ H + N- H.
ReflectionPair assemble_NB(const CoefficientField& b);
/// Projections for the splitting N+ H + B^{-1} N- H.
ReflectionPair assemble_NB_hut(const CoefficientField& b);

/// Pointwise weight B N+ - N- B of the duality pairing.
std::vector<Matrix> duality_weight(const CoefficientField& b);
Complex duality_pairing(const Field& f, const Field& g, const CoefficientField& b);
/// T' with <T f, g>_B = <f, T' g>_B.
OperatorMatrix adjoint_in_duality(const OperatorMatrix& op, const CoefficientField& b);

SubspaceBasis full_basis(const Torus& torus);
SubspaceBasis hat_h1_basis(const Torus& torus);
SubspaceBasis hat_hk_basis(const CoefficientField& b, int k);
/// Orthogonal complement, inside `basis`, of the given subspace coordinates.
SubspaceBasis complement_in(const SubspaceBasis& basis, const Matrix& directions, SubspaceLabel label,
                            const std::string& tag);
/// Orthonormalizes arbitrary ambient columns.
SubspaceBasis custom_basis(const Matrix& ambient_columns, const std::string& tag);

struct Restriction {
  OperatorMatrix op;
  /// ||(I - P) op P||_F / ||op P||_F; zero when ||op P||_F <= 1e-12 ||op||_F.
  double defect = 0.0;
};
/// columns^H op columns; throws SubspaceInvarianceError when the defect exceeds tol.
Restriction restrict_with_defect(const OperatorMatrix& op, const SubspaceBasis& basis, double tol = 1e-8);
OperatorMatrix restrict(const OperatorMatrix& op, const SubspaceBasis& basis, double tol = 1e-8);
/// Restriction without invariance check (for operators merely compressed to the subspace).
OperatorMatrix compress(const Matrix& op, const SubspaceBasis& basis);

struct HodgeSplitting {
  double range_projection_norm = 0.0;   // projection onto R(underline d)
  double null_projection_norm = 0.0;    // projection onto N(underline d*_B)
  double constant = 0.0;                // sum of the two
  Eigen::Index range_dim = 0;
  Eigen::Index null_dim = 0;
};
HodgeSplitting hodge_splitting(const CoefficientField& b);

}  // namespace diracbvp
