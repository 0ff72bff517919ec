#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "diracbvp/functional_calculus.hpp"

namespace diracbvp {

enum class BvpKind { neumann, regularity, neu_perp, dirichlet, transmission };

std::string to_string(BvpKind kind);
BvpKind parse_bvp_kind(const std::string& name);

/// Boundary data of one problem. Scalar kinds use `scalar`; regularity and transmission use `field`.
struct BoundaryData {
  BvpKind kind = BvpKind::neumann;
  Torus torus;
  ScalarField scalar;
  Field field;
  Complex alpha_plus = 1.0;
  Complex alpha_minus = 0.0;
  int degree = 1;

  static BoundaryData neumann(const ScalarField& phi);
  static BoundaryData neu_perp(const ScalarField& phi);
  static BoundaryData dirichlet(const ScalarField& u);
  /// Tangential gradient field; for n = 2 each Fourier mode must be parallel to its frequency.
  static BoundaryData regularity(const Field& grad_psi);
  static BoundaryData regularity_from_potential(const ScalarField& psi);
  static BoundaryData transmission(const Field& g, int degree, Complex alpha_plus, Complex alpha_minus);

 private:
  explicit BoundaryData(const Torus& t) : torus(t), scalar(t), field(t) {}
};

struct BvpOptions {
  double cond_cap = 1e10;
  double residual_tol = 1e-8;
  double hardy_tol = 1e-9;
  double invariance_tol = 1e-8;
  DecompositionOptions decomposition;
  QuadratureOptions sampling;
};

/// Restricted T_B on the constrained boundary space of degree k with its Cauchy operator and reflections.
class BoundaryOperators {
 public:
  BoundaryOperators(const CoefficientField& b, int degree = 1, BvpOptions options = {});

  const CoefficientField& coefficient() const { return b_; }
  const Torus& torus() const { return b_.torus(); }
  int degree() const { return degree_; }
  const BvpOptions& options() const { return options_; }
  const SubspaceBasis& basis() const { return basis_; }
  const OperatorMatrix& generator() const { return t_; }
  const SpectralDecomposition& spectral() const { return *dec_; }
  double invariance_defect() const { return defect_; }

  const Matrix& cauchy() const { return e_; }         // sgn(T)
  const Matrix& hardy_plus() const { return e_plus_; }
  const Matrix& hardy_minus() const { return e_minus_; }
  const Matrix& reflection_b() const { return n_b_; }  // reflection for B^{-1}N+ H + N- H
  const Matrix& reflection() const { return n_; }      // unperturbed N

  /// Eigenvector coordinates with Re(lambda) > 0 (side = +1) or < 0 (side = -1), kernel excluded.
  Matrix hardy_eigenvectors(int side) const;
  /// e^{-t|T|} v.
  Vector semigroup(double t, const Vector& v) const;
  /// |T| v.
  Vector abs_generator(const Vector& v) const;

  Field to_field(const Vector& coords) const;
  Vector to_coords(const Field& f) const;
  /// Weighted L2 norm of a coordinate vector.
  double field_norm(const Vector& coords) const;

 private:
  CoefficientField b_;
  int degree_;
  BvpOptions options_;
  SubspaceBasis basis_;
  OperatorMatrix t_;
  std::unique_ptr<SpectralDecomposition> dec_;
  double defect_ = 0.0;
  Matrix e_, e_plus_, e_minus_, n_b_, n_;
};

using BoundaryOperatorsPtr = std::shared_ptr<const BoundaryOperators>;
BoundaryOperatorsPtr make_boundary_operators(const CoefficientField& b, int degree = 1, BvpOptions options = {});

/// Trace on one side and its extension t -> F_t = e^{-t|T|} f.
class SolutionField {
 public:
  SolutionField(BoundaryOperatorsPtr ops, Vector trace, int side, std::vector<double> t_samples);

  const BoundaryOperators& operators() const { return *ops_; }
  const Vector& trace() const { return trace_; }
  int side() const { return side_; }
  const std::vector<double>& t_samples() const { return t_; }
  /// F at distance t >= 0 from the boundary on this side.
  Vector at(double t) const;
  /// d/d|t| of F, i.e. -|T| F.
  Vector distance_derivative(double t) const;
  Field field_at(double t) const { return ops_->to_field(at(t)); }

 private:
  BoundaryOperatorsPtr ops_;
  Vector trace_;
  int side_;
  std::vector<double> t_;
};

/// Default t sampling: log grid over the spectral window (same policy as the quadrature).
std::vector<double> default_t_samples(const BoundaryOperators& ops);

struct NormSummary {
  double trace = 0.0;
  double sup_t = 0.0;
  double triplebar_dt = 0.0;
  double nontangential = 0.0;
};

struct SolveReport {
  BvpKind kind = BvpKind::neumann;
  std::string formula;
  std::vector<std::pair<std::string, double>> condition_numbers;
  double boundary_residual = 0.0;
  double hardy_residual = 0.0;
  /// ||data - attainable part|| / ||data||.
  double projection_loss = 0.0;
  double invariance_defect = 0.0;
  std::optional<double> second_order_residual;
  NormSummary norms;
  std::vector<std::pair<std::string, double>> extra;
  std::vector<std::string> flags;

  /// Flat key = value text.
  std::string to_text() const;
};

struct Solution {
  SolutionField field;
  SolveReport report;
};

struct TransmissionSolution {
  SolutionField upper;
  SolutionField lower;
  Vector trace;  // f = f+ + f-
  SolveReport report;
};

Solution solve_neumann(const BoundaryOperatorsPtr& ops, const ScalarField& phi);
Solution solve_regularity(const BoundaryOperatorsPtr& ops, const Field& grad_psi);
Solution solve_neu_perp(const BoundaryOperatorsPtr& ops, const ScalarField& phi);
/// The vector solution of the auxiliary problem; the Dirichlet solution is its normal component.
Solution solve_dirichlet(const BoundaryOperatorsPtr& ops, const ScalarField& u);
TransmissionSolution solve_transmission(const BoundaryOperatorsPtr& ops, const Field& g, Complex alpha_plus,
                                        Complex alpha_minus);

/// Normal component of F_t (the Dirichlet solution U_t) and its derivatives.
ScalarField normal_component(const BoundaryOperators& ops, const Vector& coords);
ScalarField dirichlet_value(const SolutionField& sol, double t);
/// Relative residual of the divergence-form equation for U = (F)_0 at distance t.
double second_order_residual(const SolutionField& sol, double t);

/// Linear map from boundary data samples to trace coordinates, attainable-data projection included.
/// Scalar kinds take point values; regularity takes point-major stacked tangential components.
/// Transmission is not supported. Throws WellPosednessFailure above the condition cap.
Matrix solution_operator(const BoundaryOperators& ops, BvpKind kind);

/// Attainable-data projection used by the solvers, exposed for diagnostics.
struct DataProjection {
  Vector projected;
  double loss = 0.0;
};
DataProjection project_attainable(const Matrix& boundary_map_of_hardy, const Vector& data);

// Norm functionals on a solution field.
double norm_sup_t(const SolutionField& sol);
double norm_triplebar_dt(const SolutionField& sol);
/// (int ||t grad_{t,x} U_t||^2 dt/t)^{1/2} for the normal component U.
double norm_triplebar_gradx(const SolutionField& sol);
double nontangential_max(const SolutionField& sol, double c0 = 0.5, double c1 = 1.0);
NormSummary all_norms(const SolutionField& sol);

struct WellposednessReport {
  std::vector<std::pair<std::string, double>> condition_numbers;
  /// Smallest singular values of N^{+-}_A and N^{+-} restricted to the positive Hardy space.
  std::vector<std::pair<std::string, double>> projection_gaps;
  std::vector<std::string> flags;
  double cauchy_norm = 0.0;

  std::string to_text() const;
};
WellposednessReport wellposedness_report(const BoundaryOperators& ops);
/// Adds lambda - E N_B for transmission.
WellposednessReport wellposedness_report(const BoundaryOperators& ops, Complex lambda);

/// Capped 2-norm condition number (inf when exactly singular).
double condition_number(const Matrix& a);

}  // namespace diracbvp
