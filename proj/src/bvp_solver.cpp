#include "diracbvp/bvp_solver.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "diracbvp/errors.hpp"
#include "diracbvp/linalg.hpp"

namespace diracbvp {

namespace {

constexpr BasisIndex kNormal{1u};

BasisIndex tangent(int axis) { return BasisIndex(1u << (axis + 1)); }

void require_torus(const BoundaryOperators& ops, const Torus& t, const char* what) {
  if (!(ops.torus() == t)) throw DimensionMismatch(fmt::format("{}: data grid differs from operator grid", what));
}

void require_degree_one(const BoundaryOperators& ops, const char* what) {
  if (ops.degree() != 1) throw InvalidArgument(fmt::format("{}: needs the degree-one boundary space", what));
}

double relative(double num, double den) { return den > 0.0 ? num / den : num; }

Matrix ambient_columns(const SubspaceBasis& basis, const Matrix& coords) {
  if (basis.coordinates.empty()) return basis.columns * coords;
  Matrix out = Matrix::Zero(basis.ambient_dim, coords.cols());
  for (Eigen::Index i = 0; i < basis.dim(); ++i) out.row(basis.coordinates[static_cast<std::size_t>(i)]) = coords.row(i);
  return out;
}

enum class TraceRows { conormal, tangential, normal };

/// Boundary trace rows of coordinate columns: conormal (B f)_0, tangential f_j, or normal f_0.
Matrix trace_rows(const BoundaryOperators& ops, const Matrix& coords, TraceRows kind) {
  const Torus& t = ops.torus();
  const int ld = t.lambda_dim();
  const int n = t.dim_n();
  const Matrix amb = ambient_columns(ops.basis(), coords);
  const int per_point = kind == TraceRows::tangential ? n : 1;
  Matrix out(static_cast<Eigen::Index>(t.point_count()) * per_point, coords.cols());
  for (int p = 0; p < t.point_count(); ++p) {
    const auto block = amb.middleRows(static_cast<Eigen::Index>(p) * ld, ld);
    switch (kind) {
      case TraceRows::conormal:
        out.row(p) = ops.coefficient().at(p).row(kNormal.bits()) * block;
        break;
      case TraceRows::normal:
        out.row(p) = block.row(kNormal.bits());
        break;
      case TraceRows::tangential:
        for (int j = 0; j < n; ++j) out.row(static_cast<Eigen::Index>(p) * n + j) = block.row(tangent(j).bits());
        break;
    }
  }
  return out;
}

Vector tangential_data(const Field& g) {
  const Torus& t = g.torus();
  const int n = t.dim_n();
  Vector out(static_cast<Eigen::Index>(t.point_count()) * n);
  for (int p = 0; p < t.point_count(); ++p)
    for (int j = 0; j < n; ++j) out[static_cast<Eigen::Index>(p) * n + j] = g.coeff(p, tangent(j));
  return out;
}

Field normal_field(const Torus& t, const Vector& values) {
  Field f(t);
  for (int p = 0; p < t.point_count(); ++p) f.coeff(p, kNormal) = values[p];
  return f;
}

Field tangential_field(const Torus& t, const Vector& stacked) {
  Field f(t);
  const int n = t.dim_n();
  for (int p = 0; p < t.point_count(); ++p)
    for (int j = 0; j < n; ++j) f.coeff(p, tangent(j)) = stacked[static_cast<Eigen::Index>(p) * n + j];
  return f;
}

Vector checked_boundary_solve(const Matrix& k, const Vector& rhs, const std::string& name, SolveReport& report,
                              double cap) {
  const double cond = condition_number(k);
  report.condition_numbers.emplace_back(name, cond);
  if (!(cond <= cap))
    throw WellPosednessFailure(fmt::format("boundary operator {} has condition number {:.3e}", name, cond), cond);
  return linalg::checked_solve(k, rhs, 0.0);
}

std::vector<double> report_sample_times(const SolutionField& sol) {
  const auto& ts = sol.t_samples();
  std::vector<double> picks;
  if (ts.empty()) return picks;
  for (double q : {0.1, 0.3, 0.5, 0.7})
    picks.push_back(ts[static_cast<std::size_t>(q * static_cast<double>(ts.size() - 1))]);
  return picks;
}

Solution finish(const BoundaryOperatorsPtr& ops, Vector trace, SolveReport report) {
  SolutionField field(ops, std::move(trace), +1, default_t_samples(*ops));
  const Vector& f = field.trace();
  const double fn = f.norm();
  report.hardy_residual = relative((ops->hardy_plus() * f - f).norm(), fn);
  report.invariance_defect = ops->invariance_defect();
  report.norms = all_norms(field);
  if (report.hardy_residual > ops->options().hardy_tol) report.flags.push_back("hardy_residual_above_tolerance");
  if (report.boundary_residual > ops->options().residual_tol) report.flags.push_back("boundary_residual_above_tolerance");
  if (report.projection_loss > 1e-8) report.flags.push_back("data_projected");
  return {std::move(field), std::move(report)};
}

}  // namespace

std::string to_string(BvpKind kind) {
  switch (kind) {
    case BvpKind::neumann: return "neumann";
    case BvpKind::regularity: return "regularity";
    case BvpKind::neu_perp: return "neu_perp";
    case BvpKind::dirichlet: return "dirichlet";
    case BvpKind::transmission: return "transmission";
  }
  return "unknown";
}

BvpKind parse_bvp_kind(const std::string& name) {
  for (BvpKind k : {BvpKind::neumann, BvpKind::regularity, BvpKind::neu_perp, BvpKind::dirichlet, BvpKind::transmission})
    if (to_string(k) == name) return k;
  throw InvalidArgument("unknown problem kind '" + name + "'");
}

BoundaryData BoundaryData::neumann(const ScalarField& phi) {
  BoundaryData d(phi.torus());
  d.kind = BvpKind::neumann;
  d.scalar = phi;
  return d;
}

BoundaryData BoundaryData::neu_perp(const ScalarField& phi) {
  BoundaryData d = neumann(phi);
  d.kind = BvpKind::neu_perp;
  return d;
}

BoundaryData BoundaryData::dirichlet(const ScalarField& u) {
  BoundaryData d = neumann(u);
  d.kind = BvpKind::dirichlet;
  return d;
}

BoundaryData BoundaryData::regularity(const Field& grad_psi) {
  const Torus& t = grad_psi.torus();
  const int n = t.dim_n();
  const double scale = grad_psi.data().norm();
  Field tangential = tangential_field(t, tangential_data(grad_psi));
  if ((grad_psi.data() - tangential.data()).norm() > 1e-12 * scale)
    throw InvalidArgument("regularity data must be a tangential vector field");
  if (n == 2) {
    ScalarField g1(t), g2(t);
    for (int p = 0; p < t.point_count(); ++p) {
      g1.values()[p] = grad_psi.coeff(p, tangent(0));
      g2.values()[p] = grad_psi.coeff(p, tangent(1));
    }
    const double curl = (partial(g2, 0).values() - partial(g1, 1).values()).norm();
    const double grad = partial(g1, 0).values().norm() + partial(g2, 1).values().norm() + curl;
    if (curl > 1e-10 * grad) throw InvalidArgument("regularity data must be a tangential gradient (non-zero curl)");
  }
  BoundaryData d(t);
  d.kind = BvpKind::regularity;
  d.field = grad_psi;
  return d;
}

BoundaryData BoundaryData::regularity_from_potential(const ScalarField& psi) {
  const Torus& t = psi.torus();
  Field g(t);
  for (int j = 0; j < t.dim_n(); ++j) {
    const ScalarField dj = partial(psi, j);
    for (int p = 0; p < t.point_count(); ++p) g.coeff(p, tangent(j)) = dj.values()[p];
  }
  return regularity(g);
}

BoundaryData BoundaryData::transmission(const Field& g, int degree, Complex alpha_plus, Complex alpha_minus) {
  if (alpha_plus == alpha_minus) throw InvalidArgument("transmission: alpha+ and alpha- must differ");
  if (degree < 0 || degree > g.torus().dim_n() + 1) throw InvalidArgument("transmission: degree out of range");
  BoundaryData d(g.torus());
  d.kind = BvpKind::transmission;
  d.field = g;
  d.degree = degree;
  d.alpha_plus = alpha_plus;
  d.alpha_minus = alpha_minus;
  return d;
}

BoundaryOperators::BoundaryOperators(const CoefficientField& b, int degree, BvpOptions options)
    : b_(b), degree_(degree), options_(options) {
  if (!b.is_invertible()) (void)b.inverse_at(0);  // raises SingularOperator with the offending point
  if (!b.is_accretive()) throw InvalidArgument("coefficient is not accretive");
  basis_ = degree == 1 ? hat_h1_basis(b.torus()) : hat_hk_basis(b, degree);
  if (basis_.dim() == 0) throw InvalidArgument(fmt::format("boundary space of degree {} is trivial", degree));
  const Restriction r = restrict_with_defect(assemble_TB(b), basis_, options_.invariance_tol);
  t_ = r.op;
  defect_ = r.defect;
  dec_ = std::make_unique<SpectralDecomposition>(t_, SectorConstants::of(b), options_.decomposition);
  e_ = apply_function(*dec_, FunctionDescriptor::sgn()).entries;
  e_plus_ = apply_function(*dec_, FunctionDescriptor::chi_plus()).entries;
  e_minus_ = apply_function(*dec_, FunctionDescriptor::chi_minus()).entries;
  n_b_ = restrict(assemble_NB(b).reflection, basis_, options_.invariance_tol).entries;
  // N preserves the degree-one space; for other degrees it is only compressed.
  const OperatorMatrix n_full = assemble_N(b.torus());
  n_ = degree == 1 ? restrict(n_full, basis_, options_.invariance_tol).entries : compress(n_full.entries, basis_).entries;
}

BoundaryOperatorsPtr make_boundary_operators(const CoefficientField& b, int degree, BvpOptions options) {
  return std::make_shared<const BoundaryOperators>(b, degree, options);
}

Matrix BoundaryOperators::hardy_eigenvectors(int side) const {
  std::vector<Eigen::Index> cols;
  const Vector& lam = dec_->eigenvalues();
  for (Eigen::Index j = 0; j < lam.size(); ++j) {
    if (dec_->kernel_mask()[static_cast<std::size_t>(j)]) continue;
    if ((lam[j].real() > 0.0) == (side > 0)) cols.push_back(j);
  }
  Matrix out(dec_->dim(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = dec_->eigenvectors().col(cols[k]);
  return out;
}

Vector BoundaryOperators::semigroup(double t, const Vector& v) const {
  if (t < 0.0) throw InvalidArgument("semigroup: t must be non-negative");
  return apply_function(*dec_, FunctionDescriptor::exp_minus_t_abs(t), v);
}

Vector BoundaryOperators::abs_generator(const Vector& v) const {
  return apply_function(*dec_, FunctionDescriptor::abs_power(1.0), v);
}

Field BoundaryOperators::to_field(const Vector& coords) const { return Field(torus(), basis_.ambient(coords)); }

Vector BoundaryOperators::to_coords(const Field& f) const {
  require_torus(*this, f.torus(), "to_coords");
  return basis_.coordinates_of(f.data());
}

double BoundaryOperators::field_norm(const Vector& coords) const {
  return std::sqrt(torus().cell_weight()) * coords.norm();
}

SolutionField::SolutionField(BoundaryOperatorsPtr ops, Vector trace, int side, std::vector<double> t_samples)
    : ops_(std::move(ops)), trace_(std::move(trace)), side_(side >= 0 ? 1 : -1), t_(std::move(t_samples)) {
  if (!ops_) throw InvalidArgument("SolutionField: missing operators");
  if (trace_.size() != ops_->basis().dim()) throw DimensionMismatch("SolutionField: trace size mismatch");
}

Vector SolutionField::at(double t) const { return ops_->semigroup(t, trace_); }

Vector SolutionField::distance_derivative(double t) const { return -ops_->abs_generator(at(t)); }

std::vector<double> default_t_samples(const BoundaryOperators& ops) {
  return quadrature_grid(ops.spectral(), ops.options().sampling).t;
}

DataProjection project_attainable(const Matrix& boundary_map_of_hardy, const Vector& data) {
  if (boundary_map_of_hardy.rows() != data.size()) throw DimensionMismatch("project_attainable: size mismatch");
  DataProjection out;
  const double dn = data.norm();
  if (dn == 0.0 || boundary_map_of_hardy.cols() == 0) {
    out.projected = Vector::Zero(data.size());
    out.loss = dn == 0.0 ? 0.0 : 1.0;
    return out;
  }
  const Matrix q = linalg::orthonormal_range(boundary_map_of_hardy, 1e-10);
  out.projected = q * (q.adjoint() * data);
  out.loss = (data - out.projected).norm() / dn;
  return out;
}

Solution solve_neumann(const BoundaryOperatorsPtr& ops, const ScalarField& phi) {
  require_degree_one(*ops, "neumann");
  require_torus(*ops, phi.torus(), "neumann");
  SolveReport report;
  report.kind = BvpKind::neumann;
  report.formula = "f = 2 (E - N_A)^{-1} (phi / a00) e0";
  const Matrix g = trace_rows(*ops, ops->hardy_eigenvectors(+1), TraceRows::conormal);
  const DataProjection proj = project_attainable(g, phi.values());
  report.projection_loss = proj.loss;

  const Torus& t = ops->torus();
  Vector scaled(t.point_count());
  for (int p = 0; p < t.point_count(); ++p) {
    const Complex a00 = ops->coefficient().at(p)(kNormal.bits(), kNormal.bits());
    if (a00 == Complex(0.0)) throw SingularOperator("neumann: vanishing normal-normal coefficient", p);
    scaled[p] = proj.projected[p] / a00;
  }
  const Vector h = ops->to_coords(normal_field(t, scaled));
  const Vector f = 2.0 * checked_boundary_solve(ops->cauchy() - ops->reflection_b(), h, "E-N_A", report,
                                                ops->options().cond_cap);
  const Vector trace = trace_rows(*ops, f, TraceRows::conormal);
  report.boundary_residual = relative((trace - proj.projected).norm(), proj.projected.norm());
  return finish(ops, f, std::move(report));
}

Solution solve_regularity(const BoundaryOperatorsPtr& ops, const Field& grad_psi) {
  require_degree_one(*ops, "regularity");
  require_torus(*ops, grad_psi.torus(), "regularity");
  const BoundaryData checked = BoundaryData::regularity(grad_psi);
  SolveReport report;
  report.kind = BvpKind::regularity;
  report.formula = "f = 2 (E + N)^{-1} grad psi";
  const Matrix g = trace_rows(*ops, ops->hardy_eigenvectors(+1), TraceRows::tangential);
  const DataProjection proj = project_attainable(g, tangential_data(checked.field));
  report.projection_loss = proj.loss;

  const Vector h = ops->to_coords(tangential_field(ops->torus(), proj.projected));
  const Vector f = 2.0 * checked_boundary_solve(ops->cauchy() + ops->reflection(), h, "E+N", report,
                                                ops->options().cond_cap);
  const Vector trace = trace_rows(*ops, f, TraceRows::tangential);
  report.boundary_residual = relative((trace - proj.projected).norm(), proj.projected.norm());
  return finish(ops, f, std::move(report));
}

Solution solve_neu_perp(const BoundaryOperatorsPtr& ops, const ScalarField& phi) {
  require_degree_one(*ops, "neu_perp");
  require_torus(*ops, phi.torus(), "neu_perp");
  SolveReport report;
  report.kind = BvpKind::neu_perp;
  report.formula = "f = 2 (E - N)^{-1} phi e0";
  const Matrix g = trace_rows(*ops, ops->hardy_eigenvectors(+1), TraceRows::normal);
  const DataProjection proj = project_attainable(g, phi.values());
  report.projection_loss = proj.loss;

  const Vector h = ops->to_coords(normal_field(ops->torus(), proj.projected));
  const Vector f = 2.0 * checked_boundary_solve(ops->cauchy() - ops->reflection(), h, "E-N", report,
                                                ops->options().cond_cap);
  const Vector trace = trace_rows(*ops, f, TraceRows::normal);
  report.boundary_residual = relative((trace - proj.projected).norm(), proj.projected.norm());
  return finish(ops, f, std::move(report));
}

Solution solve_dirichlet(const BoundaryOperatorsPtr& ops, const ScalarField& u) {
  Solution sol = solve_neu_perp(ops, u);
  sol.report.kind = BvpKind::dirichlet;
  sol.report.formula = "U_t = (2 e^{-t|T|} (E - N)^{-1} u e0)_0";
  double worst = 0.0;
  for (double t : report_sample_times(sol.field)) worst = std::max(worst, second_order_residual(sol.field, t));
  sol.report.second_order_residual = worst;
  sol.report.extra.emplace_back("triplebar_grad_u", norm_triplebar_gradx(sol.field));
  return sol;
}

TransmissionSolution solve_transmission(const BoundaryOperatorsPtr& ops, const Field& g, Complex alpha_plus,
                                        Complex alpha_minus) {
  require_torus(*ops, g.torus(), "transmission");
  const BoundaryData checked = BoundaryData::transmission(g, ops->degree(), alpha_plus, alpha_minus);
  const SubspaceBasis& basis = ops->basis();
  const Vector coords = basis.coordinates_of(checked.field.data());
  const double gn = checked.field.data().norm();
  const double membership = relative((checked.field.data() - basis.ambient(coords)).norm(), gn);
  if (membership > 1e-8)
    throw InvalidArgument(fmt::format("transmission data leaves the constrained space (residual {:.3e})", membership));

  SolveReport report;
  report.kind = BvpKind::transmission;
  report.formula = "f = 2 ((a+ + a-) E - (a+ - a-) N_B)^{-1} g, f+- = E+- f";
  report.extra.emplace_back("membership_residual", membership);
  const Complex sum = alpha_plus + alpha_minus;
  const Complex diff = alpha_plus - alpha_minus;
  const Complex lambda = sum / diff;
  report.extra.emplace_back("lambda_re", lambda.real());
  report.extra.emplace_back("lambda_im", lambda.imag());
  const bool block = ops->coefficient().is_block(1e-12);
  if (ops->degree() >= 2 && !block) throw InvalidArgument("transmission for degree >= 2 needs a block coefficient");
  if (block) {
    const double margin = std::abs(lambda * lambda + 1.0);
    report.extra.emplace_back("spectral_point_margin", margin);
    if (margin < 1e-10)
      throw WellPosednessFailure(fmt::format("transmission: lambda^2 + 1 = {:.3e} for a block coefficient", margin),
                                 std::numeric_limits<double>::infinity());
  }

  const Eigen::Index r = basis.dim();
  const Matrix id = Matrix::Identity(r, r);
  const Matrix nb_plus = 0.5 * (id + ops->reflection_b());
  const Matrix nb_minus = 0.5 * (id - ops->reflection_b());
  const Matrix yp = ops->hardy_eigenvectors(+1);
  const Matrix ym = ops->hardy_eigenvectors(-1);
  Matrix attain(r, yp.cols() + ym.cols());
  attain << nb_plus * (alpha_minus * yp) + nb_minus * (alpha_plus * yp),
      -(nb_plus * (alpha_plus * ym) + nb_minus * (alpha_minus * ym));
  const DataProjection proj = project_attainable(attain, coords);
  report.projection_loss = proj.loss;

  const Matrix k = sum * ops->cauchy() - diff * ops->reflection_b();
  const Vector f = 2.0 * checked_boundary_solve(k, proj.projected, "(a++a-)E-(a+-a-)N_B", report,
                                                ops->options().cond_cap);
  const Vector fp = ops->hardy_plus() * f;
  const Vector fm = ops->hardy_minus() * f;

  // Jump residuals, pointwise in the ambient space.
  const Torus& t = ops->torus();
  const Vector gp = basis.ambient(proj.projected);
  const Vector ap = basis.ambient(fp), am = basis.ambient(fm);
  const Vector h1 = alpha_minus * ap - alpha_plus * am - gp;
  const Vector h2 = alpha_plus * ap - alpha_minus * am - gp;
  const int n = t.dim_n();
  const Matrix wedge_e0 = wedge_matrix(MultiVector::basis(n, kNormal));
  const Matrix hook_e0 = hook_matrix(MultiVector::basis(n, kNormal));
  const int ld = t.lambda_dim();
  double r1 = 0.0, r2 = 0.0;
  for (int p = 0; p < t.point_count(); ++p) {
    const auto seg1 = h1.segment(static_cast<Eigen::Index>(p) * ld, ld);
    const auto seg2 = h2.segment(static_cast<Eigen::Index>(p) * ld, ld);
    r1 += (wedge_e0 * seg1).squaredNorm();
    r2 += (hook_e0 * (ops->coefficient().at(p) * seg2)).squaredNorm();
  }
  const double gpn = gp.norm();
  report.extra.emplace_back("jump_residual_wedge", relative(std::sqrt(r1), gpn));
  report.extra.emplace_back("jump_residual_hook", relative(std::sqrt(r2), gpn));
  report.boundary_residual = relative(std::sqrt(std::max(r1, r2)), gpn);
  report.hardy_residual = relative((fp + fm - f).norm(), f.norm());
  report.invariance_defect = ops->invariance_defect();
  if (report.boundary_residual > ops->options().residual_tol) report.flags.push_back("boundary_residual_above_tolerance");
  if (report.projection_loss > 1e-8) report.flags.push_back("data_projected");

  const auto samples = default_t_samples(*ops);
  SolutionField upper(ops, fp, +1, samples);
  SolutionField lower(ops, fm, -1, samples);
  report.norms = all_norms(upper);
  const NormSummary below = all_norms(lower);
  report.extra.emplace_back("lower.trace", below.trace);
  report.extra.emplace_back("lower.sup_t", below.sup_t);
  report.extra.emplace_back("lower.triplebar", below.triplebar_dt);
  report.extra.emplace_back("lower.nontangential", below.nontangential);
  return {std::move(upper), std::move(lower), f, std::move(report)};
}

Matrix solution_operator(const BoundaryOperators& ops, BvpKind kind) {
  require_degree_one(ops, "solution_operator");
  const Torus& t = ops.torus();
  const int pts = t.point_count();
  const int n = t.dim_n();
  TraceRows rows = TraceRows::normal;
  Matrix k;
  std::string name;
  switch (kind) {
    case BvpKind::neumann:
      rows = TraceRows::conormal;
      k = ops.cauchy() - ops.reflection_b();
      name = "E-N_A";
      break;
    case BvpKind::regularity:
      rows = TraceRows::tangential;
      k = ops.cauchy() + ops.reflection();
      name = "E+N";
      break;
    case BvpKind::neu_perp:
    case BvpKind::dirichlet:
      k = ops.cauchy() - ops.reflection();
      name = "E-N";
      break;
    case BvpKind::transmission:
      throw InvalidArgument("solution_operator: transmission has no scalar data map");
  }
  const Matrix q = linalg::orthonormal_range(trace_rows(ops, ops.hardy_eigenvectors(+1), rows), 1e-10);
  const Eigen::Index data_dim = rows == TraceRows::tangential ? static_cast<Eigen::Index>(pts) * n : pts;
  Matrix inject(ops.basis().dim(), data_dim);
  for (Eigen::Index j = 0; j < data_dim; ++j) {
    Vector unit = Vector::Zero(data_dim);
    unit[j] = 1.0;
    if (rows == TraceRows::tangential) {
      inject.col(j) = ops.to_coords(tangential_field(t, unit));
    } else {
      if (rows == TraceRows::conormal) unit[j] /= ops.coefficient().at(static_cast<int>(j))(kNormal.bits(), kNormal.bits());
      inject.col(j) = ops.to_coords(normal_field(t, unit));
    }
  }
  const double cond = condition_number(k);
  if (!(cond <= ops.options().cond_cap))
    throw WellPosednessFailure(fmt::format("boundary operator {} has condition number {:.3e}", name, cond), cond);
  const Matrix rhs = inject * (q * q.adjoint());
  return 2.0 * linalg::checked_solve(k, rhs, 0.0);
}

double condition_number(const Matrix& a) { return linalg::cond2(a); }

}  // namespace diracbvp
