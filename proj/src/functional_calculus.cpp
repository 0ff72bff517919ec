#include "diracbvp/functional_calculus.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "diracbvp/errors.hpp"
#include "diracbvp/io.hpp"
#include "diracbvp/linalg.hpp"

namespace diracbvp {

namespace {

constexpr double kImaginaryAxisTol = 1e-12;

Vector symbol_values(const SpectralDecomposition& dec, const FunctionDescriptor& b) {
  Vector values(dec.dim());
  for (Eigen::Index j = 0; j < dec.dim(); ++j)
    values[j] = dec.kernel_mask()[static_cast<std::size_t>(j)] ? b.kernel_value() : b(dec.eigenvalues()[j]);
  return values;
}

std::vector<Eigen::Index> nonkernel_indices(const SpectralDecomposition& dec) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < dec.dim(); ++j)
    if (!dec.kernel_mask()[static_cast<std::size_t>(j)]) idx.push_back(j);
  return idx;
}

Complex quadratic_symbol(QuadraticSymbol kind, Complex s) {
  if (kind == QuadraticSymbol::q) return s / (1.0 + s * s);
  return s * std::exp(-sector_abs(s));
}

}  // namespace

double SectorConstants::omega() const {
  if (!(kappa > 0.0) || !(sup_norm > 0.0)) throw InvalidArgument("sector constants require kappa > 0 and a positive norm");
  return std::acos(std::min(1.0, kappa / (2.0 * sup_norm)));
}

Complex sector_abs(Complex z) {
  if (std::abs(z.real()) <= kImaginaryAxisTol * std::abs(z))
    throw SectorViolation(fmt::format("|z| undefined on the imaginary axis (z = {} + {}i)", z.real(), z.imag()));
  return z.real() > 0.0 ? z : -z;
}

// ---------------------------------------------------------------- decomposition

SpectralDecomposition::SpectralDecomposition(const OperatorMatrix& op, SectorConstants constants,
                                             DecompositionOptions options)
    : options_(options), basis_tag_(op.basis_tag) {
  if (op.entries.rows() != op.entries.cols()) throw DimensionMismatch("decompose: operator must be square");
  if (!op.entries.allFinite()) throw NumericalFailure("decompose: operator has non-finite entries");
  omega_ = constants.omega();
  linalg::Eigensystem es = linalg::eig(op.entries);
  eigenvalues_ = std::move(es.values);
  vectors_ = std::move(es.vectors);
  const Eigen::Index n = eigenvalues_.size();

  Eigen::PartialPivLU<Matrix> lu(vectors_);
  vectors_inv_ = lu.inverse();
  cond_v_ = vectors_inv_.allFinite() ? linalg::cond1(vectors_, vectors_inv_) : std::numeric_limits<double>::infinity();
  if (options_.throw_on_ill_conditioned && !(cond_v_ <= options_.cond_limit))
    throw IllConditionedEigenbasis(fmt::format("eigenvector matrix condition {:.3e} exceeds {:.1e}", cond_v_,
                                               options_.cond_limit),
                                   cond_v_);

  const double op_norm = op.entries.norm();
  if (n > 0 && op_norm > 0.0) {
    const Matrix recon = vectors_ * eigenvalues_.asDiagonal() * vectors_inv_;
    reconstruction_error_ = (recon - op.entries).norm() / op_norm;
    // Backward-error scale of a dense eigensolver: n eps cond(V).
    const double limit = 1e-9 + 16.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * cond_v_;
    if (options_.throw_on_ill_conditioned && !(reconstruction_error_ <= limit))
      throw NumericalFailure(fmt::format("eigendecomposition reconstruction error {:.3e} (eigenvector condition {:.3e})",
                                         reconstruction_error_, cond_v_));
  }

  const double lam_max = max_abs_eigenvalue();
  kernel_.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j)
    kernel_[static_cast<std::size_t>(j)] = std::abs(eigenvalues_[j]) <= options_.kernel_tol * lam_max;
}

std::vector<Eigen::Index> SpectralDecomposition::kernel_indices() const {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < dim(); ++j)
    if (kernel_[static_cast<std::size_t>(j)]) idx.push_back(j);
  return idx;
}

Eigen::Index SpectralDecomposition::kernel_count() const {
  return static_cast<Eigen::Index>(std::count(kernel_.begin(), kernel_.end(), true));
}

double SpectralDecomposition::sector_angle(Eigen::Index j) const {
  if (kernel_[static_cast<std::size_t>(j)]) return 0.0;
  const Complex z = eigenvalues_[j];
  return std::atan2(std::abs(z.imag()), std::abs(z.real()));
}

double SpectralDecomposition::sector_margin(Eigen::Index j) const {
  if (kernel_[static_cast<std::size_t>(j)]) return std::numeric_limits<double>::infinity();
  return omega_ - sector_angle(j);
}

double SpectralDecomposition::min_sector_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < dim(); ++j) m = std::min(m, sector_margin(j));
  return m;
}

double SpectralDecomposition::max_abs_eigenvalue() const {
  return eigenvalues_.size() ? eigenvalues_.cwiseAbs().maxCoeff() : 0.0;
}

double SpectralDecomposition::min_nonkernel_abs() const {
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < dim(); ++j)
    if (!kernel_[static_cast<std::size_t>(j)]) m = std::min(m, std::abs(eigenvalues_[j]));
  if (!std::isfinite(m)) throw NumericalFailure("non-kernel spectrum is empty");
  return m;
}

Matrix SpectralDecomposition::nonkernel_range() const {
  const auto idx = nonkernel_indices(*this);
  Matrix cols(dim(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = vectors_.col(idx[i]);
  Eigen::HouseholderQR<Matrix> qr(cols);
  return qr.householderQ() * Matrix::Identity(dim(), cols.cols());
}

SpectralDecomposition decompose(const OperatorMatrix& op, SectorConstants constants, DecompositionOptions options) {
  return SpectralDecomposition(op, constants, options);
}

// ---------------------------------------------------------------- symbols

FunctionDescriptor::FunctionDescriptor(SymbolKind kind, std::string name, Complex kernel_value, double parameter,
                                       Complex shift)
    : kind_(kind), name_(std::move(name)), kernel_value_(kernel_value), parameter_(parameter), shift_(shift) {}

FunctionDescriptor FunctionDescriptor::resolvent(Complex lambda) {
  if (lambda == Complex(0.0)) throw InvalidArgument("resolvent: lambda must be nonzero");
  return {SymbolKind::resolvent, fmt::format("resolvent({}{:+}i)", lambda.real(), lambda.imag()), 1.0 / lambda, 0.0,
          lambda};
}
FunctionDescriptor FunctionDescriptor::q_t(double t) { return {SymbolKind::q_t, fmt::format("q_t({})", t), 0.0, t}; }
FunctionDescriptor FunctionDescriptor::p_t(double t) { return {SymbolKind::p_t, fmt::format("p_t({})", t), 1.0, t}; }
FunctionDescriptor FunctionDescriptor::chi_plus() { return {SymbolKind::chi_plus, "chi_plus", 0.0}; }
FunctionDescriptor FunctionDescriptor::chi_minus() { return {SymbolKind::chi_minus, "chi_minus", 0.0}; }
FunctionDescriptor FunctionDescriptor::sgn() { return {SymbolKind::sgn, "sgn", 0.0}; }
FunctionDescriptor FunctionDescriptor::exp_minus_t_abs(double t) {
  if (!(t >= 0.0)) throw InvalidArgument("exp_minus_t_abs: t must be nonnegative");
  return {SymbolKind::exp_minus_t_abs, fmt::format("exp_minus_t_abs({})", t), 1.0, t};
}
FunctionDescriptor FunctionDescriptor::abs_power(double s) {
  if (!(s > 0.0)) throw InvalidArgument("abs_power: exponent must be positive");
  return {SymbolKind::abs_power, fmt::format("abs_power({})", s), 0.0, s};
}
FunctionDescriptor FunctionDescriptor::psi_exp(double t) {
  return {SymbolKind::psi_exp, fmt::format("psi_exp({})", t), 0.0, t};
}
FunctionDescriptor FunctionDescriptor::custom(std::string name, std::function<Complex(Complex)> fn,
                                              Complex kernel_value) {
  if (!fn) throw InvalidArgument("custom symbol needs a callable");
  FunctionDescriptor d(SymbolKind::custom, std::move(name), kernel_value);
  d.custom_ = std::move(fn);
  return d;
}

Complex FunctionDescriptor::operator()(Complex z) const {
  const double t = parameter_;
  switch (kind_) {
    case SymbolKind::resolvent: {
      const Complex diff = shift_ - z;
      if (std::abs(diff) == 0.0) throw SingularOperator("resolvent evaluated at an eigenvalue");
      return 1.0 / diff;
    }
    case SymbolKind::q_t:
    case SymbolKind::p_t: {
      const Complex den = 1.0 + t * t * z * z;
      if (std::abs(den) <= kImaginaryAxisTol * (1.0 + std::abs(t * z) * std::abs(t * z)))
        throw SectorViolation(name_ + " has a pole at an eigenvalue");
      return kind_ == SymbolKind::q_t ? t * z / den : 1.0 / den;
    }
    case SymbolKind::chi_plus: return sector_abs(z) == z ? 1.0 : 0.0;
    case SymbolKind::chi_minus: return sector_abs(z) == z ? 0.0 : 1.0;
    case SymbolKind::sgn: return sector_abs(z) == z ? 1.0 : -1.0;
    case SymbolKind::exp_minus_t_abs: return std::exp(-t * sector_abs(z));
    case SymbolKind::abs_power: return std::pow(sector_abs(z), t);
    case SymbolKind::psi_exp: return t * z * std::exp(-t * sector_abs(z));
    case SymbolKind::custom: return custom_(z);
  }
  throw InvalidArgument("unknown symbol");
}

OperatorMatrix apply_function(const SpectralDecomposition& dec, const FunctionDescriptor& b) {
  const Vector values = symbol_values(dec, b);
  Matrix scaled = dec.eigenvectors() * values.asDiagonal();
  return {scaled * dec.eigenvectors_inverse(), dec.basis_tag()};
}

Vector apply_function(const SpectralDecomposition& dec, const FunctionDescriptor& b, const Vector& v) {
  if (v.size() != dec.dim()) throw DimensionMismatch("apply_function: vector size mismatch");
  const Vector values = symbol_values(dec, b);
  return dec.eigenvectors() * values.cwiseProduct(dec.eigenvectors_inverse() * v);
}

OperatorMatrix resolvent_direct(const OperatorMatrix& op, Complex lambda) {
  const Eigen::Index n = op.dim();
  const Matrix shifted = lambda * Matrix::Identity(n, n) - op.entries;
  return {linalg::checked_inverse(shifted, 1e-14), op.basis_tag};
}

OperatorMatrix evaluate_direct(const OperatorMatrix& op, const FunctionDescriptor& b) {
  const Eigen::Index n = op.dim();
  const double t = b.parameter();
  switch (b.kind()) {
    case SymbolKind::resolvent: return resolvent_direct(op, b.kernel_value() == Complex(0.0) ? 0.0 : 1.0 / b.kernel_value());
    case SymbolKind::p_t:
    case SymbolKind::q_t: {
      const Matrix inv =
          linalg::checked_inverse(Matrix::Identity(n, n) + t * t * op.entries * op.entries, 1e-14);
      if (b.kind() == SymbolKind::p_t) return {inv, op.basis_tag};
      return {t * op.entries * inv, op.basis_tag};
    }
    default: throw InvalidArgument("evaluate_direct: no direct route for " + b.name());
  }
}

// ---------------------------------------------------------------- quadratic estimates

LogGrid quadrature_grid(const SpectralDecomposition& dec, const QuadratureOptions& options) {
  LogGrid grid;
  grid.t_lo = options.c_lo / dec.max_abs_eigenvalue();
  grid.t_hi = options.c_hi / dec.min_nonkernel_abs();
  const double decades = std::log10(grid.t_hi / grid.t_lo);
  const int count = std::max(1, static_cast<int>(std::ceil(options.points_per_decade * decades)));
  grid.log_step = std::log(grid.t_hi / grid.t_lo) / count;
  grid.t.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) grid.t.push_back(grid.t_lo * std::exp((j + 0.5) * grid.log_step));
  return grid;
}

double quadratic_norm(const SpectralDecomposition& dec, const Vector& f, const QuadratureOptions& options) {
  if (f.size() != dec.dim()) throw DimensionMismatch("quadratic_norm: vector size mismatch");
  const LogGrid grid = quadrature_grid(dec, options);
  const Vector& lam = dec.eigenvalues();
  Vector c = dec.eigenvectors_inverse() * f;
  for (Eigen::Index j = 0; j < c.size(); ++j)
    if (dec.kernel_mask()[static_cast<std::size_t>(j)]) c[j] = 0.0;

  double total = 0.0;
  Vector scaled(c.size());
  for (double t : grid.t) {
    for (Eigen::Index j = 0; j < c.size(); ++j) scaled[j] = quadratic_symbol(options.symbol, t * lam[j]) * c[j];
    total += grid.log_step * (dec.eigenvectors() * scaled).squaredNorm();
  }
  // Tails: psi(s) ~ s near 0 for both symbols; only q decays algebraically at infinity.
  total += 0.5 * grid.t_lo * grid.t_lo * (dec.eigenvectors() * lam.cwiseProduct(c)).squaredNorm();
  if (options.symbol == QuadraticSymbol::q) {
    Vector inv_c = Vector::Zero(c.size());
    for (Eigen::Index j = 0; j < c.size(); ++j)
      if (!dec.kernel_mask()[static_cast<std::size_t>(j)]) inv_c[j] = c[j] / lam[j];
    total += (dec.eigenvectors() * inv_c).squaredNorm() / (2.0 * grid.t_hi * grid.t_hi);
  }
  return std::sqrt(total);
}

QuadraticConstants quadratic_constants(const SpectralDecomposition& dec, const QuadratureOptions& options) {
  const auto idx = nonkernel_indices(dec);
  if (idx.empty()) throw NumericalFailure("quadratic_constants: non-kernel spectrum is empty");
  const LogGrid grid = quadrature_grid(dec, options);
  const Eigen::Index r = static_cast<Eigen::Index>(idx.size());
  const Eigen::Index nt = static_cast<Eigen::Index>(grid.t.size());

  Vector lam(r);
  Matrix v_nk(dec.dim(), r);
  Matrix vinv_nk(r, dec.dim());
  for (Eigen::Index k = 0; k < r; ++k) {
    lam[k] = dec.eigenvalues()[idx[static_cast<std::size_t>(k)]];
    v_nk.col(k) = dec.eigenvectors().col(idx[static_cast<std::size_t>(k)]);
    vinv_nk.row(k) = dec.eigenvectors_inverse().row(idx[static_cast<std::size_t>(k)]);
  }

  Matrix psi(nt, r);
  const double sqrt_h = std::sqrt(grid.log_step);
  for (Eigen::Index j = 0; j < nt; ++j)
    for (Eigen::Index k = 0; k < r; ++k) psi(j, k) = sqrt_h * quadratic_symbol(options.symbol, grid.t[j] * lam[k]);
  Matrix kernel = psi.adjoint() * psi;
  kernel += 0.5 * grid.t_lo * grid.t_lo * lam.conjugate() * lam.transpose();
  if (options.symbol == QuadraticSymbol::q) {
    const Vector inv = lam.cwiseInverse();
    kernel += (inv.conjugate() * inv.transpose()) / (2.0 * grid.t_hi * grid.t_hi);
  }
  const Matrix gram_v = v_nk.adjoint() * v_nk;
  const Matrix range = dec.nonkernel_range();
  const Matrix coords = vinv_nk * range;
  Matrix g = coords.adjoint() * kernel.cwiseProduct(gram_v) * coords;
  g = 0.5 * (g + g.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  QuadraticConstants out;
  out.c_low = std::sqrt(std::max(0.0, es.eigenvalues()[0]));
  out.c_high = std::sqrt(std::max(0.0, es.eigenvalues()[r - 1]));
  out.nonkernel_dim = r;
  return out;
}

// ---------------------------------------------------------------- perturbation

LipschitzSample lipschitz_probe(const SpectralDecomposition& t1, const SpectralDecomposition& t2,
                                double coefficient_distance, const FunctionDescriptor& b) {
  if (t1.dim() != t2.dim()) throw DimensionMismatch("lipschitz_probe: operator sizes differ");
  LipschitzSample s;
  s.coefficient_distance = coefficient_distance;
  s.operator_difference = linalg::spectral_norm(apply_function(t2, b).entries - apply_function(t1, b).entries);
  if (coefficient_distance == 0.0) {
    s.degenerate = true;
    s.ratio = 0.0;
  } else {
    s.ratio = s.operator_difference / coefficient_distance;
  }
  return s;
}

std::vector<LipschitzSample> lipschitz_sweep(const CoefficientField& b0, const CoefficientField& direction,
                                             const std::vector<double>& eps, const FunctionDescriptor& b,
                                             const std::function<SubspaceBasis(const Torus&)>& restrict_to) {
  const auto build = [&](const CoefficientField& coeff) {
    OperatorMatrix t = assemble_TB(coeff);
    if (restrict_to) t = restrict(t, restrict_to(coeff.torus()));
    return decompose(t, SectorConstants::of(coeff));
  };
  const SpectralDecomposition base = build(b0);
  const Matrix base_value = apply_function(base, b).entries;
  std::vector<LipschitzSample> out;
  for (double e : eps) {
    const CoefficientField be = b0.perturbed(direction, e);
    const SpectralDecomposition pert = build(be);
    LipschitzSample s;
    s.eps = e;
    s.coefficient_distance = be.sup_distance(b0);
    s.operator_difference = linalg::spectral_norm(apply_function(pert, b).entries - base_value);
    s.degenerate = s.coefficient_distance == 0.0;
    s.ratio = s.degenerate ? 0.0 : s.operator_difference / s.coefficient_distance;
    out.push_back(s);
  }
  return out;
}

std::string spectrum_csv(const SpectralDecomposition& dec) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "re,im,kernel,sector_margin\n");
  for (Eigen::Index j = 0; j < dec.dim(); ++j) {
    const Complex z = dec.eigenvalues()[j];
    const bool ker = dec.kernel_mask()[static_cast<std::size_t>(j)];
    fmt::format_to(std::back_inserter(buf), "{:.17g},{:.17g},{},{}\n", z.real(), z.imag(), ker ? 1 : 0,
                   ker ? std::string("inf") : io::format_number(dec.sector_margin(j)));
  }
  return fmt::to_string(buf);
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectralDecomposition& dec) {
  io::write_file_atomic(path, spectrum_csv(dec));
}

}  // namespace diracbvp
