#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "diracbvp/dirac_assembly.hpp"

namespace diracbvp {

/// Accretivity constant and sup norm of the coefficient, which fix the sector angle.
struct SectorConstants {
  double kappa = 1.0;
  double sup_norm = 1.0;

  static SectorConstants of(const CoefficientField& b) { return {b.kappa(), b.sup_norm()}; }
  /// arccos(kappa / (2 sup_norm)).
  double omega() const;
};

struct DecompositionOptions {
  double kernel_tol = 1e-10;
  double angle_tol = 1e-8;
  double cond_limit = 1e8;
  /// When false an ill-conditioned eigenbasis is recorded instead of raising.
  bool throw_on_ill_conditioned = true;
};

class SpectralDecomposition {
 public:
  SpectralDecomposition(const OperatorMatrix& op, SectorConstants constants, DecompositionOptions options = {});

  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return vectors_; }
  const Matrix& eigenvectors_inverse() const { return vectors_inv_; }
  double cond_v() const { return cond_v_; }
  double omega() const { return omega_; }
  double reconstruction_error() const { return reconstruction_error_; }
  const std::vector<bool>& kernel_mask() const { return kernel_; }
  std::vector<Eigen::Index> kernel_indices() const;
  Eigen::Index kernel_count() const;
  const DecompositionOptions& options() const { return options_; }
  const std::string& basis_tag() const { return basis_tag_; }
  Eigen::Index dim() const { return eigenvalues_.size(); }

  /// |arg(+-lambda)| in [0, pi/2] per eigenvalue (0 for kernel entries).
  double sector_angle(Eigen::Index j) const;
  /// omega - angle; +inf for kernel entries.
  double sector_margin(Eigen::Index j) const;
  double min_sector_margin() const;
  bool in_sector() const { return min_sector_margin() >= -options_.angle_tol; }

  double max_abs_eigenvalue() const;
  /// Smallest modulus over non-kernel eigenvalues; throws NumericalFailure if the non-kernel spectrum is empty.
  double min_nonkernel_abs() const;
  /// Orthonormal basis, in operator coordinates, of the span of non-kernel eigenvectors.
  Matrix nonkernel_range() const;

 private:
  Vector eigenvalues_;
  Matrix vectors_;
  Matrix vectors_inv_;
  double cond_v_ = 0.0;
  double omega_ = 0.0;
  double reconstruction_error_ = 0.0;
  std::vector<bool> kernel_;
  DecompositionOptions options_;
  std::string basis_tag_;
};

enum class SymbolKind { resolvent, q_t, p_t, chi_plus, chi_minus, sgn, exp_minus_t_abs, abs_power, psi_exp, custom };

/// Holomorphic symbol on the double sector with the value it takes on the kernel.
class FunctionDescriptor {
 public:
  static FunctionDescriptor resolvent(Complex lambda);
  static FunctionDescriptor q_t(double t);
  static FunctionDescriptor p_t(double t);
  static FunctionDescriptor chi_plus();
  static FunctionDescriptor chi_minus();
  static FunctionDescriptor sgn();
  static FunctionDescriptor exp_minus_t_abs(double t);
  static FunctionDescriptor abs_power(double s);
  /// t z exp(-t|z|).
  static FunctionDescriptor psi_exp(double t = 1.0);
  static FunctionDescriptor custom(std::string name, std::function<Complex(Complex)> fn, Complex kernel_value);

  SymbolKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  Complex kernel_value() const { return kernel_value_; }
  double parameter() const { return parameter_; }
  /// Value at a non-kernel point; throws SectorViolation where the symbol is undefined.
  Complex operator()(Complex z) const;

 private:
  FunctionDescriptor(SymbolKind kind, std::string name, Complex kernel_value, double parameter = 0.0,
                     Complex shift = 0.0);

  SymbolKind kind_;
  std::string name_;
  Complex kernel_value_;
  double parameter_;
  Complex shift_;
  std::function<Complex(Complex)> custom_;
};

/// sgn(Re z) z; throws SectorViolation on the imaginary axis.
Complex sector_abs(Complex z);

SpectralDecomposition decompose(const OperatorMatrix& op, SectorConstants constants, DecompositionOptions options = {});
OperatorMatrix apply_function(const SpectralDecomposition& dec, const FunctionDescriptor& b);
/// b(T) v without forming the full matrix.
Vector apply_function(const SpectralDecomposition& dec, const FunctionDescriptor& b, const Vector& v);

/// (lambda - T)^{-1} by a dense solve.
OperatorMatrix resolvent_direct(const OperatorMatrix& op, Complex lambda);
/// Direct evaluation without an eigenbasis; supports resolvent, p_t and q_t.
OperatorMatrix evaluate_direct(const OperatorMatrix& op, const FunctionDescriptor& b);

enum class QuadraticSymbol { q, psi_exp };

struct QuadratureOptions {
  double c_lo = 1e-3;
  double c_hi = 1e3;
  int points_per_decade = 40;
  QuadraticSymbol symbol = QuadraticSymbol::q;
};

struct LogGrid {
  std::vector<double> t;
  double log_step = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
};
LogGrid quadrature_grid(const SpectralDecomposition& dec, const QuadratureOptions& options = {});

/// (int_0^inf ||psi_t(T) f||^2 dt/t)^{1/2} in coordinate norm; kernel components are dropped.
double quadratic_norm(const SpectralDecomposition& dec, const Vector& f, const QuadratureOptions& options = {});

struct QuadraticConstants {
  double c_low = 0.0;
  double c_high = 0.0;
  Eigen::Index nonkernel_dim = 0;
};
QuadraticConstants quadratic_constants(const SpectralDecomposition& dec, const QuadratureOptions& options = {});

struct LipschitzSample {
  double eps = 0.0;
  double coefficient_distance = 0.0;
  double operator_difference = 0.0;
  double ratio = 0.0;
  bool degenerate = false;  // identical coefficients
};

/// ||b(T_2) - b(T_1)|| / ||B_2 - B_1||_inf for operators already assembled.
LipschitzSample lipschitz_probe(const SpectralDecomposition& t1, const SpectralDecomposition& t2,
                                double coefficient_distance, const FunctionDescriptor& b);

/// Same ratio for B_0 + eps * direction against B_0, over a list of eps, on the subspace chosen by `restrict_to`.
std::vector<LipschitzSample> lipschitz_sweep(const CoefficientField& b0, const CoefficientField& direction,
                                             const std::vector<double>& eps, const FunctionDescriptor& b,
                                             const std::function<SubspaceBasis(const Torus&)>& restrict_to = {});

/// Columns re, im, kernel, sector_margin.
std::string spectrum_csv(const SpectralDecomposition& dec);
void write_spectrum_csv(const std::filesystem::path& path, const SpectralDecomposition& dec);

}  // namespace diracbvp
