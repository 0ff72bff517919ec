#pragma once

#include <functional>
#include <span>
#include <vector>

#include "diracbvp/bvp_solver.hpp"

namespace diracbvp::oracles {

/// 2x2 Fourier symbol of T_A on the degree-one space at frequency xi, basis {e_0, xi/|xi|}.
struct SymbolMatrix {
  std::vector<double> xi;
  Matrix entries;
};

/// `a` is the constant (n+1)x(n+1) vector block in the basis e_0, ..., e_n.
SymbolMatrix symbol_matrix(const Matrix& a, std::span<const double> xi);

struct SymbolHardy {
  Matrix plus;   // chi_+(M_xi)
  Matrix minus;  // chi_-(M_xi)
  Complex lambda_plus;
  Complex lambda_minus;
  Vector v_plus;  // eigenvector for lambda_plus, unit norm
  Vector v_minus;
};
SymbolHardy symbol_hardy(const Matrix& a, std::span<const double> xi);

/// (a_par0, xi)(a_0par, xi) - a00 (a_parpar xi, xi) for unit xi.
Complex transversality_discriminant(const Matrix& a, std::span<const double> xi);

/// Per-mode solution of a constant-coefficient problem on the degree-one space.
class ConstantSolution {
 public:
  struct Mode {
    int point = 0;            // spectral index
    Complex lambda = 0.0;     // Hardy eigenvalue (Re > 0)
    Complex normal = 0.0;     // e_0 coefficient
    Complex along_xi = 0.0;   // coefficient of xi/|xi|
  };

  ConstantSolution(const Torus& torus, std::vector<Mode> modes);

  const Torus& torus() const { return torus_; }
  const std::vector<Mode>& modes() const { return modes_; }
  /// F_t on the grid; t = 0 is the trace.
  Field at(double t) const;
  Field trace() const { return at(0.0); }
  /// Normal component of F_t.
  ScalarField normal_at(double t) const;

 private:
  Torus torus_;
  std::vector<Mode> modes_;
};

/// Scalar data for neumann/neu_perp/dirichlet; tangential data for regularity (other kinds rejected).
ConstantSolution constant_solver(const Matrix& a, const BoundaryData& data);

/// (1/pi) int (-(x - y) e_0 + t e_1) g(y) / (t^2 + (x - y)^2) dy over [support_lo, support_hi]; returns (e_0, e_1).
struct LineValue {
  double normal = 0.0;
  double tangential = 0.0;
};
LineValue cauchy_extension_line(const std::function<double(double)>& g, double support_lo, double support_hi, double t,
                                double x, double abs_tol = 1e-8);

/// (lambda - T)^{-1} f by a dense solve.
Vector brute_resolvent(const OperatorMatrix& op, Complex lambda, const Vector& f);

/// 1/2 ||f - kernel part||^2 for hermitian T, the exact value of int ||q_t(T) f||^2 dt/t.
double selfadjoint_qe_value(const OperatorMatrix& op, const Vector& f, double kernel_tol = 1e-10);

/// Per-mode e^{-|xi| t} u.
ScalarField poisson_extension(const ScalarField& u, double t);

}  // namespace diracbvp::oracles
