#include "diracbvp/oracles.hpp"

#include <fmt/format.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "diracbvp/errors.hpp"
#include "diracbvp/linalg.hpp"

namespace diracbvp::oracles {

namespace {

constexpr Complex kI{0.0, 1.0};

std::vector<double> unit(std::span<const double> xi) {
  double s = 0.0;
  for (double v : xi) s += v * v;
  const double r = std::sqrt(s);
  if (r == 0.0) throw InvalidArgument("symbol: frequency must be non-zero");
  std::vector<double> out(xi.begin(), xi.end());
  for (double& v : out) v /= r;
  return out;
}

double length(std::span<const double> xi) {
  double s = 0.0;
  for (double v : xi) s += v * v;
  return std::sqrt(s);
}

void check_block(const Matrix& a, std::size_t n) {
  if (a.rows() != a.cols() || static_cast<std::size_t>(a.rows()) != n + 1)
    throw DimensionMismatch(fmt::format("symbol: coefficient block must be {0}x{0}", n + 1));
}

std::vector<double> frequency_of(const Torus& t, int q) {
  std::vector<double> xi;
  for (int a = 0; a < t.dim_n(); ++a) xi.push_back(t.frequency(q, a));
  return xi;
}

}  // namespace

SymbolMatrix symbol_matrix(const Matrix& a, std::span<const double> xi) {
  check_block(a, xi.size());
  const std::vector<double> hat = unit(xi);
  const double r = length(xi);
  const Complex a00 = a(0, 0);
  if (a00 == Complex(0.0)) throw SingularOperator("symbol: a00 vanishes");
  Complex mixed = 0.0, along = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i + 1);
    mixed += (a(0, ii) + a(ii, 0)) * hat[i];
    for (std::size_t j = 0; j < hat.size(); ++j) along += hat[i] * a(ii, static_cast<Eigen::Index>(j + 1)) * hat[j];
  }
  Matrix m(2, 2);
  m << kI / a00 * mixed, kI / a00 * along, -kI, 0.0;
  return {std::vector<double>(xi.begin(), xi.end()), r * m};
}

SymbolHardy symbol_hardy(const Matrix& a, std::span<const double> xi) {
  const SymbolMatrix s = symbol_matrix(a, xi);
  Eigen::ComplexEigenSolver<Matrix> es(s.entries);
  Vector lam = es.eigenvalues();
  Matrix v = es.eigenvectors();
  if (std::abs(lam[0] - lam[1]) <= 1e-12 * (std::abs(lam[0]) + std::abs(lam[1])))
    throw NumericalFailure("symbol_hardy: defective symbol matrix");
  if (lam[0].real() < lam[1].real()) {
    std::swap(lam[0], lam[1]);
    v.col(0).swap(v.col(1));
  }
  if (!(lam[0].real() > 0.0 && lam[1].real() < 0.0))
    throw SectorViolation("symbol_hardy: eigenvalues not in opposite half planes");
  const Matrix w = v.inverse();
  SymbolHardy out;
  out.plus = v.col(0) * w.row(0);
  out.minus = v.col(1) * w.row(1);
  out.lambda_plus = lam[0];
  out.lambda_minus = lam[1];
  out.v_plus = v.col(0).normalized();
  out.v_minus = v.col(1).normalized();
  return out;
}

Complex transversality_discriminant(const Matrix& a, std::span<const double> xi) {
  check_block(a, xi.size());
  if (std::abs(length(xi) - 1.0) > 1e-12) throw InvalidArgument("transversality_discriminant: xi must be a unit vector");
  Complex par0 = 0.0, zeropar = 0.0, parpar = 0.0;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i + 1);
    par0 += a(ii, 0) * xi[i];
    zeropar += a(0, ii) * xi[i];
    for (std::size_t j = 0; j < xi.size(); ++j) parpar += xi[i] * a(ii, static_cast<Eigen::Index>(j + 1)) * xi[j];
  }
  return par0 * zeropar - a(0, 0) * parpar;
}

ConstantSolution::ConstantSolution(const Torus& torus, std::vector<Mode> modes) : torus_(torus), modes_(std::move(modes)) {}

Field ConstantSolution::at(double t) const {
  if (t < 0.0) throw InvalidArgument("ConstantSolution: t must be non-negative");
  const int ld = torus_.lambda_dim();
  SpectralField s{torus_, Vector::Zero(torus_.field_dim())};
  for (const Mode& m : modes_) {
    const Complex decay = std::exp(-t * m.lambda);
    const auto hat = unit(frequency_of(torus_, m.point));
    s.data[static_cast<Eigen::Index>(m.point) * ld + 1] = decay * m.normal;
    for (std::size_t j = 0; j < hat.size(); ++j)
      s.data[static_cast<Eigen::Index>(m.point) * ld + (1 << (j + 1))] = decay * m.along_xi * hat[j];
  }
  return fourier_inverse(s);
}

ScalarField ConstantSolution::normal_at(double t) const {
  const Field f = at(t);
  ScalarField u(torus_);
  for (int p = 0; p < torus_.point_count(); ++p) u.values()[p] = f.coeff(p, BasisIndex(1u));
  return u;
}

ConstantSolution constant_solver(const Matrix& a, const BoundaryData& data) {
  const Torus& t = data.torus;
  const int n = t.dim_n();
  check_block(a, static_cast<std::size_t>(n));
  std::vector<Vector> spectra;
  if (data.kind == BvpKind::regularity) {
    for (int j = 0; j < n; ++j) {
      ScalarField c(t);
      for (int p = 0; p < t.point_count(); ++p) c.values()[p] = data.field.coeff(p, BasisIndex(1u << (j + 1)));
      spectra.push_back(fourier_forward(c));
    }
  } else if (data.kind == BvpKind::transmission) {
    throw InvalidArgument("constant_solver: transmission is not covered");
  } else {
    spectra.push_back(fourier_forward(data.scalar));
  }

  std::vector<ConstantSolution::Mode> modes;
  for (int q = 0; q < t.point_count(); ++q) {
    const std::vector<double> xi = frequency_of(t, q);
    if (length(xi) == 0.0) continue;  // constants are not attainable
    const SymbolHardy h = symbol_hardy(a, xi);
    const auto hat = unit(xi);
    Complex datum, gamma;
    switch (data.kind) {
      case BvpKind::neumann: {
        Complex a0xi = 0.0;
        for (int j = 0; j < n; ++j) a0xi += a(0, j + 1) * hat[static_cast<std::size_t>(j)];
        gamma = a(0, 0) * h.v_plus[0] + a0xi * h.v_plus[1];
        datum = spectra[0][q];
        break;
      }
      case BvpKind::regularity:
        gamma = h.v_plus[1];
        datum = 0.0;
        for (int j = 0; j < n; ++j) datum += spectra[static_cast<std::size_t>(j)][q] * hat[static_cast<std::size_t>(j)];
        break;
      default:
        gamma = h.v_plus[0];
        datum = spectra[0][q];
        break;
    }
    if (std::abs(gamma) < 1e-14) {
      std::string where;
      for (double v : xi) where += fmt::format("{}{:.6g}", where.empty() ? "" : ", ", v);
      throw SingularOperator(fmt::format("constant_solver: mode boundary operator singular at xi = ({})", where), q);
    }
    const Complex c = datum / gamma;
    modes.push_back({q, h.lambda_plus, c * h.v_plus[0], c * h.v_plus[1]});
  }
  return ConstantSolution(t, std::move(modes));
}

LineValue cauchy_extension_line(const std::function<double(double)>& g, double support_lo, double support_hi, double t,
                                double x, double abs_tol) {
  if (!(t > 0.0)) throw InvalidArgument("cauchy_extension_line: t must be positive");
  if (!(support_hi > support_lo)) throw InvalidArgument("cauchy_extension_line: empty support window");
  using boost::math::quadrature::gauss_kronrod;
  auto integrate = [&](auto&& kernel) {
    double err = 0.0;
    const double v = gauss_kronrod<double, 61>::integrate(kernel, support_lo, support_hi, 20, 1e-13, &err);
    if (!(err <= abs_tol)) throw NumericalFailure(fmt::format("cauchy_extension_line: quadrature error {:.3e}", err));
    return v;
  };
  const double inv_pi = 1.0 / std::numbers::pi;
  LineValue out;
  out.normal = inv_pi * integrate([&](double y) { return -(x - y) * g(y) / (t * t + (x - y) * (x - y)); });
  out.tangential = inv_pi * integrate([&](double y) { return t * g(y) / (t * t + (x - y) * (x - y)); });
  return out;
}

Vector brute_resolvent(const OperatorMatrix& op, Complex lambda, const Vector& f) {
  if (f.size() != op.dim()) throw DimensionMismatch("brute_resolvent: size mismatch");
  const Matrix shifted = lambda * Matrix::Identity(op.dim(), op.dim()) - op.entries;
  return linalg::checked_solve(shifted, f);
}

double selfadjoint_qe_value(const OperatorMatrix& op, const Vector& f, double kernel_tol) {
  if (f.size() != op.dim()) throw DimensionMismatch("selfadjoint_qe_value: size mismatch");
  const double scale = op.entries.norm();
  if ((op.entries - op.entries.adjoint()).norm() > 1e-12 * std::max(scale, 1.0))
    throw InvalidArgument("selfadjoint_qe_value: operator is not hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(op.entries);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double top = lam.cwiseAbs().maxCoeff();
  Vector rest = f;
  for (Eigen::Index j = 0; j < lam.size(); ++j)
    if (std::abs(lam[j]) <= kernel_tol * top) {
      const auto u = es.eigenvectors().col(j);
      rest -= u * (u.adjoint() * f)(0, 0);
    }
  return 0.5 * rest.squaredNorm();
}

ScalarField poisson_extension(const ScalarField& u, double t) {
  if (t < 0.0) throw InvalidArgument("poisson_extension: t must be non-negative");
  const Torus& tor = u.torus();
  Vector c = fourier_forward(u);
  for (int q = 0; q < tor.point_count(); ++q) c[q] *= std::exp(-t * tor.frequency_norm(q));
  return fourier_inverse_scalar(tor, c);
}

}  // namespace diracbvp::oracles
