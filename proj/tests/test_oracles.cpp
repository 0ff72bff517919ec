#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "diracbvp/coefficients.hpp"
#include "diracbvp/errors.hpp"
#include "diracbvp/oracles.hpp"
#include "test_support.hpp"

using namespace diracbvp;
using namespace diracbvp::oracles;
using diracbvp::testing::random_vector_of;

namespace {

const Complex kI{0.0, 1.0};

std::vector<double> xi_of(const Torus& t, int q) {
  std::vector<double> xi;
  for (int a = 0; a < t.dim_n(); ++a) xi.push_back(t.frequency(q, a));
  return xi;
}

/// Ambient columns {mode * e0, mode * xi/|xi|} for spectral point q.
Matrix mode_pair(const Torus& t, int q) {
  const auto xi = xi_of(t, q);
  double r = 0.0;
  for (double v : xi) r += v * v;
  r = std::sqrt(r);
  Matrix cols = Matrix::Zero(t.field_dim(), 2);
  const double c = 1.0 / std::sqrt(static_cast<double>(t.point_count()));
  for (int p = 0; p < t.point_count(); ++p) {
    double phase = 0.0;
    for (int a = 0; a < t.dim_n(); ++a) phase += xi[static_cast<std::size_t>(a)] * t.coordinate(p, a);
    const Complex u = c * std::polar(1.0, phase);
    cols(p * t.lambda_dim() + 1, 0) = u;
    for (int a = 0; a < t.dim_n(); ++a) cols(p * t.lambda_dim() + (1 << (a + 1)), 1) = u * xi[static_cast<std::size_t>(a)] / r;
  }
  return cols;
}

}  // namespace

TEST(SymbolMatrix, Examples) {
  const std::vector<double> one{1.0};
  const SymbolMatrix s = symbol_matrix(Matrix::Identity(2, 2), one);
  Matrix expected(2, 2);
  expected << 0.0, kI, -kI, 0.0;
  EXPECT_LE((s.entries - expected).norm(), 1e-15);

  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 2.0;
  diag(1, 1) = 3.0;
  const Matrix m = symbol_matrix(diag, one).entries;
  // Characteristic polynomial z^2 - tr z + det with tr = 0, det = -(a11/a00).
  const Complex tr = m.trace(), det = m.determinant();
  EXPECT_LE(std::abs(tr), 1e-15);
  EXPECT_LE(std::abs(det + 1.5), 1e-14);
  const SymbolHardy h = symbol_hardy(diag, one);
  EXPECT_NEAR(h.lambda_plus.real(), std::sqrt(1.5), 1e-14);
  EXPECT_NEAR(h.lambda_minus.real(), -std::sqrt(1.5), 1e-14);

  families::Rng rng(3);
  const Matrix a = families::random_accretive_matrix(3, rng);
  const std::vector<double> xi{0.3, -1.1}, xi2{0.6, -2.2};
  EXPECT_LE((symbol_matrix(a, xi2).entries - 2.0 * symbol_matrix(a, xi).entries).norm(), 1e-14);
  const std::vector<double> zero{0.0};
  EXPECT_THROW((void)symbol_matrix(Matrix::Identity(2, 2), zero), InvalidArgument);
}

TEST(SymbolHardy, ProjectionsAndScaleInvariance) {
  const std::vector<double> one{1.0}, two{2.0};
  const SymbolHardy h = symbol_hardy(Matrix::Identity(2, 2), one);
  Matrix expected(2, 2);
  expected << 1.0, kI, -kI, 1.0;
  EXPECT_LE((h.plus - 0.5 * expected).norm(), 1e-14);
  EXPECT_LE((h.plus + h.minus - Matrix::Identity(2, 2)).norm(), 1e-14);

  families::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = families::random_accretive_matrix(2, rng);
    EXPECT_LE((symbol_hardy(a, two).plus - symbol_hardy(a, one).plus).norm(), 1e-12);
    const SymbolHardy ha = symbol_hardy(a, one);
    EXPECT_GT(ha.lambda_plus.real(), 0.0);
    EXPECT_LT(ha.lambda_minus.real(), 0.0);
  }
}

TEST(Transversality, ExamplesAndAccretiveSweep) {
  const std::vector<double> one{1.0};
  EXPECT_EQ(transversality_discriminant(Matrix::Identity(2, 2), one), Complex(-1.0));
  for (double c : {0.5, 3.0}) {
    Matrix skew(2, 2);
    skew << 1.0, c, -c, 1.0;
    EXPECT_LE(std::abs(transversality_discriminant(skew, one) - Complex(-c * c - 1.0)), 1e-14);
  }
  families::Rng rng(99);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int draw = 0; draw < 1000; ++draw) {
    const Matrix a = families::random_accretive_matrix(3, rng);
    const double th = angle(rng);
    const std::vector<double> xi{std::cos(th), std::sin(th)};
    EXPECT_GT(std::abs(transversality_discriminant(a, xi)), 1e-12);
  }
  const std::vector<double> not_unit{2.0};
  EXPECT_THROW((void)transversality_discriminant(Matrix::Identity(2, 2), not_unit), InvalidArgument);
}

TEST(SymbolOracle, GridBlocksMatchForConstantCoefficients) {
  families::Rng rng(5);
  for (const Torus& t : {Torus(1, 16, 3.0), Torus(2, 8, 5.0)}) {
    const Matrix a = families::random_accretive_matrix(t.dim_n() + 1, rng);
    const auto b = CoefficientField::constant_vector_block(t, a);
    const Matrix tb = assemble_TB(b).entries;
    const SubspaceBasis h1 = hat_h1_basis(t);
    const SpectralDecomposition dec = decompose(restrict(assemble_TB(b), h1), SectorConstants::of(b));
    const Matrix plus = apply_function(dec, FunctionDescriptor::chi_plus()).entries;
    for (int q = 0; q < t.point_count(); ++q) {
      const auto xi = xi_of(t, q);
      if (std::all_of(xi.begin(), xi.end(), [](double v) { return v == 0.0; })) continue;
      const Matrix w = mode_pair(t, q);
      const Matrix grid_block = w.adjoint() * tb * w;
      const Matrix sym = symbol_matrix(a, xi).entries;
      EXPECT_LE((grid_block - sym).norm(), 1e-12 * std::max(1.0, sym.norm())) << "q=" << q;
      // Hardy projection of the grid restricted to the mode pair.
      Matrix wc(h1.dim(), 2);
      for (int c = 0; c < 2; ++c) wc.col(c) = h1.coordinates_of(w.col(c));
      const Matrix grid_plus = wc.adjoint() * plus * wc;
      EXPECT_LE((grid_plus - symbol_hardy(a, xi).plus).norm(), 1e-10) << "q=" << q;
    }
  }
}

TEST(ConstantSolver, DirichletModeFactorAndPoisson) {
  const Torus t(1, 32, 2.0 * std::numbers::pi);
  ScalarField u(t);
  for (int p = 0; p < t.point_count(); ++p) u.values()[p] = std::cos(3.0 * t.coordinate(p, 0));
  const ConstantSolution sol = constant_solver(Matrix::Identity(2, 2), BoundaryData::dirichlet(u));
  for (double s : {0.0, 0.1, 0.7}) {
    const ScalarField ut = sol.normal_at(s);
    EXPECT_LE((ut.values() - std::exp(-3.0 * s) * u.values()).norm(), 1e-12 * u.values().norm());
    EXPECT_LE((ut.values() - poisson_extension(u, s).values()).norm(), 1e-12 * u.values().norm());
  }
  EXPECT_THROW((void)constant_solver(Matrix::Identity(2, 2),
                                     BoundaryData::transmission(Field(t), 1, 1.0, 0.0)),
               InvalidArgument);
}

TEST(CauchyLine, ZeroDecayAndPoissonPart) {
  const auto zero = [](double) { return 0.0; };
  const LineValue z = cauchy_extension_line(zero, -1.0, 1.0, 0.5, 0.0);
  EXPECT_EQ(z.normal, 0.0);
  EXPECT_EQ(z.tangential, 0.0);

  const auto bump = [](double y) { return std::exp(-y * y / 0.08); };
  const double mass = std::sqrt(0.08 * std::numbers::pi);
  // Far away the tangential part behaves like mass * t / (pi (t^2 + x^2)).
  const LineValue far1 = cauchy_extension_line(bump, -2.0, 2.0, 100.0, 0.0);
  const LineValue far2 = cauchy_extension_line(bump, -2.0, 2.0, 200.0, 0.0);
  EXPECT_NEAR(far1.tangential * 100.0, mass / std::numbers::pi, 1e-3);
  EXPECT_NEAR(far1.tangential / far2.tangential, 2.0, 1e-3);
  // Odd symmetry of the normal kernel about the bump centre.
  const LineValue left = cauchy_extension_line(bump, -2.0, 2.0, 0.3, -0.4);
  const LineValue right = cauchy_extension_line(bump, -2.0, 2.0, 0.3, 0.4);
  EXPECT_NEAR(left.normal, -right.normal, 1e-12);
  EXPECT_THROW((void)cauchy_extension_line(bump, -2.0, 2.0, 0.0, 0.0), InvalidArgument);
}

TEST(BruteForce, ResolventAndSelfAdjointValue) {
  std::mt19937_64 rng(31);
  const Torus t(1, 64);
  const auto b = families::kkpt(t, 3.0);
  const OperatorMatrix op = restrict(assemble_TB(b), hat_h1_basis(t));
  const SpectralDecomposition dec = decompose(op, SectorConstants::of(b));
  const Vector f = random_vector_of(op.dim(), rng);
  const Complex lam(0.3, 1.7);
  const Vector direct = brute_resolvent(op, lam, f);
  const Vector spectral = apply_function(dec, FunctionDescriptor::resolvent(lam), f);
  EXPECT_LE((direct - spectral).norm(), 1e-9 * direct.norm());

  const double closed = selfadjoint_qe_value(op, f);
  const double q = quadratic_norm(dec, f);
  EXPECT_NEAR(q * q, closed, 1e-4 * closed);

  Vector ambient = Vector::Zero(t.field_dim());
  for (int p = 0; p < t.point_count(); ++p) ambient[p * t.lambda_dim() + 1] = 1.0;
  const Vector constant = hat_h1_basis(t).coordinates_of(ambient);
  const OperatorMatrix identity_op = restrict(assemble_TB(CoefficientField::identity(t)), hat_h1_basis(t));
  EXPECT_LE(selfadjoint_qe_value(identity_op, constant), 1e-20 * constant.squaredNorm());
  EXPECT_THROW((void)selfadjoint_qe_value(restrict(assemble_TB(families::smooth_accretive(t, 2)), hat_h1_basis(t)), f),
               InvalidArgument);
}
