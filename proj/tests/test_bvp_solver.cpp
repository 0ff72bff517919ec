#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "diracbvp/bvp_solver.hpp"
#include "diracbvp/coefficients.hpp"
#include "diracbvp/errors.hpp"
#include "diracbvp/linalg.hpp"
#include "diracbvp/oracles.hpp"
#include "test_support.hpp"

using namespace diracbvp;
using diracbvp::testing::random_complex;
using diracbvp::testing::random_vector_of;

namespace {

constexpr BasisIndex kNormal{1u};

/// Mean-free band-limited data with decaying random Fourier coefficients.
ScalarField smooth_scalar(const Torus& t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector c = Vector::Zero(t.point_count());
  for (int q = 0; q < t.point_count(); ++q) {
    const double r = t.frequency_norm(q) * t.period() / (2.0 * std::numbers::pi);
    if (r == 0.0 || r > 3.5) continue;
    c[q] = random_complex(rng) / (1.0 + r * r);
  }
  return fourier_inverse_scalar(t, c);
}

ScalarField single_mode(const Torus& t, int k) {
  ScalarField u(t);
  const double w = 2.0 * std::numbers::pi * k / t.period();
  for (int p = 0; p < t.point_count(); ++p) u.values()[p] = std::polar(1.0, w * t.coordinate(p, 0));
  return u;
}

double rel(const Vector& a, const Vector& b) {
  const double s = std::max(a.norm(), b.norm());
  return s == 0.0 ? 0.0 : (a - b).norm() / s;
}

double extra(const SolveReport& r, const std::string& key) {
  for (const auto& [k, v] : r.extra)
    if (k == key) return v;
  ADD_FAILURE() << "missing report entry " << key;
  return std::nan("");
}

/// Sum over points of <X(p) u(p), v(p)> for per-point maps X.
Complex pointwise_pairing(const Torus& t, const std::vector<Matrix>& maps, const Vector& u, const Vector& v) {
  const int ld = t.lambda_dim();
  Complex s = 0.0;
  for (int p = 0; p < t.point_count(); ++p) {
    const auto up = u.segment(static_cast<Eigen::Index>(p) * ld, ld);
    const auto vp = v.segment(static_cast<Eigen::Index>(p) * ld, ld);
    s += vp.dot(maps[static_cast<std::size_t>(p)] * up);
  }
  return s;
}

}  // namespace

TEST(BoundaryData, RejectsInvalidInput) {
  const Torus t1(1, 16), t2(2, 8);
  EXPECT_THROW((void)BoundaryData::transmission(Field(t1), 1, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW((void)BoundaryData::transmission(Field(t1), 3, 1.0, 0.0), InvalidArgument);
  Field normal(t1);
  normal.coeff(0, kNormal) = 1.0;
  EXPECT_THROW((void)BoundaryData::regularity(normal), InvalidArgument);
  Field rotational(t2);
  for (int p = 0; p < t2.point_count(); ++p) rotational.coeff(p, BasisIndex(2u)) = std::sin(t2.coordinate(p, 1));
  EXPECT_THROW((void)BoundaryData::regularity(rotational), InvalidArgument);
  EXPECT_NO_THROW((void)BoundaryData::regularity_from_potential(smooth_scalar(t2, 1)));
  EXPECT_EQ(parse_bvp_kind("neu_perp"), BvpKind::neu_perp);
  EXPECT_THROW((void)parse_bvp_kind("robin"), InvalidArgument);
}

TEST(BoundaryOperators, RejectsDegenerateCoefficients) {
  const Torus t(1, 16);
  EXPECT_THROW((void)make_boundary_operators(CoefficientField::scaled_identity(t, -1.0)), InvalidArgument);
  std::vector<Matrix> maps(static_cast<std::size_t>(t.point_count()), Matrix::Identity(2, 2));
  maps[5] = Matrix::Zero(2, 2);
  EXPECT_THROW((void)make_boundary_operators(CoefficientField::from_vector_block(t, maps)), SingularOperator);
  const auto ops = make_boundary_operators(CoefficientField::identity(t));
  EXPECT_THROW((void)solve_neumann(ops, ScalarField(Torus(1, 32))), DimensionMismatch);
}

TEST(Solvers, ZeroDataGivesZeroSolution) {
  const Torus t(1, 16);
  const auto ops = make_boundary_operators(families::smooth_accretive(t, 4));
  const ScalarField zero(t);
  for (const Solution& s : {solve_neumann(ops, zero), solve_neu_perp(ops, zero), solve_dirichlet(ops, zero),
                            solve_regularity(ops, Field(t))}) {
    EXPECT_EQ(s.field.trace().norm(), 0.0);
    EXPECT_EQ(s.report.norms.sup_t, 0.0);
    EXPECT_EQ(s.report.norms.triplebar_dt, 0.0);
    EXPECT_EQ(s.report.norms.nontangential, 0.0);
  }
  const TransmissionSolution tr = solve_transmission(ops, Field(t), 2.0, 1.0);
  EXPECT_EQ(tr.upper.trace().norm(), 0.0);
  EXPECT_EQ(tr.lower.trace().norm(), 0.0);
}

class ConstantOracle : public ::testing::TestWithParam<int> {};

TEST_P(ConstantOracle, GridSolvesMatchModeSolutions) {
  const int n = GetParam();
  const Torus t = n == 1 ? Torus(1, 32, 5.0) : Torus(2, 16, 4.0);
  families::Rng rng(17 + static_cast<std::uint64_t>(n));
  for (int trial = 0; trial < 2; ++trial) {
    const bool identity = trial == 0;
    const Matrix a = identity ? Matrix(Matrix::Identity(n + 1, n + 1)) : families::random_accretive_matrix(n + 1, rng);
    const double tol = identity ? 1e-10 : 1e-9;
    const auto ops = make_boundary_operators(CoefficientField::constant_vector_block(t, a));
    const ScalarField phi = smooth_scalar(t, 40 + static_cast<std::uint64_t>(trial));
    const BoundaryData reg = BoundaryData::regularity_from_potential(smooth_scalar(t, 50));

    const Solution neu = solve_neumann(ops, phi);
    const auto neu_oracle = oracles::constant_solver(a, BoundaryData::neumann(phi));
    EXPECT_LE(rel(ops->to_field(neu.field.trace()).data(), neu_oracle.trace().data()), tol);

    const Solution perp = solve_neu_perp(ops, phi);
    const auto perp_oracle = oracles::constant_solver(a, BoundaryData::neu_perp(phi));
    EXPECT_LE(rel(ops->to_field(perp.field.trace()).data(), perp_oracle.trace().data()), tol);

    const Solution regs = solve_regularity(ops, reg.field);
    const auto reg_oracle = oracles::constant_solver(a, reg);
    EXPECT_LE(rel(ops->to_field(regs.field.trace()).data(), reg_oracle.trace().data()), tol);

    for (double s : {0.05, 0.4}) {
      EXPECT_LE(rel(neu.field.field_at(s).data(), neu_oracle.at(s).data()), tol) << "t=" << s;
      EXPECT_LE(rel(regs.field.field_at(s).data(), reg_oracle.at(s).data()), tol) << "t=" << s;
    }
    for (const Solution* s : {&neu, &perp, &regs}) {
      EXPECT_LE(s->report.boundary_residual, 1e-8);
      EXPECT_LE(s->report.hardy_residual, 1e-9);
      EXPECT_LE(s->report.projection_loss, 1e-8);
      EXPECT_TRUE(s->report.flags.empty()) << s->report.to_text();
      ASSERT_FALSE(s->report.condition_numbers.empty());
      EXPECT_LT(s->report.condition_numbers.front().second, 1e10);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, ConstantOracle, ::testing::Values(1, 2));

TEST(Dirichlet, IdentityIsPoissonExtension) {
  const Torus t(1, 64);
  const auto ops = make_boundary_operators(CoefficientField::identity(t));
  const ScalarField u = smooth_scalar(t, 9);
  const Solution sol = solve_dirichlet(ops, u);
  for (double s : {0.0, 0.01, 0.3, 2.0})
    EXPECT_LE((dirichlet_value(sol.field, s).values() - oracles::poisson_extension(u, s).values()).norm(),
              1e-10 * u.values().norm())
        << "t=" << s;

  const ScalarField mode = single_mode(t, 3);
  const Solution ms = solve_dirichlet(ops, mode);
  for (double s : {0.1, 0.5})
    EXPECT_NEAR(norm(dirichlet_value(ms.field, s)), std::exp(-3.0 * s) * norm(mode), 1e-10 * norm(mode));
}

TEST(Dirichlet, MatchesNeuPerpNormalComponent) {
  const Torus t(1, 32);
  const auto ops = make_boundary_operators(families::smooth_accretive(t, 12));
  const ScalarField u = smooth_scalar(t, 3);
  const Solution dir = solve_dirichlet(ops, u);
  const Solution perp = solve_neu_perp(ops, u);
  for (double s : {0.0, 0.2})
    EXPECT_EQ((dirichlet_value(dir.field, s).values() - normal_component(*ops, perp.field.at(s)).values()).norm(), 0.0);
}

TEST(Dirichlet, SecondOrderResidualForSmoothRealSymmetric) {
  for (const Torus& t : {Torus(1, 32), Torus(2, 16)}) {
    const auto ops = make_boundary_operators(families::smooth_real_symmetric(t, 21));
    const Solution sol = solve_dirichlet(ops, smooth_scalar(t, 22));
    ASSERT_TRUE(sol.report.second_order_residual.has_value());
    EXPECT_LE(*sol.report.second_order_residual, 1e-6) << "n=" << t.dim_n();
    EXPECT_LE(sol.report.boundary_residual, 1e-8);
    EXPECT_GT(extra(sol.report, "triplebar_grad_u"), 0.0);
  }
}

TEST(SolutionField, SemigroupAndFirstOrderEquation) {
  const Torus t(1, 32);
  const auto ops = make_boundary_operators(families::smooth_accretive(t, 6));
  const Solution sol = solve_neumann(ops, smooth_scalar(t, 7));
  const Matrix& gen = ops->generator().entries;
  for (double s : {0.0, 0.05, 0.3}) {
    for (double dt : {0.02, 0.5})
      EXPECT_LE(rel(ops->semigroup(dt, sol.field.at(s)), sol.field.at(s + dt)), 1e-9);
    const Vector tf = gen * sol.field.at(s);
    EXPECT_LE((sol.field.distance_derivative(s) + tf).norm(), 1e-10 * tf.norm()) << "t=" << s;
  }
  double prev = sol.field.at(0.0).norm();
  for (double s : {0.1, 0.3, 1.0, 3.0}) {
    const double cur = sol.field.at(s).norm();
    EXPECT_LE(cur, prev * (1.0 + 1e-9));
    prev = cur;
  }
}

TEST(Norms, SingleModeTriplebarAndZero) {
  const Torus t(1, 64);
  const auto ops = make_boundary_operators(CoefficientField::identity(t));
  const Solution sol = solve_neu_perp(ops, single_mode(t, 4));
  const double fn = ops->field_norm(sol.field.trace());
  EXPECT_NEAR(norm_triplebar_dt(sol.field), 0.5 * fn, 1e-4 * fn);
  EXPECT_NEAR(norm_sup_t(sol.field), fn, 1e-12 * fn);

  const SolutionField zero(ops, Vector::Zero(ops->basis().dim()), +1, default_t_samples(*ops));
  const NormSummary z = all_norms(zero);
  EXPECT_EQ(z.trace + z.sup_t + z.triplebar_dt + z.nontangential, 0.0);
  EXPECT_EQ(norm_triplebar_gradx(zero), 0.0);
}

TEST(Norms, NontangentialParametersComparable) {
  std::mt19937_64 rng(77);
  for (const Torus& t : {Torus(1, 64), Torus(2, 16)}) {
    const auto ops = make_boundary_operators(families::smooth_accretive(t, 3));
    for (int trial = 0; trial < 3; ++trial) {
      const Vector f = ops->hardy_plus() * random_vector_of(ops->basis().dim(), rng);
      const SolutionField sol(ops, f, +1, default_t_samples(*ops));
      const double a = nontangential_max(sol, 0.5, 1.0);
      const double b = nontangential_max(sol, 0.25, 2.0);
      ASSERT_GT(b, 0.0);
      EXPECT_GE(a / b, 0.25);
      EXPECT_LE(a / b, 4.0);
      EXPECT_GE(a, 0.5 * sol.operators().field_norm(f));
    }
  }
}

TEST(Rellich, RealSymmetricHardyTraces) {
  std::mt19937_64 rng(5);
  for (const Torus& t : {Torus(1, 32), Torus(2, 8)}) {
    const CoefficientField b = families::smooth_real_symmetric(t, 8);
    const auto ops = make_boundary_operators(b);
    const int n = t.dim_n();
    const MultiVector e0 = MultiVector::basis(n, kNormal);
    const Matrix hook = hook_matrix(e0), wedge = wedge_matrix(e0);
    std::vector<Matrix> maps = b.maps(), hook_b, wedge_b, normal_b, tangential_b;
    const Matrix normal_proj = wedge * hook, tangential_proj = hook * wedge;
    for (const Matrix& m : maps) {
      hook_b.push_back(hook.adjoint() * hook * m);
      wedge_b.push_back(wedge.adjoint() * wedge * m);
      normal_b.push_back(normal_proj * m * normal_proj);
      tangential_b.push_back(tangential_proj * m * tangential_proj);
    }
    for (int side : {+1, -1}) {
      const Matrix& proj = side > 0 ? ops->hardy_plus() : ops->hardy_minus();
      const Vector f = ops->basis().ambient(proj * random_vector_of(ops->basis().dim(), rng));
      const Complex full = pointwise_pairing(t, maps, f, f);
      const double via_hook = 2.0 * pointwise_pairing(t, hook_b, f, f).real();
      const double via_wedge = 2.0 * pointwise_pairing(t, wedge_b, f, f).real();
      EXPECT_NEAR(full.real(), via_hook, 1e-7 * std::abs(full));
      EXPECT_NEAR(full.real(), via_wedge, 1e-7 * std::abs(full));
      const Complex nn = pointwise_pairing(t, normal_b, f, f);
      const Complex tt = pointwise_pairing(t, tangential_b, f, f);
      EXPECT_LE(std::abs(nn - tt), 1e-7 * std::abs(nn));
    }
  }
}

TEST(Transmission, UnitWeightsReduceToNeumann) {
  std::mt19937_64 rng(13);
  const Torus t(1, 32);
  const CoefficientField b = families::smooth_accretive(t, 2);
  const auto ops = make_boundary_operators(b);
  const Vector coords = ops->hardy_plus() * random_vector_of(ops->basis().dim(), rng) +
                        ops->hardy_minus() * random_vector_of(ops->basis().dim(), rng);
  const Field g = ops->to_field(coords);
  const TransmissionSolution tr = solve_transmission(ops, g, 1.0, 0.0);
  EXPECT_LE(extra(tr.report, "jump_residual_wedge"), 1e-8);
  EXPECT_LE(extra(tr.report, "jump_residual_hook"), 1e-8);
  EXPECT_LE(tr.report.projection_loss, 1e-8);

  ScalarField conormal(t);
  for (int p = 0; p < t.point_count(); ++p) conormal.values()[p] = (b.at(p) * g.at(p).coeffs())[kNormal.bits()];
  const Solution neu = solve_neumann(ops, conormal);
  EXPECT_LE(rel(tr.upper.trace(), neu.field.trace()), 1e-9);
}

TEST(Transmission, BlockDegreeTwoJumpResiduals) {
  std::mt19937_64 rng(21);
  const Torus t(2, 8);
  const CoefficientField b = families::smooth_block(t, 5);
  const auto ops = make_boundary_operators(b, 2);
  const Field g = ops->to_field(random_vector_of(ops->basis().dim(), rng));
  const TransmissionSolution tr = solve_transmission(ops, g, 2.0, Complex(1.0, 0.5));
  EXPECT_LE(extra(tr.report, "membership_residual"), 1e-8);
  EXPECT_LE(extra(tr.report, "jump_residual_wedge"), 1e-8);
  EXPECT_LE(extra(tr.report, "jump_residual_hook"), 1e-8);
  EXPECT_LE(tr.report.hardy_residual, 1e-9);
  EXPECT_GT(extra(tr.report, "spectral_point_margin"), 0.0);

  Field outside = g;
  outside.data() += random_vector_of(outside.data().size(), rng);
  EXPECT_THROW((void)solve_transmission(ops, outside, 2.0, 1.0), InvalidArgument);
  EXPECT_THROW((void)solve_transmission(make_boundary_operators(families::smooth_accretive(t, 5), 2), g, 2.0, 1.0),
               std::exception);
}

TEST(Transmission, BlockClosedFormInverse) {
  const Torus t(1, 16);
  const auto ops = make_boundary_operators(families::smooth_block(t, 11));
  const Matrix& e = ops->cauchy();
  const Matrix& n = ops->reflection_b();
  EXPECT_LE((n - ops->reflection()).norm(), 1e-10 * n.norm());
  EXPECT_LE((e * n + n * e).norm(), 1e-9 * e.norm());
  const Eigen::Index r = e.rows();
  const Matrix id = Matrix::Identity(r, r);
  const Matrix nonkernel = e * e;
  for (Complex lam : {Complex(0.7, 0.2), Complex(2.0, 0.0), Complex(0.0, 0.5)}) {
    const Matrix generic = linalg::checked_inverse(lam * id - e * n) * nonkernel;
    const Matrix closed = (lam * id - n * e) * nonkernel / (lam * lam + 1.0);
    EXPECT_LE((generic - closed).norm(), 1e-9 * closed.norm()) << lam;
  }
  EXPECT_THROW((void)solve_transmission(ops, Field(t), Complex(1.0, 1.0), Complex(1.0, -1.0)), WellPosednessFailure);
}

TEST(Wellposedness, IdentityIsWellConditioned) {
  const Torus t(1, 32);
  const auto ops = make_boundary_operators(CoefficientField::identity(t));
  const WellposednessReport rep = wellposedness_report(*ops);
  EXPECT_TRUE(rep.flags.empty()) << rep.to_text();
  ASSERT_GE(rep.condition_numbers.size(), 4u);
  for (const auto& [name, c] : rep.condition_numbers) EXPECT_LE(c, 10.0) << name;
  const Matrix& e = ops->cauchy();
  const Matrix& n = ops->reflection();
  const Matrix id = Matrix::Identity(e.rows(), e.cols());
  const Matrix nonkernel = e * e;
  EXPECT_LE((linalg::checked_inverse(id - e * n) * nonkernel - 0.5 * (id - n * e) * nonkernel).norm(), 1e-10 * e.rows());
  EXPECT_NE(rep.to_text().find("cauchy_norm"), std::string::npos);
}

TEST(Wellposedness, RealSymmetricAllFinite) {
  const Torus t(1, 32);
  const auto ops = make_boundary_operators(families::smooth_real_symmetric(t, 2));
  const WellposednessReport rep = wellposedness_report(*ops);
  EXPECT_TRUE(rep.flags.empty()) << rep.to_text();
  for (const auto& [name, c] : rep.condition_numbers) EXPECT_TRUE(std::isfinite(c)) << name;
  for (const auto& [name, g] : rep.projection_gaps) EXPECT_GT(g, 1e-3) << name;
  const Solution neu = solve_neumann(ops, smooth_scalar(t, 4));
  const double ratio = neu.report.norms.trace / norm(smooth_scalar(t, 4));
  EXPECT_GT(ratio, 0.1);
  EXPECT_LT(ratio, 10.0);
}

TEST(Wellposedness, RegularityAdjointVersusNeuPerp) {
  families::Rng rng(404);
  const Torus t(1, 16);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix a = families::random_accretive_matrix(2, rng);
    const auto b = CoefficientField::constant_vector_block(t, a);
    const auto ops = make_boundary_operators(b);
    const auto ops_adj = make_boundary_operators(b.adjoint());
    const double neu_perp = condition_number(ops->cauchy() - ops->reflection());
    const double reg_adj = condition_number(ops_adj->cauchy() + ops_adj->reflection());
    EXPECT_EQ(std::isfinite(neu_perp) && neu_perp < 1e10, std::isfinite(reg_adj) && reg_adj < 1e10)
        << neu_perp << " vs " << reg_adj;
  }
}

TEST(Wellposedness, CapRaisesWithConditionNumber) {
  const Torus t(1, 16);
  BvpOptions options;
  options.cond_cap = 1.0;
  const auto ops = make_boundary_operators(families::smooth_accretive(t, 1), 1, options);
  try {
    (void)solve_neumann(ops, smooth_scalar(t, 1));
    FAIL() << "expected a well-posedness failure";
  } catch (const WellPosednessFailure& e) {
    EXPECT_GT(e.condition(), 1.0);
  }
}

TEST(SolutionOperator, AgreesWithSolvers) {
  const Torus t(1, 16);
  const auto ops = make_boundary_operators(families::smooth_accretive(t, 31));
  const ScalarField phi = smooth_scalar(t, 32);
  EXPECT_LE(rel(solution_operator(*ops, BvpKind::neumann) * phi.values(), solve_neumann(ops, phi).field.trace()), 1e-10);
  EXPECT_LE(rel(solution_operator(*ops, BvpKind::neu_perp) * phi.values(), solve_neu_perp(ops, phi).field.trace()),
            1e-10);
  const BoundaryData reg = BoundaryData::regularity_from_potential(phi);
  Vector stacked(t.point_count());
  for (int p = 0; p < t.point_count(); ++p) stacked[p] = reg.field.coeff(p, BasisIndex(2u));
  EXPECT_LE(rel(solution_operator(*ops, BvpKind::regularity) * stacked, solve_regularity(ops, reg.field).field.trace()),
            1e-10);
  EXPECT_THROW((void)solution_operator(*ops, BvpKind::transmission), InvalidArgument);
}
