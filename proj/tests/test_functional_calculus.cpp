#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "diracbvp/coefficients.hpp"
#include "diracbvp/errors.hpp"
#include "diracbvp/functional_calculus.hpp"
#include "diracbvp/linalg.hpp"
#include "test_support.hpp"

using namespace diracbvp;
using diracbvp::testing::random_vector_of;

namespace {

struct Restricted {
  OperatorMatrix op;
  SectorConstants constants;
};

Restricted on_h1(const CoefficientField& b) {
  return {restrict(assemble_TB(b), hat_h1_basis(b.torus())), SectorConstants::of(b)};
}

Matrix kernel_projection(const SpectralDecomposition& dec) {
  return apply_function(dec, FunctionDescriptor::custom("kernel", [](Complex) { return Complex(0.0); }, 1.0)).entries;
}

Vector nonkernel_part(const SpectralDecomposition& dec, const Vector& f) { return f - kernel_projection(dec) * f; }

}  // namespace

TEST(Decompose, IdentitySpectrumMatchesWavenumbers) {
  const Torus t(1, 32, 4.0);
  const Restricted r = on_h1(CoefficientField::identity(t));
  const SpectralDecomposition dec = decompose(r.op, r.constants);
  EXPECT_NEAR(dec.omega(), std::numbers::pi / 3.0, 1e-15);
  EXPECT_LE(dec.reconstruction_error(), 1e-9);
  EXPECT_EQ(dec.kernel_count(), 2);
  // Oracle: each nonzero |xi_k| appears as +|xi| and -|xi|; the Nyquist mode pairs with itself.
  std::vector<double> expected, got;
  for (int q = 0; q < t.point_count(); ++q) {
    const double xi = std::abs(t.frequency(q, 0));
    if (xi == 0.0) continue;
    expected.push_back(xi);
    expected.push_back(-xi);
  }
  for (Eigen::Index j = 0; j < dec.dim(); ++j) {
    if (dec.kernel_mask()[static_cast<std::size_t>(j)]) continue;
    EXPECT_LE(std::abs(dec.eigenvalues()[j].imag()), 1e-10);
    got.push_back(dec.eigenvalues()[j].real());
  }
  std::sort(expected.begin(), expected.end());
  std::sort(got.begin(), got.end());
  ASSERT_EQ(expected.size(), got.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-10 * std::abs(expected[i]));
  EXPECT_TRUE(dec.in_sector());
}

TEST(Decompose, KkptSpectrumIsReal) {
  const Torus t(1, 32);
  for (double k : {1.0, 4.0}) {
    const Restricted r = on_h1(families::kkpt(t, k));
    const SpectralDecomposition dec = decompose(r.op, r.constants);
    for (Eigen::Index j = 0; j < dec.dim(); ++j)
      EXPECT_LE(std::abs(dec.eigenvalues()[j].imag()), 1e-8 * dec.max_abs_eigenvalue()) << "k=" << k;
  }
}

TEST(Decompose, ZeroOperatorIsAllKernel) {
  const OperatorMatrix zero{Matrix::Zero(6, 6), "custom"};
  const SpectralDecomposition dec = decompose(zero, {});
  EXPECT_EQ(dec.kernel_count(), 6);
  EXPECT_THROW((void)dec.min_nonkernel_abs(), NumericalFailure);
  EXPECT_THROW((void)quadratic_constants(dec), NumericalFailure);
}

TEST(Decompose, IllConditionedEigenbasisRaises) {
  Matrix a(2, 2);
  a << 1.0, 1.0, 0.0, 1.0 + 1e-12;
  EXPECT_THROW((void)decompose({a, "custom"}, {}), IllConditionedEigenbasis);
  DecompositionOptions lenient;
  lenient.throw_on_ill_conditioned = false;
  EXPECT_GT(decompose({a, "custom"}, {}, lenient).cond_v(), 1e8);
}

TEST(ApplyFunction, CauchyOperatorForLaplacian) {
  const Torus t(1, 16, 2.0 * std::numbers::pi);
  const Restricted r = on_h1(CoefficientField::identity(t));
  const SpectralDecomposition dec = decompose(r.op, r.constants);
  const Matrix e = apply_function(dec, FunctionDescriptor::sgn()).entries;
  // Mode xi = 2 > 0 in coordinates (2p: e0, 2p+1: e1); sgn block is [[0, i], [-i, 0]].
  const Complex i(0.0, 1.0);
  for (int xi : {2, -3}) {
    Vector e0(dec.dim()), e1(dec.dim());
    for (int p = 0; p < t.point_count(); ++p) {
      const Complex ph = std::polar(1.0, xi * t.coordinate(p, 0));
      e0[2 * p] = ph;
      e0[2 * p + 1] = 0.0;
      e1[2 * p] = 0.0;
      e1[2 * p + 1] = ph;
    }
    const double s = xi > 0 ? 1.0 : -1.0;
    EXPECT_LE((e * e0 - (-i * s) * e1).norm(), 1e-10 * e0.norm());
    EXPECT_LE((e * e1 - (i * s) * e0).norm(), 1e-10 * e0.norm());
  }
}

TEST(ApplyFunction, PartitionAndReflectionIdentities) {
  const Torus t(1, 32);
  const Restricted r = on_h1(families::smooth_accretive(t, 3));
  const SpectralDecomposition dec = decompose(r.op, r.constants);
  const Matrix plus = apply_function(dec, FunctionDescriptor::chi_plus()).entries;
  const Matrix minus = apply_function(dec, FunctionDescriptor::chi_minus()).entries;
  const Matrix e = apply_function(dec, FunctionDescriptor::sgn()).entries;
  const Matrix ker = kernel_projection(dec);
  const Matrix id = Matrix::Identity(dec.dim(), dec.dim());
  EXPECT_LE((plus + minus + ker - id).norm(), 1e-10 * std::sqrt(static_cast<double>(dec.dim())));
  EXPECT_LE((e * e - (id - ker)).norm(), 1e-9 * e.norm());
  EXPECT_LE((plus * plus - plus).norm(), 1e-9 * plus.norm());
  EXPECT_LE((plus * minus).norm(), 1e-9 * plus.norm());
  EXPECT_LE((apply_function(dec, FunctionDescriptor::exp_minus_t_abs(0.0)).entries - id).norm(), 1e-10 * e.norm());
}

TEST(ApplyFunction, SemigroupAndResolventAlgebra) {
  const Torus t(1, 32);
  const Restricted r = on_h1(families::smooth_real_symmetric(t, 5));
  const SpectralDecomposition dec = decompose(r.op, r.constants);
  const Matrix ker = kernel_projection(dec);
  const Matrix id = Matrix::Identity(dec.dim(), dec.dim());
  const Matrix nk = id - ker;
  const Matrix es = apply_function(dec, FunctionDescriptor::exp_minus_t_abs(0.3)).entries;
  const Matrix et = apply_function(dec, FunctionDescriptor::exp_minus_t_abs(0.7)).entries;
  const Matrix est = apply_function(dec, FunctionDescriptor::exp_minus_t_abs(1.0)).entries;
  EXPECT_LE(((est - es * et) * nk).norm(), 1e-9 * est.norm());

  for (double s : {0.01, 0.5, 3.0}) {
    const Matrix p = apply_function(dec, FunctionDescriptor::p_t(s)).entries;
    const Matrix q = apply_function(dec, FunctionDescriptor::q_t(s)).entries;
    EXPECT_LE((p - id + s * r.op.entries * q).norm(), 1e-10 * std::max(1.0, p.norm())) << "t=" << s;
    EXPECT_LE((p - evaluate_direct(r.op, FunctionDescriptor::p_t(s)).entries).norm(), 1e-9 * p.norm());
  }
}

TEST(Resolvent, SpectralRouteMatchesDirectSolve) {
  const Torus t(1, 32);
  const Restricted r = on_h1(families::smooth_accretive(t, 6));
  const SpectralDecomposition dec = decompose(r.op, r.constants);
  const Complex i(0.0, 1.0);
  const Matrix spectral = apply_function(dec, FunctionDescriptor::resolvent(i)).entries;
  const Matrix direct = resolvent_direct(r.op, i).entries;
  EXPECT_LE((spectral - direct).norm(), 1e-9 * direct.norm());

  // sup_t ||(I + i t T)^{-1}|| stays bounded on a log grid.
  double worst = 0.0;
  const Matrix id = Matrix::Identity(dec.dim(), dec.dim());
  for (double s = 1e-3; s <= 1e3; s *= 3.0)
    worst = std::max(worst, linalg::spectral_norm(linalg::checked_inverse(id + i * s * r.op.entries)));
  EXPECT_LT(worst, 10.0);

  EXPECT_THROW((void)resolvent_direct(on_h1(CoefficientField::identity(t)).op, 0.0), SingularOperator);
}

TEST(Sector, ViolationsAreReported) {
  EXPECT_THROW((void)sector_abs(Complex(0.0, 2.0)), SectorViolation);
  EXPECT_EQ(sector_abs(Complex(-2.0, 1.0)), Complex(2.0, -1.0));
  Matrix rot(2, 2);
  rot << 0.0, 1.0, -1.0, 0.0;
  const SpectralDecomposition dec = decompose({rot, "custom"}, {});
  EXPECT_THROW((void)apply_function(dec, FunctionDescriptor::sgn()), SectorViolation);
  EXPECT_FALSE(dec.in_sector());
}

TEST(Sector, VariableCoefficientsStayInside) {
  const Torus t(1, 64);
  for (const auto& b : {families::smooth_accretive(t, 1), families::smooth_block(t, 2)}) {
    const Restricted r = on_h1(b);
    const SpectralDecomposition dec = decompose(r.op, r.constants);
    EXPECT_GE(dec.min_sector_margin(), -1e-2);
  }
}

TEST(QuadraticNorm, SelfAdjointClosedForm) {
  std::mt19937_64 rng(17);
  const Torus t(1, 64);
  for (const auto& b : {CoefficientField::identity(t), families::kkpt(t, 2.0)}) {
    const Restricted r = on_h1(b);
    const SpectralDecomposition dec = decompose(r.op, r.constants);
    const Vector f = nonkernel_part(dec, random_vector_of(dec.dim(), rng));
    const double q = quadratic_norm(dec, f);
    EXPECT_NEAR(q * q, 0.5 * f.squaredNorm(), 1e-4 * 0.5 * f.squaredNorm());
    const Vector k = kernel_projection(dec) * random_vector_of(dec.dim(), rng);
    EXPECT_LE(quadratic_norm(dec, k), 1e-12 * k.norm());
  }
}

TEST(QuadraticConstants, IdentityAndComparability) {
  const Torus t(1, 64);
  const Restricted r = on_h1(CoefficientField::identity(t));
  const SpectralDecomposition dec = decompose(r.op, r.constants);
  const QuadraticConstants c = quadratic_constants(dec);
  EXPECT_NEAR(c.c_low, 1.0 / std::sqrt(2.0), 1e-3);
  EXPECT_NEAR(c.c_high, 1.0 / std::sqrt(2.0), 1e-3);
  EXPECT_EQ(c.nonkernel_dim, dec.dim() - 2);

  const Restricted acc = on_h1(families::smooth_accretive(t, 9));
  const SpectralDecomposition dacc = decompose(acc.op, acc.constants);
  QuadratureOptions psi;
  psi.symbol = QuadraticSymbol::psi_exp;
  const QuadraticConstants cq = quadratic_constants(dacc);
  const QuadraticConstants cp = quadratic_constants(dacc, psi);
  EXPECT_GT(cq.c_low, 0.0);
  EXPECT_GT(cp.c_low, 0.0);
  for (double ratio : {cq.c_low / cp.c_low, cq.c_high / cp.c_high}) {
    EXPECT_LE(ratio, 10.0);
    EXPECT_GE(ratio, 0.1);
  }
}

TEST(Lipschitz, DegenerateAndBoundedRatios) {
  const Torus t(1, 32);
  const Restricted r = on_h1(CoefficientField::identity(t));
  const SpectralDecomposition dec = decompose(r.op, r.constants);
  const LipschitzSample same = lipschitz_probe(dec, dec, 0.0, FunctionDescriptor::sgn());
  EXPECT_TRUE(same.degenerate);
  EXPECT_EQ(same.ratio, 0.0);

  families::DirectionOptions opts;
  opts.hermitian = true;
  const auto dir = families::smooth_direction(t, 4, opts);
  const auto h1 = [](const Torus& tor) { return hat_h1_basis(tor); };
  for (const auto& b : {FunctionDescriptor::sgn(), FunctionDescriptor::exp_minus_t_abs(0.5)}) {
    const auto samples = lipschitz_sweep(CoefficientField::identity(t), dir, {1e-1, 1e-2, 1e-3}, b, h1);
    double lo = samples.front().ratio, hi = lo;
    for (const auto& s : samples) {
      lo = std::min(lo, s.ratio);
      hi = std::max(hi, s.ratio);
      EXPECT_NEAR(s.coefficient_distance, s.eps, 1e-12);
    }
    EXPECT_GT(lo, 0.0);
    EXPECT_LE(hi / lo, 3.0) << b.name();
  }
}

TEST(SpectrumCsv, HeaderAndRows) {
  const Torus t(1, 8);
  const Restricted r = on_h1(CoefficientField::identity(t));
  const SpectralDecomposition dec = decompose(r.op, r.constants);
  const std::string csv = spectrum_csv(dec);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "re,im,kernel,sector_margin");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), dec.dim() + 1);
}
