#include <gtest/gtest.h>

#include <numbers>

#include "diracbvp/coefficients.hpp"
#include "diracbvp/dirac_assembly.hpp"
#include "diracbvp/errors.hpp"
#include "diracbvp/linalg.hpp"
#include "test_support.hpp"

using namespace diracbvp;
using diracbvp::testing::random_field;
using diracbvp::testing::rel_diff;

namespace {

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

CoefficientField random_constant(const Torus& t, std::uint64_t seed) {
  families::Rng rng(seed);
  const int dim = t.lambda_dim();
  // Degree-preserving constant map: an accretive block on each degree.
  Matrix b = Matrix::Zero(dim, dim);
  for (int k = 0; k <= t.dim_n() + 1; ++k) {
    const auto masks = degree_masks(t.dim_n(), k);
    const Matrix blk = families::random_accretive_matrix(static_cast<int>(masks.size()), rng);
    for (std::size_t i = 0; i < masks.size(); ++i)
      for (std::size_t j = 0; j < masks.size(); ++j)
        b(masks[i].bits(), masks[j].bits()) = blk(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return CoefficientField(t, std::vector<Matrix>(static_cast<std::size_t>(t.point_count()), b));
}

Field mode_field(const Torus& t, int q, BasisIndex s) {
  Field f(t);
  for (int p = 0; p < t.point_count(); ++p) {
    double phase = 0.0;
    for (int a = 0; a < t.dim_n(); ++a) phase += t.frequency(q, a) * t.coordinate(p, a);
    f.coeff(p, s) = std::polar(1.0, phase);
  }
  return f;
}

}  // namespace

TEST(OperatorMatrices, MatchFieldOperators) {
  std::mt19937_64 rng(21);
  for (const Torus& t : {Torus(1, 8, 3.0), Torus(2, 8)}) {
    const Field f = random_field(t, rng);
    const auto b = families::smooth_accretive(t, 5);
    EXPECT_LE((d_matrix(t) * f.data() - d_op(f).data()).norm(), 1e-12 * f.data().norm());
    EXPECT_LE((d_star_matrix(t) * f.data() - d_star_op(f).data()).norm(), 1e-12 * f.data().norm());
    EXPECT_LE((underline_d_matrix(t) * f.data() - underline_d(f).data()).norm(), 1e-12 * f.data().norm());
    EXPECT_LE((underline_d_star_matrix(b) * f.data() - underline_d_star_B(f, b).data()).norm(), 1e-11 * f.data().norm());
  }
}

TEST(AssembleMB, IdentityAndBlockGiveN) {
  const Torus t(1, 8);
  const Matrix n = assemble_N(t).entries;
  EXPECT_EQ(assemble_MB(CoefficientField::identity(t)).entries, n);
  // Oracle: diagonal -1 on normal masks, +1 on tangential masks.
  for (int p = 0; p < t.point_count(); ++p)
    for (int s = 0; s < t.lambda_dim(); ++s) EXPECT_EQ(n(p * 4 + s, p * 4 + s), Complex((s & 1) ? -1.0 : 1.0));
  EXPECT_LE(rel_diff(assemble_MB(families::smooth_block(t, 3)).entries, n), 1e-15);
}

TEST(AssembleMB, CommutesWithProjections) {
  const Torus t(1, 8);
  const auto b = families::smooth_accretive(t, 8);
  const Matrix mb_inv = linalg::checked_inverse(assemble_MB(b).entries);
  const Matrix bmat = pointwise_matrix(t, b.maps());
  const Matrix binv = linalg::checked_inverse(bmat);
  const Matrix nplus = pointwise_matrix(t, tangential_projector(1));
  const Matrix nminus = pointwise_matrix(t, normal_projector(1));
  EXPECT_LE(((binv * nminus * bmat) * mb_inv - mb_inv * nminus).norm(), 1e-10 * mb_inv.norm());
  EXPECT_LE(((binv * nplus * bmat) * mb_inv - mb_inv * nplus).norm(), 1e-10 * mb_inv.norm());
}

TEST(AssembleMB, ReportsSingularPoint) {
  const Torus t(1, 8);
  std::vector<Matrix> maps(8, Matrix::Identity(4, 4));
  maps[6](0, 0) = 0.0;
  try {
    (void)assemble_MB(CoefficientField(t, maps));
    FAIL() << "expected SingularOperator";
  } catch (const SingularOperator& e) {
    EXPECT_EQ(e.grid_point(), 6);
  }
}

TEST(AssembleTB, LaplacianSymbolOnModes) {
  const Torus t(1, 16, 5.0);
  const Matrix tb = assemble_TB(CoefficientField::identity(t)).entries;
  for (int q : {1, 3, 8, 13}) {
    const double xi = t.frequency(q, 0);
    const Field e0 = mode_field(t, q, BasisIndex(1));
    const Field e1 = mode_field(t, q, BasisIndex(2));
    const Complex i(0.0, 1.0);
    // Columns of [[0, i xi], [-i xi, 0]].
    EXPECT_LE((tb * e0.data() - (-i * xi) * e1.data()).norm(), 1e-11 * std::abs(xi) * 4.0);
    EXPECT_LE((tb * e1.data() - (i * xi) * e0.data()).norm(), 1e-11 * std::abs(xi) * 4.0);
  }
}

TEST(AssembleTB, HermitianForIdentity) {
  for (const Torus& t : {Torus(1, 16), Torus(2, 8)}) {
    const Matrix tb = assemble_TB(CoefficientField::identity(t)).entries;
    EXPECT_LE((tb - tb.adjoint()).norm(), 1e-11 * tb.norm());
  }
}

TEST(AssembleTB, BlockSplitsIntoNilpotentParts) {
  const Torus t(1, 8);
  const auto b = families::smooth_block(t, 2);
  const Matrix gamma = assemble_gamma(t).entries;
  const Matrix bmat = pointwise_matrix(t, b.maps());
  const Matrix tb = assemble_TB(b).entries;
  const Matrix split = gamma + linalg::checked_inverse(bmat) * gamma.adjoint() * bmat;
  EXPECT_LE((tb - split).norm(), 1e-11 * tb.norm());
  EXPECT_LE((gamma * gamma).norm(), 1e-11 * gamma.norm() * gamma.norm());
}

TEST(Reflections, IdentityBlockAndProjectionIdentities) {
  const Torus t(1, 8);
  const ReflectionPair id = assemble_NB(CoefficientField::identity(t));
  EXPECT_EQ(id.plus.entries, pointwise_matrix(t, tangential_projector(1)));
  EXPECT_EQ(id.minus.entries, pointwise_matrix(t, normal_projector(1)));
  EXPECT_LE(rel_diff(assemble_NB(families::smooth_block(t, 6)).reflection.entries, assemble_N(t).entries), 1e-14);

  for (const auto& pair : {assemble_NB(families::smooth_accretive(t, 4)), assemble_NB_hut(families::smooth_accretive(t, 4))}) {
    const Matrix& p = pair.plus.entries;
    const Matrix& m = pair.minus.entries;
    const double s = p.norm();
    EXPECT_LE((p * p - p).norm(), 1e-11 * s);
    EXPECT_LE((p * m).norm(), 1e-11 * s);
    EXPECT_LE((p + m - identity(p.rows())).norm(), 1e-11 * s);
  }
}

TEST(Reflections, RangesMatchSplitting) {
  // Range of N_B^- is normal; B N_B^+ f is tangential.
  const Torus t(1, 8);
  const auto b = families::smooth_accretive(t, 9);
  const ReflectionPair nb = assemble_NB(b);
  const Matrix bmat = pointwise_matrix(t, b.maps());
  const Matrix nplus = pointwise_matrix(t, tangential_projector(1));
  const Matrix nminus = pointwise_matrix(t, normal_projector(1));
  EXPECT_LE((nplus * nb.minus.entries).norm(), 1e-12 * nb.minus.entries.norm());
  EXPECT_LE((nminus * bmat * nb.plus.entries).norm(), 1e-12 * nb.plus.entries.norm());
}

TEST(Subspaces, HatH1Dimensions) {
  for (int pts : {8, 16}) {
    const SubspaceBasis b1 = hat_h1_basis(Torus(1, pts));
    EXPECT_EQ(b1.dim(), 2 * pts);
  }
  for (int pts : {8, 16}) {
    const Torus t(2, pts);
    const SubspaceBasis b2 = hat_h1_basis(t);
    EXPECT_EQ(b2.dim(), 2 * pts * pts + 1);
    EXPECT_LE((b2.columns.adjoint() * b2.columns - identity(b2.dim())).norm(), 1e-12);
    // Oracle: every column is curl-free in its tangential part and purely degree one.
    const Matrix dx = d_matrix(t) * pointwise_matrix(t, tangential_projector(2));
    EXPECT_LE((dx * b2.columns).norm(), 1e-11 * b2.columns.norm());
  }
}

TEST(Subspaces, HatHkDimensionsByModeCount) {
  const Torus t1(1, 8);
  const auto id1 = CoefficientField::identity(t1);
  EXPECT_EQ(hat_hk_basis(id1, 0).dim(), 1);   // constants
  EXPECT_EQ(hat_hk_basis(id1, 1).dim(), 16);  // all vector fields
  EXPECT_EQ(hat_hk_basis(id1, 2).dim(), 1);   // b f e01 with b f constant
  EXPECT_EQ(hat_hk_basis(families::smooth_block(t1, 1), 2).dim(), 1);

  const Torus t2(2, 8);
  const auto id2 = CoefficientField::identity(t2);
  EXPECT_EQ(hat_hk_basis(id2, 0).dim(), 1);
  EXPECT_EQ(hat_hk_basis(id2, 1).dim(), 2 * 64 + 1);
  // Tangential e12 part free (N^2); normal part divergence free (N^2 - 1 + 2).
  EXPECT_EQ(hat_hk_basis(id2, 2).dim(), 2 * 64 + 1);
  EXPECT_EQ(hat_hk_basis(id2, 3).dim(), 1);
  EXPECT_THROW((void)hat_hk_basis(id2, 4), InvalidArgument);
}

TEST(Restriction, IdentityAndInvariance) {
  const Torus t(1, 16);
  const SubspaceBasis h1 = hat_h1_basis(t);
  const OperatorMatrix id{identity(t.field_dim()), "full"};
  EXPECT_LE((restrict(id, h1).entries - identity(h1.dim())).norm(), 0.0);

  const Restriction r = restrict_with_defect(assemble_TB(families::smooth_accretive(t, 2)), h1);
  EXPECT_LE(r.defect, 1e-10);
  // An operator mixing degrees is rejected.
  const OperatorMatrix mix{pointwise_matrix(t, m_matrix(1)), "full"};
  EXPECT_THROW((void)restrict(mix, h1), SubspaceInvarianceError);

  const Torus t2(2, 8);
  const Restriction r2 = restrict_with_defect(assemble_TB(families::smooth_accretive(t2, 3)), hat_h1_basis(t2));
  EXPECT_LE(r2.defect, 1e-10);
}

TEST(Restriction, HatHkInvariantUnderTB) {
  const Torus t(2, 8);
  const auto b = families::smooth_block(t, 4);
  for (int k : {0, 2, 3}) {
    const Restriction r = restrict_with_defect(assemble_TB(b), hat_hk_basis(b, k));
    EXPECT_LE(r.defect, 1e-9) << "k=" << k;
  }
}

TEST(Duality, AdjointIdentities) {
  for (const Torus& t : {Torus(1, 8), Torus(2, 8)}) {
    const auto b = families::smooth_accretive(t, 12);
    const auto bs = b.adjoint();
    const OperatorMatrix tb = assemble_TB(b);
    const Matrix lhs = adjoint_in_duality(tb, b).entries;
    const Matrix rhs = -assemble_TB(bs).entries;
    EXPECT_LE((lhs - rhs).norm() / rhs.norm(), 1e-10);

    const Matrix n = assemble_N(t).entries;
    EXPECT_LE((adjoint_in_duality({n, "full"}, b).entries - n).norm() / n.norm(), 1e-10);

    const Matrix nb = assemble_NB(b).reflection.entries;
    const Matrix hut = assemble_NB_hut(bs).reflection.entries;
    EXPECT_LE((adjoint_in_duality({nb, "full"}, b).entries - hut).norm() / hut.norm(), 1e-10);
  }
}

TEST(Duality, PairingMatchesWeight) {
  std::mt19937_64 rng(13);
  const Torus t(1, 8);
  const auto b = families::smooth_accretive(t, 1);
  const Field f = random_field(t, rng), g = random_field(t, rng);
  const Matrix w = pointwise_matrix(t, duality_weight(b));
  const Complex expected = t.cell_weight() * g.data().dot(w * f.data());
  EXPECT_LE(std::abs(duality_pairing(f, g, b) - expected), 1e-12 * std::abs(expected));
}

TEST(Hodge, IdentityConstantAndAccretiveSplitting) {
  const Torus t(1, 8);
  const HodgeSplitting id = hodge_splitting(CoefficientField::identity(t));
  EXPECT_NEAR(id.constant, 2.0, 1e-9);
  EXPECT_EQ(id.range_dim + id.null_dim, t.field_dim());
  const HodgeSplitting acc = hodge_splitting(families::smooth_accretive(t, 7));
  EXPECT_GE(acc.constant, 2.0 - 1e-9);
  EXPECT_TRUE(std::isfinite(acc.constant));
}
