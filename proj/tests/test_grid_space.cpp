#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "diracbvp/coefficients.hpp"
#include "diracbvp/errors.hpp"
#include "diracbvp/grid_space.hpp"
#include "diracbvp/io.hpp"
#include "test_support.hpp"

using namespace diracbvp;
using diracbvp::testing::random_field;

namespace {

constexpr double kPi = std::numbers::pi;

Field basis_field(const Torus& t, BasisIndex s, const std::function<Complex(double, double)>& profile) {
  Field f(t);
  for (int p = 0; p < t.point_count(); ++p)
    f.coeff(p, s) = profile(t.coordinate(p, 0), t.dim_n() > 1 ? t.coordinate(p, 1) : 0.0);
  return f;
}

// Oracle: naive DFT of one component.
Complex naive_coefficient(const Field& f, BasisIndex s, int q) {
  const Torus& t = f.torus();
  Complex acc = 0.0;
  for (int p = 0; p < t.point_count(); ++p) {
    double phase = 0.0;
    for (int a = 0; a < t.dim_n(); ++a) phase += t.frequency(q, a) * t.coordinate(p, a);
    acc += f.coeff(p, s) * std::polar(1.0, -phase);
  }
  return acc / static_cast<double>(t.point_count());
}

}  // namespace

TEST(Torus, Validation) {
  EXPECT_THROW(Torus(3, 8), InvalidArgument);
  EXPECT_THROW(Torus(1, 12), InvalidArgument);
  EXPECT_THROW(Torus(1, 4), InvalidArgument);
  EXPECT_THROW(Torus(2, 64), InvalidArgument);
  EXPECT_THROW(Torus(1, 16, -1.0), InvalidArgument);
  const Torus t(2, 8, 4.0);
  EXPECT_EQ(t.point_count(), 64);
  EXPECT_EQ(t.field_dim(), 512);
  EXPECT_DOUBLE_EQ(t.coordinate(9, 0), 0.5);
  EXPECT_DOUBLE_EQ(t.coordinate(9, 1), 0.5);
  EXPECT_EQ(t.wavenumber(5), -3);
}

TEST(Fourier, ConstantAndSingleMode) {
  const Torus t(1, 16, 3.0);
  const Field c = basis_field(t, BasisIndex(1), [](double, double) { return Complex(2.0, 0.0); });
  const SpectralField sc = fourier_forward(c);
  EXPECT_NEAR(std::abs(sc.data[1] - 2.0), 0.0, 1e-14);
  EXPECT_NEAR(sc.data.norm(), 2.0, 1e-14);

  const Field mode = basis_field(t, BasisIndex(2), [&](double x, double) { return std::polar(1.0, 2 * kPi * x / 3.0); });
  const SpectralField sm = fourier_forward(mode);
  const int m = t.lambda_dim();
  EXPECT_NEAR(std::abs(sm.data[1 * m + 2] - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(sm.data.norm(), 1.0, 1e-14);
}

TEST(Fourier, MatchesNaiveSumAndRoundTrips) {
  std::mt19937_64 rng(3);
  for (const Torus& t : {Torus(1, 16), Torus(2, 8, 5.0)}) {
    const Field f = random_field(t, rng);
    const SpectralField s = fourier_forward(f);
    for (int q : {0, 1, 5, t.point_count() - 1})
      for (int b = 0; b < t.lambda_dim(); ++b)
        EXPECT_NEAR(std::abs(s.data[q * t.lambda_dim() + b] - naive_coefficient(f, BasisIndex(b), q)), 0.0, 1e-13);
    const Field back = fourier_inverse(s);
    EXPECT_LE((back.data() - f.data()).norm(), 1e-13 * f.data().norm());
    // Parseval with the (L/N)^n weight.
    EXPECT_NEAR(norm(f) * norm(f), std::pow(t.period(), t.dim_n()) * s.data.squaredNorm(), 1e-12 * norm(f) * norm(f));
  }
}

TEST(Derivatives, Examples) {
  const double L = 2.0 * kPi;
  const Torus t(1, 32, L);
  const Field sin_field = basis_field(t, BasisIndex(0), [&](double x, double) { return std::sin(2 * kPi * x / L); });
  const Field expected = basis_field(t, BasisIndex(2), [&](double x, double) { return 2 * kPi / L * std::cos(2 * kPi * x / L); });
  EXPECT_LE((d_op(sin_field).data() - expected.data()).norm(), 1e-12);
  const Field constant = basis_field(t, BasisIndex(0), [](double, double) { return Complex(3.0, 1.0); });
  EXPECT_LE(d_op(constant).data().norm(), 1e-13);
}

TEST(Derivatives, AlgebraicIdentities) {
  std::mt19937_64 rng(5);
  for (const Torus& t : {Torus(1, 16), Torus(2, 8)}) {
    const int n = t.dim_n();
    const Field f = random_field(t, rng);
    const Field g = random_field(t, rng);
    const double scale = d_op(f).data().norm();
    EXPECT_LE(d_op(d_op(f)).data().norm(), 1e-12 * scale);
    EXPECT_LE(d_star_op(d_star_op(f)).data().norm(), 1e-12 * scale);
    const Complex lhs = inner_product(d_op(f), g);
    const Complex rhs = inner_product(f, d_star_op(g));
    EXPECT_LE(std::abs(lhs - rhs), 1e-11 * std::abs(lhs));

    // {d, mu} = {d, mu*} = 0.
    auto apply = [&](const Matrix& op, const Field& h) {
      Field out(t);
      for (int p = 0; p < t.point_count(); ++p) out.set(p, MultiVector(n, op * h.at(p).coeffs()));
      return out;
    };
    const Matrix mu = mu_matrix(n), mus = mu_star_matrix(n);
    EXPECT_LE((d_op(apply(mu, f)) + apply(mu, d_op(f))).data().norm(), 1e-12 * scale);
    EXPECT_LE((d_op(apply(mus, f)) + apply(mus, d_op(f))).data().norm(), 1e-12 * scale);
  }
}

TEST(Derivatives, LaplacianOnSingleMode) {
  const Torus t(2, 8, 3.0);
  const int q = t.flat_index({2, 7});
  const double xi0 = t.frequency(q, 0), xi1 = t.frequency(q, 1);
  const Field f = basis_field(t, BasisIndex(0), [&](double x, double y) { return std::polar(1.0, xi0 * x + xi1 * y); });
  const Field lap = d_op(d_star_op(f)) + d_star_op(d_op(f));
  const Complex factor = xi0 * xi0 + xi1 * xi1;
  EXPECT_LE((lap.data() - factor * f.data()).norm(), 1e-11 * std::abs(factor) * f.data().norm());
}

TEST(InnerProduct, Examples) {
  const Torus t(1, 16);
  const Field e0 = basis_field(t, BasisIndex(1), [](double, double) { return Complex(1.0); });
  const Field e1 = basis_field(t, BasisIndex(2), [](double, double) { return Complex(1.0); });
  EXPECT_NEAR(norm(e0), std::sqrt(2 * kPi), 1e-13);
  EXPECT_EQ(inner_product(e0, e1), Complex(0.0));
  EXPECT_THROW(inner_product(e0, Field(Torus(1, 8))), DimensionMismatch);
}

TEST(Coefficients, IdentityScaledAndKkpt) {
  const Torus t(1, 16);
  std::mt19937_64 rng(1);
  const Field f = random_field(t, rng);
  const auto id = CoefficientField::identity(t);
  EXPECT_EQ(apply_coeff(id, f).data(), f.data());
  EXPECT_DOUBLE_EQ(id.kappa(), 1.0);
  EXPECT_DOUBLE_EQ(id.sup_norm(), 1.0);
  const auto two = CoefficientField::scaled_identity(t, 2.0);
  EXPECT_NEAR(two.kappa(), 2.0, 1e-15);
  EXPECT_NEAR(two.sup_norm(), 2.0, 1e-15);
  for (double k : {1.0, 4.0}) {
    const auto a = families::kkpt(t, k);
    // Oracle: [[1, k],[-k, 1]] is sqrt(1+k^2) times a rotation, with hermitian part I.
    EXPECT_NEAR(a.kappa(), 1.0, 1e-14);
    EXPECT_NEAR(a.sup_norm(), std::sqrt(1.0 + k * k), 1e-13);
    EXPECT_FALSE(a.is_hermitian());
  }
  EXPECT_LE((apply_coeff_inverse(two, apply_coeff(two, f)).data() - f.data()).norm(), 1e-14 * f.data().norm());
}

TEST(Coefficients, RejectsDegreeMixing) {
  const Torus t(1, 8);
  std::vector<Matrix> maps(8, Matrix::Identity(4, 4));
  maps[3](0, 1) = 0.5;
  EXPECT_THROW(CoefficientField(t, maps), InvalidArgument);
  std::vector<Matrix> singular(8, Matrix::Identity(4, 4));
  singular[5](2, 2) = 0.0;
  const CoefficientField s(t, singular);
  EXPECT_FALSE(s.is_invertible());
  try {
    s.inverse_at(0);
    FAIL();
  } catch (const SingularOperator& e) {
    EXPECT_EQ(e.grid_point(), 5);
  }
}

TEST(Coefficients, Families) {
  const Torus t(1, 32);
  const auto sym = families::smooth_real_symmetric(t, 3);
  EXPECT_TRUE(sym.is_hermitian(1e-12));
  EXPECT_GE(sym.kappa(), 0.3);
  const auto acc = families::smooth_accretive(t, 4);
  EXPECT_GT(acc.kappa(), 0.0);
  EXPECT_FALSE(acc.is_block(1e-8));
  const auto blk = families::smooth_block(t, 4);
  EXPECT_TRUE(blk.is_block());
  EXPECT_GT(blk.kappa(), 0.0);
  const auto dir = families::smooth_direction(t, 9, {});
  EXPECT_NEAR(dir.sup_norm(), 1.0, 1e-12);
}

TEST(FieldIo, CsvRoundTrip) {
  std::mt19937_64 rng(2);
  const Torus t(2, 8);
  const Field f = random_field(t, rng);
  const auto path = std::filesystem::temp_directory_path() / "diracbvp_field_roundtrip.csv";
  io::write_field_csv(path, f);
  const Field g = io::read_field_csv(path, t);
  EXPECT_EQ(f.data(), g.data());
  const std::string csv = io::field_csv(f);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "x0,x1,re_000,im_000,re_001,im_001,re_010,im_010,re_011,im_011,re_100,im_100,re_101,im_101,re_110,im_110,"
            "re_111,im_111");
  std::filesystem::remove(path);
}

TEST(FieldIo, MatrixDumpRoundTrip) {
  std::mt19937_64 rng(4);
  const Matrix m = diracbvp::testing::random_field(Torus(1, 8), rng).data().reshaped(8, 4);
  const auto path = std::filesystem::temp_directory_path() / "diracbvp_matrix.bin";
  io::write_matrix_binary(path, m);
  EXPECT_EQ(io::read_matrix_binary(path), m);
  std::filesystem::remove(path);
}
