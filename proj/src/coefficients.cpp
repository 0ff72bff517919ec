#include "diracbvp/coefficients.hpp"

#include <cmath>

#include "diracbvp/errors.hpp"

namespace diracbvp::families {

namespace {

constexpr int kSmoothModes = 2;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Matrix random_matrix(int size, Rng& rng, bool real_valued) {
  Matrix m(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) m(i, j) = Complex(uniform(rng, -1, 1), real_valued ? 0.0 : uniform(rng, -1, 1));
  return m;
}

void normalize_sup(std::vector<Matrix>& field) {
  double sup = 0.0;
  for (const Matrix& r : field) sup = std::max(sup, operator_norm(r));
  if (sup == 0.0) throw NumericalFailure("smooth_matrix_field: degenerate draw");
  for (Matrix& r : field) r /= sup;
}

/// Per-degree random field, assembled into Lambda matrices, optionally keeping only normal/normal and
/// tangential/tangential couplings.
std::vector<Matrix> degree_preserving_field(const Torus& torus, Rng& rng, bool block_structured, bool real_valued,
                                            bool vector_only) {
  const int n = torus.dim_n();
  const int m = torus.lambda_dim();
  std::vector<Matrix> out(torus.point_count(), Matrix::Zero(m, m));
  for (int k = 0; k <= n + 1; ++k) {
    if (vector_only && k != 1) continue;
    const auto masks = degree_masks(n, k);
    const int size = static_cast<int>(masks.size());
    std::vector<Matrix> block = smooth_matrix_field(torus, size, rng, real_valued);
    for (int p = 0; p < torus.point_count(); ++p)
      for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
          if (block_structured && masks[i].contains_normal() != masks[j].contains_normal()) continue;
          out[p](masks[i].bits(), masks[j].bits()) = block[p](i, j);
        }
  }
  return out;
}

std::vector<Matrix> random_diagonal_base(const Torus& torus, Rng& rng, double lo, double hi) {
  const int m = torus.lambda_dim();
  Matrix base = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) base(i, i) = uniform(rng, lo, hi);
  return std::vector<Matrix>(torus.point_count(), base);
}

CoefficientField accretive_family(const Torus& torus, std::uint64_t seed, bool block_structured) {
  Rng rng(seed);
  std::vector<Matrix> maps = random_diagonal_base(torus, rng, 1.0, 1.5);
  std::vector<Matrix> wiggle = degree_preserving_field(torus, rng, block_structured, false, false);
  normalize_sup(wiggle);
  for (int p = 0; p < torus.point_count(); ++p) maps[p] += 0.6 * wiggle[p];
  return CoefficientField(torus, std::move(maps));
}

}  // namespace

ScalarField periodic_sign(const Torus& torus) {
  if (torus.dim_n() != 1) throw InvalidArgument("periodic_sign: n = 1 only");
  ScalarField s(torus);
  for (int p = 0; p < torus.point_count(); ++p) s.values()[p] = (2 * p < torus.points_per_axis()) ? 1.0 : -1.0;
  return s;
}

CoefficientField kkpt(const Torus& torus, double k) {
  const ScalarField s = periodic_sign(torus);
  std::vector<Matrix> blocks(torus.point_count(), Matrix(2, 2));
  for (int p = 0; p < torus.point_count(); ++p) {
    const double ks = k * s.values()[p].real();
    blocks[p] << 1.0, ks, -ks, 1.0;
  }
  return CoefficientField::from_vector_block(torus, blocks);
}

Matrix random_accretive_matrix(int size, Rng& rng) {
  Matrix r = random_matrix(size, rng, false);
  r /= operator_norm(r);
  Matrix base = Matrix::Zero(size, size);
  for (int i = 0; i < size; ++i) base(i, i) = uniform(rng, 1.0, 2.0);
  return base + 0.8 * r;
}

std::vector<Matrix> smooth_matrix_field(const Torus& torus, int size, Rng& rng, bool real_valued) {
  std::vector<Matrix> out(torus.point_count(), Matrix::Zero(size, size));
  const int modes_second = torus.dim_n() == 2 ? kSmoothModes : 0;
  for (int k0 = 0; k0 <= kSmoothModes; ++k0)
    for (int k1 = -modes_second; k1 <= modes_second; ++k1) {
      const Matrix c = random_matrix(size, rng, real_valued);
      const Matrix s = random_matrix(size, rng, real_valued);
      const double decay = 1.0 / (1.0 + k0 * k0 + k1 * k1);
      for (int p = 0; p < torus.point_count(); ++p) {
        double phase = 2.0 * std::numbers::pi * k0 * torus.coordinate(p, 0) / torus.period();
        if (torus.dim_n() == 2) phase += 2.0 * std::numbers::pi * k1 * torus.coordinate(p, 1) / torus.period();
        out[p] += decay * (std::cos(phase) * c + std::sin(phase) * s);
      }
    }
  normalize_sup(out);
  return out;
}

CoefficientField smooth_real_symmetric(const Torus& torus, std::uint64_t seed, double kappa_floor) {
  Rng rng(seed);
  const int n = torus.dim_n();
  Matrix base = Matrix::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) base(i, i) = uniform(rng, 1.0, 2.0);
  std::vector<Matrix> r = smooth_matrix_field(torus, n + 1, rng, true);
  for (Matrix& x : r) x = 0.5 * (x + x.transpose()).eval();
  normalize_sup(r);
  std::vector<Matrix> blocks(torus.point_count());
  for (int p = 0; p < torus.point_count(); ++p) blocks[p] = base + 0.6 * r[p];
  CoefficientField b = CoefficientField::from_vector_block(torus, blocks);
  if (b.kappa() < kappa_floor) throw NumericalFailure("smooth_real_symmetric: accretivity below requested floor");
  return b;
}

CoefficientField smooth_accretive(const Torus& torus, std::uint64_t seed) { return accretive_family(torus, seed, false); }

CoefficientField smooth_block(const Torus& torus, std::uint64_t seed) { return accretive_family(torus, seed, true); }

CoefficientField smooth_direction(const Torus& torus, std::uint64_t seed, DirectionOptions options) {
  Rng rng(seed);
  std::vector<Matrix> maps =
      degree_preserving_field(torus, rng, options.block_structured, false, options.vector_block_only);
  if (options.hermitian)
    for (Matrix& b : maps) b = 0.5 * (b + b.adjoint()).eval();
  normalize_sup(maps);
  return CoefficientField(torus, std::move(maps));
}

}  // namespace diracbvp::families
