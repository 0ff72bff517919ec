#include "diracbvp/exterior_algebra.hpp"

#include <bit>

#include "diracbvp/errors.hpp"

namespace diracbvp {

int BasisIndex::degree() const { return std::popcount(bits_); }

int sigma_count(BasisIndex s, BasisIndex t) {
  int count = 0;
  for (int i = 0; i < 32; ++i) {
    if (!s.contains(i)) continue;
    // elements of t strictly below i
    const std::uint32_t below = t.bits() & ((1u << i) - 1u);
    count += std::popcount(below);
  }
  return count;
}

MultiVector::MultiVector(int dim_n) : dim_n_(dim_n) {
  if (dim_n < 1 || dim_n > 8) throw InvalidArgument("MultiVector: dim_n must be in [1, 8]");
  coeffs_ = Vector::Zero(lambda_dim(dim_n));
}

MultiVector::MultiVector(int dim_n, Vector coeffs) : MultiVector(dim_n) {
  if (coeffs.size() != lambda_dim(dim_n)) throw DimensionMismatch("MultiVector: coefficient count must be 2^(n+1)");
  coeffs_ = std::move(coeffs);
}

MultiVector MultiVector::basis(int dim_n, BasisIndex s) {
  MultiVector out(dim_n);
  if (s.bits() >= static_cast<std::uint32_t>(lambda_dim(dim_n))) throw InvalidArgument("basis index out of range");
  out[s] = 1.0;
  return out;
}

MultiVector MultiVector::scalar(int dim_n, Complex value) {
  MultiVector out(dim_n);
  out.coeffs_[0] = value;
  return out;
}

MultiVector MultiVector::vector(int dim_n, const Eigen::Ref<const Eigen::VectorXd>& a) {
  if (a.size() != dim_n + 1) throw DimensionMismatch("vector: expected n+1 components");
  MultiVector out(dim_n);
  for (int i = 0; i <= dim_n; ++i) out.coeffs_[1u << i] = a[i];
  return out;
}

MultiVector MultiVector::degree_part(int k) const {
  MultiVector out(dim_n_);
  for (int b = 0; b < size(); ++b)
    if (BasisIndex(b).degree() == k) out.coeffs_[b] = coeffs_[b];
  return out;
}

MultiVector& MultiVector::operator+=(const MultiVector& other) {
  if (other.dim_n_ != dim_n_) throw DimensionMismatch("MultiVector dimension mismatch");
  coeffs_ += other.coeffs_;
  return *this;
}

MultiVector& MultiVector::operator-=(const MultiVector& other) {
  if (other.dim_n_ != dim_n_) throw DimensionMismatch("MultiVector dimension mismatch");
  coeffs_ -= other.coeffs_;
  return *this;
}

MultiVector& MultiVector::operator*=(Complex c) {
  coeffs_ *= c;
  return *this;
}

MultiVector operator+(MultiVector a, const MultiVector& b) { return a += b; }
MultiVector operator-(MultiVector a, const MultiVector& b) { return a -= b; }
MultiVector operator*(Complex c, MultiVector a) { return a *= c; }

namespace {

void require_same(const MultiVector& f, const MultiVector& g) {
  if (f.dim_n() != g.dim_n()) throw DimensionMismatch("multivectors of different dimension");
}

double sign_of(int count) { return (count % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

MultiVector wedge(const MultiVector& f, const MultiVector& g) {
  require_same(f, g);
  MultiVector out(f.dim_n());
  const int size = f.size();
  for (int s = 0; s < size; ++s) {
    if (f.coeffs()[s] == 0.0) continue;
    for (int t = 0; t < size; ++t) {
      if ((s & t) != 0 || g.coeffs()[t] == 0.0) continue;
      const double sign = sign_of(sigma_count(BasisIndex(s), BasisIndex(t)));
      out.coeffs()[s | t] += sign * f.coeffs()[s] * g.coeffs()[t];
    }
  }
  return out;
}

MultiVector hook(const MultiVector& f, const MultiVector& g) {
  require_same(f, g);
  MultiVector out(f.dim_n());
  const int size = f.size();
  for (int s = 0; s < size; ++s) {
    if (f.coeffs()[s] == 0.0) continue;
    for (int t = 0; t < size; ++t) {
      if ((s & t) != s || g.coeffs()[t] == 0.0) continue;
      const int rest = t & ~s;
      const double sign = sign_of(sigma_count(BasisIndex(s), BasisIndex(rest)));
      out.coeffs()[rest] += sign * f.coeffs()[s] * g.coeffs()[t];
    }
  }
  return out;
}

MultiVector mu(const MultiVector& f) { return wedge(MultiVector::basis(f.dim_n(), BasisIndex(1)), f); }

MultiVector mu_star(const MultiVector& f) { return hook(MultiVector::basis(f.dim_n(), BasisIndex(1)), f); }

MultiVector m_op(const MultiVector& f) { return mu(f) + mu_star(f); }

MultiVector normal_part(const MultiVector& f) {
  MultiVector out(f.dim_n());
  for (int b = 0; b < f.size(); ++b)
    if (BasisIndex(b).contains_normal()) out.coeffs()[b] = f.coeffs()[b];
  return out;
}

MultiVector tangential_part(const MultiVector& f) { return f - normal_part(f); }

MultiVector reflection_N(const MultiVector& f) { return tangential_part(f) - normal_part(f); }

Complex inner(const MultiVector& f, const MultiVector& g) {
  require_same(f, g);
  return g.coeffs().dot(f.coeffs());  // Eigen's dot conjugates its left operand
}

Complex dot(const MultiVector& f, const MultiVector& g) {
  require_same(f, g);
  return f.coeffs().cwiseProduct(g.coeffs()).sum();
}

namespace {

template <typename Op>
Matrix matrix_of(int dim_n, Op op) {
  const int size = lambda_dim(dim_n);
  Matrix out(size, size);
  for (int b = 0; b < size; ++b) out.col(b) = op(MultiVector::basis(dim_n, BasisIndex(b))).coeffs();
  return out;
}

}  // namespace

Matrix wedge_matrix(const MultiVector& a) {
  return matrix_of(a.dim_n(), [&](const MultiVector& f) { return wedge(a, f); });
}

Matrix hook_matrix(const MultiVector& a) {
  return matrix_of(a.dim_n(), [&](const MultiVector& f) { return hook(a, f); });
}

Matrix mu_matrix(int dim_n) { return matrix_of(dim_n, mu); }
Matrix mu_star_matrix(int dim_n) { return matrix_of(dim_n, mu_star); }
Matrix m_matrix(int dim_n) { return matrix_of(dim_n, m_op); }
Matrix normal_projector(int dim_n) { return matrix_of(dim_n, normal_part); }
Matrix tangential_projector(int dim_n) { return matrix_of(dim_n, tangential_part); }
Matrix reflection_matrix(int dim_n) { return matrix_of(dim_n, reflection_N); }

std::vector<BasisIndex> degree_masks(int dim_n, int k) {
  std::vector<BasisIndex> out;
  for (int b = 0; b < lambda_dim(dim_n); ++b)
    if (BasisIndex(b).degree() == k) out.emplace_back(b);
  return out;
}

}  // namespace diracbvp
