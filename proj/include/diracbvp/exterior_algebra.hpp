#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace diracbvp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Subset of {0, ..., n} encoded as a bitmask (bit i <-> index i). Index 0 is the normal direction.
class BasisIndex {
 public:
  constexpr BasisIndex() = default;
  constexpr explicit BasisIndex(std::uint32_t bits) : bits_(bits) {}
  constexpr std::uint32_t bits() const { return bits_; }
  int degree() const;
  constexpr bool contains(int i) const { return (bits_ >> i) & 1u; }
  constexpr bool contains_normal() const { return contains(0); }
  constexpr bool operator==(const BasisIndex&) const = default;

 private:
  std::uint32_t bits_ = 0;
};

/// Number of basis multivectors of Lambda(R^{n+1}).
constexpr int lambda_dim(int dim_n) { return 1 << (dim_n + 1); }

/// #{(i, j) : i in s, j in t, i > j}.
int sigma_count(BasisIndex s, BasisIndex t);

class MultiVector {
 public:
  explicit MultiVector(int dim_n);
  MultiVector(int dim_n, Vector coeffs);

  static MultiVector basis(int dim_n, BasisIndex s);
  static MultiVector scalar(int dim_n, Complex value);
  /// Vector part sum_i a_i e_i with a of length n + 1.
  static MultiVector vector(int dim_n, const Eigen::Ref<const Eigen::VectorXd>& a);

  int dim_n() const { return dim_n_; }
  int size() const { return static_cast<int>(coeffs_.size()); }
  const Vector& coeffs() const { return coeffs_; }
  Vector& coeffs() { return coeffs_; }
  Complex operator[](BasisIndex s) const { return coeffs_[s.bits()]; }
  Complex& operator[](BasisIndex s) { return coeffs_[s.bits()]; }

  MultiVector degree_part(int k) const;
  double norm() const { return coeffs_.norm(); }

  MultiVector& operator+=(const MultiVector& other);
  MultiVector& operator-=(const MultiVector& other);
  MultiVector& operator*=(Complex c);

 private:
  int dim_n_;
  Vector coeffs_;
};

MultiVector operator+(MultiVector a, const MultiVector& b);
MultiVector operator-(MultiVector a, const MultiVector& b);
MultiVector operator*(Complex c, MultiVector a);

MultiVector wedge(const MultiVector& f, const MultiVector& g);
MultiVector hook(const MultiVector& f, const MultiVector& g);

MultiVector mu(const MultiVector& f);
MultiVector mu_star(const MultiVector& f);
MultiVector m_op(const MultiVector& f);

MultiVector normal_part(const MultiVector& f);
MultiVector tangential_part(const MultiVector& f);
MultiVector reflection_N(const MultiVector& f);

Complex inner(const MultiVector& f, const MultiVector& g);
Complex dot(const MultiVector& f, const MultiVector& g);

// Matrices on the coefficient space, built by applying the products above to basis elements.
Matrix wedge_matrix(const MultiVector& a);  // f -> a ^ f
Matrix hook_matrix(const MultiVector& a);   // f -> a _| f
Matrix mu_matrix(int dim_n);
Matrix mu_star_matrix(int dim_n);
Matrix m_matrix(int dim_n);
Matrix normal_projector(int dim_n);
Matrix tangential_projector(int dim_n);
Matrix reflection_matrix(int dim_n);
/// Masks of the given degree in increasing order.
std::vector<BasisIndex> degree_masks(int dim_n, int k);

}  // namespace diracbvp
