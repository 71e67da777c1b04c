#pragma once

#include <array>
#include <span>
#include <stdexcept>

#include <Eigen/Core>

namespace wcur {

inline constexpr int kMaxAmbientDim = 8;

/// Ambient vector in R^m, m <= 8, stored inline.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxAmbientDim, 1>;

class AlgebraError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace blade {

int binomial(int n, int k);

/// Rank of a basis blade among all blades of the same grade, ordered by
/// increasing bit pattern. Independent of the ambient dimension.
int index_of(unsigned mask);

/// Inverse of index_of for grade k.
unsigned mask_at(int k, int index);

/// Sign s with e_a ^ e_b = s e_{a|b}; 0 when the blades share an index.
int wedge_sign(unsigned a, unsigned b);

}  // namespace blade

/// Homogeneous element of Lambda^k(R^m).
///
/// Component c is the coefficient of the basis blade blade::mask_at(k, c).
/// Grades above m are allowed and carry no components (the zero element).
class MultiVec {
 public:
  static constexpr int kMaxComponents = 70;  // C(8, 4)

  MultiVec() = default;
  MultiVec(int dim, int grade);

  static MultiVec scalar(int dim, double value);
  static MultiVec basis(int dim, unsigned mask);
  static MultiVec vector(const Vec& v);
  static MultiVec from_components(int dim, int grade, std::span<const double> values);

  int dim() const { return dim_; }
  int grade() const { return grade_; }
  int size() const { return size_; }

  double operator[](int i) const { return c_[i]; }
  double& operator[](int i) { return c_[i]; }
  double coeff(unsigned mask) const;

  std::span<const double> components() const { return {c_.data(), static_cast<size_t>(size_)}; }
  std::span<double> components() { return {c_.data(), static_cast<size_t>(size_)}; }

  /// Grade-1 element as an ambient vector.
  Vec to_vector() const;
  double to_scalar() const;

  double norm() const;
  double max_abs() const;

  MultiVec& operator+=(const MultiVec& o);
  MultiVec& operator-=(const MultiVec& o);
  MultiVec& operator*=(double s);

  friend MultiVec operator+(MultiVec a, const MultiVec& b) { return a += b; }
  friend MultiVec operator-(MultiVec a, const MultiVec& b) { return a -= b; }
  friend MultiVec operator*(MultiVec a, double s) { return a *= s; }
  friend MultiVec operator*(double s, MultiVec a) { return a *= s; }
  friend MultiVec operator-(MultiVec a) { return a *= -1.0; }

 private:
  void require_same_shape(const MultiVec& o, const char* op) const;

  int dim_ = 0;
  int grade_ = 0;
  int size_ = 0;
  std::array<double, kMaxComponents> c_{};
};

/// Exterior product. Overflowing grades give the zero element of grade p+q.
MultiVec wedge(const MultiVec& a, const MultiVec& b);

/// Extended scalar product; the basis blades are orthonormal.
double inner(const MultiVec& a, const MultiVec& b);

/// Hodge star with e_I ^ *e_I = e_1 ^ ... ^ e_m.
MultiVec hodge_star(const MultiVec& a);

/// Interior multiplication: <interior(g, b), a> = <g, b ^ a> for every a.
MultiVec interior(const MultiVec& gamma, const MultiVec& beta);

/// First-order contraction. Agrees with interior() when beta has grade 1 and
/// acts as a graded derivation in beta:
/// a . (b ^ c) = (a . b) ^ c + (-1)^{pq} (a . c) ^ b.
MultiVec bullet(const MultiVec& alpha, const MultiVec& beta);

/// Cross product in R^3.
Vec cross(const Vec& a, const Vec& b);

}  // namespace wcur
