#include "wcur/multivec.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace wcur {
namespace blade {
namespace {

struct Tables {
  std::array<int, 256> index{};
  std::array<std::array<unsigned, 70>, 9> masks{};

  constexpr Tables() {
    std::array<int, 9> count{};
    for (unsigned m = 0; m < 256; ++m) {
      const int k = std::popcount(m);
      index[m] = count[k];
      masks[k][count[k]] = m;
      ++count[k];
    }
  }
};

constexpr Tables kTables{};

}  // namespace

int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

int index_of(unsigned mask) { return kTables.index[mask & 0xffu]; }

unsigned mask_at(int k, int index) { return kTables.masks[k][index]; }

int wedge_sign(unsigned a, unsigned b) {
  if (a & b) return 0;
  int swaps = 0;
  for (unsigned rest = b; rest; rest &= rest - 1) {
    const unsigned low = rest & (~rest + 1);
    swaps += std::popcount(a & ~((low << 1) - 1));
  }
  return (swaps & 1) ? -1 : 1;
}

}  // namespace blade

namespace {

void check_dim(int dim) {
  if (dim < 2 || dim > kMaxAmbientDim) {
    throw AlgebraError("ambient dimension must lie in [2, 8], got " + std::to_string(dim));
  }
}

void require_same_dim(const MultiVec& a, const MultiVec& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw AlgebraError(std::string(op) + ": ambient dimension mismatch (" + std::to_string(a.dim()) +
                       " vs " + std::to_string(b.dim()) + ")");
  }
}

// alpha . e_b for basis blades, as at most 8 (mask, coefficient) terms.
struct Terms {
  std::array<unsigned, 8> mask{};
  std::array<double, 8> value{};
  int n = 0;

  void add(unsigned m, double v) {
    for (int i = 0; i < n; ++i) {
      if (mask[i] == m) {
        value[i] += v;
        return;
      }
    }
    mask[n] = m;
    value[n] = v;
    ++n;
  }
};

Terms bullet_blade(unsigned a, unsigned b) {
  Terms out;
  const unsigned first = b & (~b + 1);
  const unsigned rest = b ^ first;
  if (a & first) {
    const unsigned a1 = a ^ first;
    const int s = blade::wedge_sign(first, a1) * blade::wedge_sign(a1, rest);
    if (s != 0) out.add(a1 | rest, s);
  }
  if (rest == 0) return out;
  const double parity = (std::popcount(rest) & 1) ? -1.0 : 1.0;
  const Terms sub = bullet_blade(a, rest);
  for (int i = 0; i < sub.n; ++i) {
    const int s = blade::wedge_sign(sub.mask[i], first);
    if (s != 0) out.add(sub.mask[i] | first, parity * s * sub.value[i]);
  }
  return out;
}

}  // namespace

MultiVec::MultiVec(int dim, int grade) : dim_(dim), grade_(grade) {
  check_dim(dim);
  if (grade < 0) throw AlgebraError("negative grade");
  size_ = blade::binomial(dim, grade);
}

MultiVec MultiVec::scalar(int dim, double value) {
  MultiVec r(dim, 0);
  r.c_[0] = value;
  return r;
}

MultiVec MultiVec::basis(int dim, unsigned mask) {
  check_dim(dim);
  if (mask >> dim) throw AlgebraError("basis blade outside ambient dimension");
  MultiVec r(dim, std::popcount(mask));
  r.c_[blade::index_of(mask)] = 1.0;
  return r;
}

MultiVec MultiVec::vector(const Vec& v) {
  MultiVec r(static_cast<int>(v.size()), 1);
  for (int i = 0; i < r.size_; ++i) r.c_[i] = v[i];
  return r;
}

MultiVec MultiVec::from_components(int dim, int grade, std::span<const double> values) {
  MultiVec r(dim, grade);
  if (static_cast<int>(values.size()) != r.size_) throw AlgebraError("component count mismatch");
  for (int i = 0; i < r.size_; ++i) r.c_[i] = values[i];
  return r;
}

double MultiVec::coeff(unsigned mask) const {
  if (std::popcount(mask) != grade_ || (mask >> dim_)) return 0.0;
  return c_[blade::index_of(mask)];
}

Vec MultiVec::to_vector() const {
  if (grade_ != 1) throw AlgebraError("to_vector needs a grade-1 element");
  Vec v(dim_);
  for (int i = 0; i < dim_; ++i) v[i] = c_[i];
  return v;
}

double MultiVec::to_scalar() const {
  if (grade_ != 0) throw AlgebraError("to_scalar needs a grade-0 element");
  return c_[0];
}

double MultiVec::norm() const { return std::sqrt(inner(*this, *this)); }

double MultiVec::max_abs() const {
  double r = 0.0;
  for (int i = 0; i < size_; ++i) r = std::max(r, std::abs(c_[i]));
  return r;
}

void MultiVec::require_same_shape(const MultiVec& o, const char* op) const {
  require_same_dim(*this, o, op);
  if (grade_ != o.grade_) throw AlgebraError(std::string(op) + ": grade mismatch");
}

MultiVec& MultiVec::operator+=(const MultiVec& o) {
  require_same_shape(o, "add");
  for (int i = 0; i < size_; ++i) c_[i] += o.c_[i];
  return *this;
}

MultiVec& MultiVec::operator-=(const MultiVec& o) {
  require_same_shape(o, "subtract");
  for (int i = 0; i < size_; ++i) c_[i] -= o.c_[i];
  return *this;
}

MultiVec& MultiVec::operator*=(double s) {
  for (int i = 0; i < size_; ++i) c_[i] *= s;
  return *this;
}

MultiVec wedge(const MultiVec& a, const MultiVec& b) {
  require_same_dim(a, b, "wedge");
  MultiVec r(a.dim(), a.grade() + b.grade());
  if (r.size() == 0) return r;
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    const unsigned ma = blade::mask_at(a.grade(), i);
    for (int j = 0; j < b.size(); ++j) {
      const unsigned mb = blade::mask_at(b.grade(), j);
      const int s = blade::wedge_sign(ma, mb);
      if (s != 0) r[blade::index_of(ma | mb)] += s * a[i] * b[j];
    }
  }
  return r;
}

double inner(const MultiVec& a, const MultiVec& b) {
  require_same_dim(a, b, "inner");
  if (a.grade() != b.grade()) throw AlgebraError("inner: grade mismatch");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

MultiVec hodge_star(const MultiVec& a) {
  const int m = a.dim();
  MultiVec r(m, m - a.grade());
  const unsigned full = (1u << m) - 1u;
  for (int i = 0; i < a.size(); ++i) {
    const unsigned mi = blade::mask_at(a.grade(), i);
    const unsigned mc = full ^ mi;
    r[blade::index_of(mc)] += blade::wedge_sign(mi, mc) * a[i];
  }
  return r;
}

MultiVec interior(const MultiVec& gamma, const MultiVec& beta) {
  require_same_dim(gamma, beta, "interior");
  if (beta.grade() > gamma.grade()) throw AlgebraError("interior: grade of beta exceeds grade of gamma");
  MultiVec r(gamma.dim(), gamma.grade() - beta.grade());
  for (int i = 0; i < gamma.size(); ++i) {
    if (gamma[i] == 0.0) continue;
    const unsigned mk = blade::mask_at(gamma.grade(), i);
    for (int j = 0; j < beta.size(); ++j) {
      const unsigned mj = blade::mask_at(beta.grade(), j);
      if ((mk & mj) != mj) continue;
      const unsigned rest = mk ^ mj;
      r[blade::index_of(rest)] += blade::wedge_sign(mj, rest) * gamma[i] * beta[j];
    }
  }
  return r;
}

MultiVec bullet(const MultiVec& alpha, const MultiVec& beta) {
  require_same_dim(alpha, beta, "bullet");
  if (alpha.grade() < 1 || beta.grade() < 1) {
    throw AlgebraError("bullet: both arguments need grade >= 1");
  }
  MultiVec r(alpha.dim(), alpha.grade() + beta.grade() - 2);
  if (r.size() == 0) return r;
  for (int i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0.0) continue;
    const unsigned ma = blade::mask_at(alpha.grade(), i);
    for (int j = 0; j < beta.size(); ++j) {
      if (beta[j] == 0.0) continue;
      const Terms t = bullet_blade(ma, blade::mask_at(beta.grade(), j));
      const double w = alpha[i] * beta[j];
      for (int k = 0; k < t.n; ++k) r[blade::index_of(t.mask[k])] += w * t.value[k];
    }
  }
  return r;
}

Vec cross(const Vec& a, const Vec& b) {
  if (a.size() != 3 || b.size() != 3) throw AlgebraError("cross product needs R^3");
  Vec r(3);
  r << a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0];
  return r;
}

}  // namespace wcur
