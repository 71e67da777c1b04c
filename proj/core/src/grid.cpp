#include "wcur/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wcur {

Grid::Grid(Axis u_axis, Axis v_axis) : u(u_axis), v(v_axis) {
  for (const Axis* a : {&u, &v}) {
    if (a->n < 2) throw ValidationError("grid axis needs at least 2 nodes, got " + std::to_string(a->n));
    if (!(a->hi > a->lo) || !std::isfinite(a->lo) || !std::isfinite(a->hi)) {
      throw ValidationError("grid axis needs a finite interval with lo < hi");
    }
  }
}

bool Grid::operator==(const Grid& o) const {
  auto same = [](const Axis& a, const Axis& b) {
    return a.n == b.n && a.lo == b.lo && a.hi == b.hi && a.periodic == b.periodic;
  };
  return same(u, o.u) && same(v, o.v);
}

int max_margin(const Grid& g) {
  int m = 1 << 20;
  for (int a = 0; a < 2; ++a) {
    if (!g.axis(a).periodic) m = std::min(m, (g.axis(a).n - 1) / 2);
  }
  return m;
}

Field::Field(const Grid& grid, int components, int margin)
    : grid_(grid), ncomp_(components), data_(static_cast<size_t>(grid.nodes()) * components, 0.0) {
  set_margin(margin);
}

void Field::set_margin(int m) {
  if (m < 0 || m > max_margin(grid_)) {
    throw ValidationError("field margin " + std::to_string(m) + " leaves no valid nodes on a " +
                          std::to_string(grid_.u.n) + "x" + std::to_string(grid_.v.n) + " grid");
  }
  margin_ = m;
}

Vec Field::vec(int i, int j) const {
  Vec v(ncomp_);
  const double* p = node(i, j);
  for (int c = 0; c < ncomp_; ++c) v[c] = p[c];
  return v;
}

void Field::set(int i, int j, const Vec& v) {
  double* p = node(i, j);
  for (int c = 0; c < ncomp_; ++c) p[c] = v[c];
}

MultiVec Field::multivec(int i, int j, int dim, int grade) const {
  return MultiVec::from_components(dim, grade, {node(i, j), static_cast<size_t>(ncomp_)});
}

void Field::set(int i, int j, const MultiVec& mv) {
  double* p = node(i, j);
  for (int c = 0; c < ncomp_; ++c) p[c] = mv[c];
}

Field Field::slice(int first, int count) const {
  Field r(grid_, count, margin_);
  for (int n = 0; n < grid_.nodes(); ++n)
    for (int c = 0; c < count; ++c) r.data_[static_cast<size_t>(n) * count + c] = data_[static_cast<size_t>(n) * ncomp_ + first + c];
  return r;
}

void Field::assign_slice(int first, const Field& part) {
  for (int n = 0; n < grid_.nodes(); ++n)
    for (int c = 0; c < part.ncomp_; ++c)
      data_[static_cast<size_t>(n) * ncomp_ + first + c] = part.data_[static_cast<size_t>(n) * part.ncomp_ + c];
  margin_ = std::max(margin_, part.margin_);
}

void Field::require_compatible(const Field& o, const char* op) const {
  if (!(grid_ == o.grid_) || ncomp_ != o.ncomp_) {
    throw std::invalid_argument(std::string("field ") + op + ": shape mismatch");
  }
}

Field& Field::operator+=(const Field& o) {
  require_compatible(o, "add");
  for (size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  margin_ = std::max(margin_, o.margin_);
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_compatible(o, "subtract");
  for (size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  margin_ = std::max(margin_, o.margin_);
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

ResidualNorm residual_norm(const Field& f, int extra_margin) {
  Field view = f;
  view.set_margin(f.margin() + extra_margin);
  ResidualNorm r;
  double sum = 0.0;
  view.for_each_valid([&](int i, int j) {
    double s = 0.0;
    const double* p = f.node(i, j);
    for (int c = 0; c < f.components(); ++c) s += p[c] * p[c];
    r.sup = std::max(r.sup, std::sqrt(s));
    sum += s;
  });
  r.l2 = std::sqrt(sum * f.grid().cell_area());
  return r;
}

}  // namespace wcur
