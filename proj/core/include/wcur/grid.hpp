#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "wcur/multivec.hpp"

namespace wcur {

/// Thrown for invalid user input (bad grids, malformed files, degenerate
/// immersions, failed preconditions). Maps to exit status 2 in the CLI.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One coordinate axis. Periodic axes have no duplicated endpoint.
struct Axis {
  int n = 0;
  double lo = 0.0;
  double hi = 1.0;
  bool periodic = false;

  double h() const { return periodic ? (hi - lo) / n : (hi - lo) / (n - 1); }
  double coord(int i) const { return lo + i * h(); }
};

struct Grid {
  Axis u;
  Axis v;

  Grid() = default;
  Grid(Axis u_axis, Axis v_axis);

  const Axis& axis(int a) const { return a == 0 ? u : v; }
  int nodes() const { return u.n * v.n; }
  int index(int i, int j) const { return i * v.n + j; }
  bool closed() const { return u.periodic && v.periodic; }
  double cell_area() const { return u.h() * v.h(); }
  int center(int a) const { return axis(a).n / 2; }

  /// Index along axis a shifted by k, wrapped on periodic axes.
  int shift(int a, int i, int k) const {
    const int n = axis(a).n;
    int r = i + k;
    if (axis(a).periodic) r = ((r % n) + n) % n;
    return r;
  }

  bool operator==(const Grid& o) const;
};

/// Node-wise multi-component field on a grid.
///
/// The margin is the number of node layers next to every non-periodic edge
/// where the field is not defined; it grows with each stencil application.
class Field {
 public:
  Field() = default;
  Field(const Grid& grid, int components, int margin = 0);

  const Grid& grid() const { return grid_; }
  int components() const { return ncomp_; }
  int margin() const { return margin_; }
  void set_margin(int m);

  double* node(int i, int j) { return data_.data() + static_cast<size_t>(grid_.index(i, j)) * ncomp_; }
  const double* node(int i, int j) const {
    return data_.data() + static_cast<size_t>(grid_.index(i, j)) * ncomp_;
  }
  double& operator()(int i, int j, int c) { return node(i, j)[c]; }
  double operator()(int i, int j, int c) const { return node(i, j)[c]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  /// First and one-past-last valid index along axis a.
  int begin(int a) const { return grid_.axis(a).periodic ? 0 : margin_; }
  int end(int a) const { return grid_.axis(a).periodic ? grid_.axis(a).n : grid_.axis(a).n - margin_; }
  bool valid(int i, int j) const { return i >= begin(0) && i < end(0) && j >= begin(1) && j < end(1); }

  template <class F>
  void for_each_valid(F&& f) const {
    for (int i = begin(0); i < end(0); ++i)
      for (int j = begin(1); j < end(1); ++j) f(i, j);
  }

  Vec vec(int i, int j) const;
  void set(int i, int j, const Vec& v);
  MultiVec multivec(int i, int j, int dim, int grade) const;
  void set(int i, int j, const MultiVec& mv);

  /// Components [first, first+count) as a new field.
  Field slice(int first, int count) const;
  void assign_slice(int first, const Field& part);

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }

 private:
  void require_compatible(const Field& o, const char* op) const;

  Grid grid_;
  int ncomp_ = 0;
  int margin_ = 0;
  std::vector<double> data_;
};

/// Pair of fields indexed by a coordinate direction j = 1, 2.
using FieldPair = std::array<Field, 2>;

struct ResidualNorm {
  double sup = 0.0;
  double l2 = 0.0;
};

/// Sup of the node-wise Euclidean norm and the discrete L2 norm
/// (sum of squares times cell area) over the valid region of f, optionally
/// shrunk by `extra_margin` more layers.
ResidualNorm residual_norm(const Field& f, int extra_margin = 0);

/// Largest margin for which a field on this grid still has valid nodes.
int max_margin(const Grid& g);

}  // namespace wcur
