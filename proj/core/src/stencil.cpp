#include "wcur/stencil.hpp"

#include <limits>

namespace wcur {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Weights {
  int reach;
  double w[5];  // offsets -2..2
};

Weights first_weights(DiffOrder o) {
  if (o == DiffOrder::fourth) return {2, {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12}};
  return {1, {0.0, -0.5, 0.0, 0.5, 0.0}};
}

Weights second_weights(DiffOrder o) {
  if (o == DiffOrder::fourth) return {2, {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12}};
  return {1, {0.0, 1.0, -2.0, 1.0, 0.0}};
}

Field fill_nan(const Field& f, int margin) {
  Field out(f.grid(), f.components(), margin);
  for (double& x : out.values()) x = kNaN;
  return out;
}

Field apply_axis(const Field& f, int axis, const Weights& w, double scale) {
  const Grid& g = f.grid();
  Field out = fill_nan(f, f.margin() + w.reach);
  const int nc = f.components();
  out.for_each_valid([&](int i, int j) {
    double* o = out.node(i, j);
    for (int c = 0; c < nc; ++c) o[c] = 0.0;
    for (int k = -w.reach; k <= w.reach; ++k) {
      const double wk = w.w[k + 2];
      if (wk == 0.0) continue;
      const double* src = axis == 0 ? f.node(g.shift(0, i, k), j) : f.node(i, g.shift(1, j, k));
      for (int c = 0; c < nc; ++c) o[c] += wk * src[c];
    }
    for (int c = 0; c < nc; ++c) o[c] *= scale;
  });
  return out;
}

// 1D derivative on a full line with one-sided closure at non-periodic ends.
void line_derivative(const double* f, double* out, int n, long stride, double h, bool periodic, bool second) {
  auto at = [&](int k) { return f[stride * (periodic ? ((k % n) + n) % n : k)]; };
  auto put = [&](int k, double v) { out[stride * k] = v; };
  for (int k = 0; k < n; ++k) {
    const bool interior = periodic || (k >= 2 && k <= n - 3);
    if (interior) {
      put(k, second ? (-at(k - 2) + 16 * at(k - 1) - 30 * at(k) + 16 * at(k + 1) - at(k + 2)) / (12 * h * h)
                    : (at(k - 2) - 8 * at(k - 1) + 8 * at(k + 1) - at(k + 2)) / (12 * h));
    } else if (k == 1 || k == n - 2) {
      put(k, second ? (at(k - 1) - 2 * at(k) + at(k + 1)) / (h * h) : (at(k + 1) - at(k - 1)) / (2 * h));
    } else if (k == 0) {
      put(k, second ? (2 * at(0) - 5 * at(1) + 4 * at(2) - at(3)) / (h * h)
                    : (-3 * at(0) + 4 * at(1) - at(2)) / (2 * h));
    } else {
      put(k, second ? (2 * at(n - 1) - 5 * at(n - 2) + 4 * at(n - 3) - at(n - 4)) / (h * h)
                    : (3 * at(n - 1) - 4 * at(n - 2) + at(n - 3)) / (2 * h));
    }
  }
}

Field full_derivative(const Field& f, int axis, bool second) {
  const Grid& g = f.grid();
  Field out(g, f.components(), 0);
  const int nc = f.components();
  const Axis& ax = g.axis(axis);
  if (ax.n < 5) throw ValidationError("finite-difference jets need at least 5 nodes per axis");
  const long stride = axis == 0 ? static_cast<long>(g.v.n) * nc : nc;
  const int lines = axis == 0 ? g.v.n : g.u.n;
  for (int l = 0; l < lines; ++l) {
    const int i0 = axis == 0 ? 0 : l;
    const int j0 = axis == 0 ? l : 0;
    for (int c = 0; c < nc; ++c) {
      line_derivative(f.node(i0, j0) + c, out.node(i0, j0) + c, ax.n, stride, ax.h(), ax.periodic, second);
    }
  }
  return out;
}

}  // namespace

Field partial(const Field& f, int axis, DiffOrder order) {
  return apply_axis(f, axis, first_weights(order), 1.0 / f.grid().axis(axis).h());
}

Field partial2(const Field& f, int axis, DiffOrder order) {
  const double h = f.grid().axis(axis).h();
  return apply_axis(f, axis, second_weights(order), 1.0 / (h * h));
}

Field partial_mixed(const Field& f, DiffOrder order) {
  const Grid& g = f.grid();
  const Weights w = first_weights(order);
  Field out = fill_nan(f, f.margin() + w.reach);
  const int nc = f.components();
  const double scale = 1.0 / (g.u.h() * g.v.h());
  out.for_each_valid([&](int i, int j) {
    double* o = out.node(i, j);
    for (int c = 0; c < nc; ++c) o[c] = 0.0;
    for (int a = -w.reach; a <= w.reach; ++a) {
      const double wa = w.w[a + 2];
      if (wa == 0.0) continue;
      for (int b = -w.reach; b <= w.reach; ++b) {
        const double wb = w.w[b + 2];
        if (wb == 0.0) continue;
        const double* src = f.node(g.shift(0, i, a), g.shift(1, j, b));
        for (int c = 0; c < nc; ++c) o[c] += wa * wb * src[c];
      }
    }
    for (int c = 0; c < nc; ++c) o[c] *= scale;
  });
  return out;
}

NodalJets finite_difference_jets(const Field& f) {
  NodalJets j;
  j.d1[0] = full_derivative(f, 0, false);
  j.d1[1] = full_derivative(f, 1, false);
  j.d2[0] = full_derivative(f, 0, true);
  j.d2[1] = full_derivative(j.d1[0], 1, false);
  j.d2[2] = full_derivative(f, 1, true);
  return j;
}

}  // namespace wcur
