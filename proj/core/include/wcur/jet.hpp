#pragma once

#include <array>
#include <cmath>

namespace wcur {

/// Second-order forward-mode number in two variables (u, v).
/// Second partials are stored as (uu, uv, vv).
struct Jet2 {
  double f = 0.0;
  std::array<double, 2> d{};
  std::array<double, 3> dd{};

  Jet2() = default;
  Jet2(double value) : f(value) {}  // NOLINT: constants promote implicitly

  static Jet2 variable(double value, int axis) {
    Jet2 j(value);
    j.d[axis] = 1.0;
    return j;
  }

  /// Composition with a scalar function given its value and two derivatives.
  Jet2 chain(double g, double g1, double g2) const {
    Jet2 r(g);
    r.d = {g1 * d[0], g1 * d[1]};
    r.dd = {g2 * d[0] * d[0] + g1 * dd[0], g2 * d[0] * d[1] + g1 * dd[1], g2 * d[1] * d[1] + g1 * dd[2]};
    return r;
  }

  Jet2& operator+=(const Jet2& o) {
    f += o.f;
    for (int i = 0; i < 2; ++i) d[i] += o.d[i];
    for (int i = 0; i < 3; ++i) dd[i] += o.dd[i];
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    f -= o.f;
    for (int i = 0; i < 2; ++i) d[i] -= o.d[i];
    for (int i = 0; i < 3; ++i) dd[i] -= o.dd[i];
    return *this;
  }
  Jet2& operator*=(const Jet2& o) {
    Jet2 r(f * o.f);
    r.d = {d[0] * o.f + f * o.d[0], d[1] * o.f + f * o.d[1]};
    r.dd = {dd[0] * o.f + 2.0 * d[0] * o.d[0] + f * o.dd[0],
            dd[1] * o.f + d[0] * o.d[1] + d[1] * o.d[0] + f * o.dd[1],
            dd[2] * o.f + 2.0 * d[1] * o.d[1] + f * o.dd[2]};
    return *this = r;
  }
  Jet2& operator/=(const Jet2& o) {
    const double inv = 1.0 / o.f;
    return *this *= o.chain(inv, -inv * inv, 2.0 * inv * inv * inv);
  }

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator*(Jet2 a, const Jet2& b) { return a *= b; }
  friend Jet2 operator/(Jet2 a, const Jet2& b) { return a /= b; }
  friend Jet2 operator-(const Jet2& a) { return a.chain(-a.f, -1.0, 0.0); }
};

inline Jet2 sin(const Jet2& a) { return a.chain(std::sin(a.f), std::cos(a.f), -std::sin(a.f)); }
inline Jet2 cos(const Jet2& a) { return a.chain(std::cos(a.f), -std::sin(a.f), -std::cos(a.f)); }
inline Jet2 sinh(const Jet2& a) { return a.chain(std::sinh(a.f), std::cosh(a.f), std::sinh(a.f)); }
inline Jet2 cosh(const Jet2& a) { return a.chain(std::cosh(a.f), std::sinh(a.f), std::cosh(a.f)); }
inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.f);
  return a.chain(e, e, e);
}
inline Jet2 log(const Jet2& a) { return a.chain(std::log(a.f), 1.0 / a.f, -1.0 / (a.f * a.f)); }
inline Jet2 sqrt(const Jet2& a) {
  const double s = std::sqrt(a.f);
  return a.chain(s, 0.5 / s, -0.25 / (s * a.f));
}

/// atan2(y, x) with derivatives taken through both arguments.
inline Jet2 atan2(const Jet2& y, const Jet2& x) {
  const double r2 = x.f * x.f + y.f * y.f;
  const double gy = x.f / r2;
  const double gx = -y.f / r2;
  // Hessian of atan2 in (y, x).
  const double hyy = -2.0 * x.f * y.f / (r2 * r2);
  const double hxx = -hyy;
  const double hxy = (y.f * y.f - x.f * x.f) / (r2 * r2);
  Jet2 r(std::atan2(y.f, x.f));
  for (int i = 0; i < 2; ++i) r.d[i] = gy * y.d[i] + gx * x.d[i];
  const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
  for (int p = 0; p < 3; ++p) {
    const int i = pairs[p][0];
    const int j = pairs[p][1];
    r.dd[p] = gy * y.dd[p] + gx * x.dd[p] + hyy * y.d[i] * y.d[j] + hxx * x.d[i] * x.d[j] +
              hxy * (y.d[i] * x.d[j] + x.d[i] * y.d[j]);
  }
  return r;
}

}  // namespace wcur
