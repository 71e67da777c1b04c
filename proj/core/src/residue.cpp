#include "wcur/residue.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "wcur/currents.hpp"
#include "wcur/stencil.hpp"

namespace wcur {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct CellPoint {
  int i0, i1, j0, j1;
  double s, t;  // local offsets in [0, 1)
};

// Locates x on an axis; returns false outside a non-periodic range.
bool locate(const Axis& ax, double x, int& k0, int& k1, double& s) {
  double f = (x - ax.lo) / ax.h();
  if (ax.periodic) {
    f = std::fmod(f, static_cast<double>(ax.n));
    if (f < 0) f += ax.n;
  } else if (f < 0.0 || f > ax.n - 1) {
    return false;
  }
  k0 = std::min(static_cast<int>(std::floor(f)), ax.periodic ? ax.n - 1 : ax.n - 2);
  s = f - k0;
  k1 = ax.periodic ? (k0 + 1) % ax.n : k0 + 1;
  return true;
}

bool cell_of(const Grid& g, double u, double v, CellPoint& p) {
  return locate(g.u, u, p.i0, p.i1, p.s) && locate(g.v, v, p.j0, p.j1, p.t);
}

double bilinear(const Field& f, const CellPoint& p, int comp) {
  return (1 - p.s) * (1 - p.t) * f(p.i0, p.j0, comp) + p.s * (1 - p.t) * f(p.i1, p.j0, comp) +
         (1 - p.s) * p.t * f(p.i0, p.j1, comp) + p.s * p.t * f(p.i1, p.j1, comp);
}

bool cell_valid(const Field& f, const CellPoint& p) {
  return f.valid(p.i0, p.j0) && f.valid(p.i1, p.j0) && f.valid(p.i0, p.j1) && f.valid(p.i1, p.j1);
}

void require_origin(const Grid& g) {
  if (g.u.periodic || g.v.periodic || !(g.u.lo < 0.0 && g.u.hi > 0.0 && g.v.lo < 0.0 && g.v.hi > 0.0)) {
    throw ValidationError("chart does not contain the origin in its interior");
  }
}

}  // namespace

int default_contour_samples(const Grid& g) { return 4 * std::max(g.u.n, g.v.n); }

Vec contour_flux(const FieldPair& P, double cu, double cv, double r, int samples) {
  if (!(r > 0.0)) throw ValidationError("contour radius must be positive");
  if (samples < 8) throw ValidationError("contour needs at least 8 samples");
  const Grid& g = P[0].grid();
  const int nc = P[0].components();
  Vec flux = Vec::Zero(nc);
  const double dtheta = kTwoPi / samples;
  for (int k = 0; k < samples; ++k) {
    const double th = k * dtheta;
    const double c = std::cos(th), s = std::sin(th);
    CellPoint p;
    if (!cell_of(g, cu + r * c, cv + r * s, p) || !cell_valid(P[0], p) || !cell_valid(P[1], p)) {
      throw ValidationError("circle exits valid region");
    }
    for (int q = 0; q < nc; ++q) flux[q] += (bilinear(P[0], p, q) * c + bilinear(P[1], p, q) * s) * r * dtheta;
  }
  if (!flux.allFinite()) throw ValidationError("circle crosses non-finite field values");
  return flux;
}

GreenFunction green_function(const GeometryCache& c, PoissonOptions opt) {
  const Grid& g = c.grid();
  require_origin(g);
  GreenFunction G;

  // Origin location and A0.
  CellPoint o;
  cell_of(g, 0.0, 0.0, o);
  const double eps = 1e-9;
  const bool on_u = o.s < eps || o.s > 1 - eps;
  const bool on_v = o.t < eps || o.t > 1 - eps;
  G.centre_node = on_u && on_v;
  const int ic = o.s < 0.5 ? o.i0 : o.i1, jc = o.t < 0.5 ? o.j0 : o.j1;
  Field A(g, 3);  // |g|^{1/2} g^{-1}
  for (int i = 0; i < g.u.n; ++i)
    for (int j = 0; j < g.v.n; ++j)
      for (int s = 0; s < 3; ++s) A(i, j, s) = c.sqrt_det(i, j, 0) * c.inverse(i, j, s);
  Eigen::Matrix2d A0;
  A0 << bilinear(A, o, 0), bilinear(A, o, 1), bilinear(A, o, 1), bilinear(A, o, 2);
  const Eigen::Matrix2d B = A0.inverse();
  const double norm = 1.0 / (2.0 * kTwoPi);  // 1/(4 pi)
  auto is_centre = [&](int i, int j) { return G.centre_node && i == ic && j == jc; };

  G.singular = Field(g, 1);
  for (int i = 0; i < g.u.n; ++i)
    for (int j = 0; j < g.v.n; ++j) {
      if (is_centre(i, j)) continue;
      const Eigen::Vector2d x(g.u.coord(i), g.v.coord(j));
      G.singular(i, j, 0) = norm * std::log(x.dot(B * x));
    }

  // Remainder: d_j(A^{jk} d_k u) = -d_j(A^{jk} d_k l), with the source term
  // formed from the analytic derivatives of l (it vanishes for constant A).
  const NodalJets dA = finite_difference_jets(A);
  Field rhs(g, 1);
  rhs.for_each_valid([&](int i, int j) {
    if (is_centre(i, j)) return;
    const Eigen::Vector2d x(g.u.coord(i), g.v.coord(j));
    const Eigen::Vector2d Bx = B * x;
    const double q = x.dot(Bx);
    const Eigen::Vector2d dl = (2.0 * norm / q) * Bx;
    Eigen::Matrix2d ddl = (2.0 * norm / q) * (B - (2.0 / q) * Bx * Bx.transpose());
    double div = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        div += dA.d1[a](i, j, sym_index(a, b)) * dl[b] + A(i, j, sym_index(a, b)) * ddl(a, b);
      }
    rhs(i, j, 0) = -div / c.sqrt_det(i, j, 0);
  });
  WeightedPoisson poisson(c, 0, opt);
  G.remainder = poisson.solve(rhs);
  G.green_defect = poisson.last_residual();
  G.value = G.singular + G.remainder;

  // |g|^{1/2} grad^j L_g: analytic for l, finite differences for u.
  const FieldPair du = flat_gradient(c, G.remainder);
  for (int a = 0; a < 2; ++a) {
    G.weighted_gradient[a] = node_map(g, 1, du[0].margin(), [&](int i, int j, double* out) {
      const Eigen::Vector2d x(g.u.coord(i), g.v.coord(j));
      const double q = x.dot(B * x);
      if (q == 0.0) {
        out[0] = NAN;
        return;
      }
      const Eigen::Vector2d dl = (2.0 * norm / q) * (B * x);
      double s = 0.0;
      for (int b = 0; b < 2; ++b) s += c.ginv(a, b, i, j) * (dl[b] + du[b](i, j, 0));
      out[0] = c.sqrt_det(i, j, 0) * s;
    });
  }
  return G;
}

Vec residue_flux(const GeometryCache& c, const FieldPair& T, const FieldPair& grad_V, double r) {
  const Grid& g = c.grid();
  require_origin(g);
  FieldPair P;
  for (int a = 0; a < 2; ++a) {
    const int margin = std::max(T[a].margin(), grad_V[a].margin());
    P[a] = node_map(g, c.dim, margin, [&](int i, int j, double* o) {
      const double s = c.sqrt_det(i, j, 0);
      for (int q = 0; q < c.dim; ++q) o[q] = s * (T[a](i, j, q) - grad_V[a](i, j, q));
    });
  }
  return contour_flux(P, 0.0, 0.0, r, default_contour_samples(g));
}

ResidueReport radius_independence_scan(const GeometryCache& c, const FieldPair& T, const FieldPair& grad_V,
                                       const std::vector<double>& radii) {
  if (radii.size() < 3) throw ValidationError("radius scan needs at least 3 radii");
  for (size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] > radii[k - 1]))) {
      throw ValidationError("radii must be positive and strictly increasing");
    }
  }
  ResidueReport rep;
  rep.radii = radii;
  rep.beta_res = Vec::Zero(c.dim);
  for (double r : radii) {
    rep.flux_by_radius.push_back(residue_flux(c, T, grad_V, r));
    rep.beta_res += rep.flux_by_radius.back();
  }
  rep.beta_res /= static_cast<double>(radii.size());
  double worst = 0.0, largest = 0.0;
  for (const Vec& f : rep.flux_by_radius) {
    worst = std::max(worst, (f - rep.beta_res).norm());
    largest = std::max(largest, f.norm());
  }
  const double mean = rep.beta_res.norm();
  if (largest <= kNullFlux) {
    rep.spread = 0.0;
  } else {
    rep.spread = mean > 0.0 ? worst / mean : INFINITY;
  }
  rep.flagged = rep.spread > kSpreadThreshold;
  return rep;
}

ResidueReport compute_residue(const GeometryCache& c, const std::vector<double>& radii, double core_radius,
                              PoissonOptions opt) {
  const Grid& g = c.grid();
  require_origin(g);
  if (radii.empty()) throw ValidationError("radius scan needs at least 3 radii");
  if (core_radius < 0.0) core_radius = 0.5 * *std::min_element(radii.begin(), radii.end());
  const FieldPair T = stress_tensor(c);
  Field W = willmore_operator(c);
  W.for_each_valid([&](int i, int j) {
    if (std::hypot(g.u.coord(i), g.v.coord(j)) < core_radius) {
      for (int q = 0; q < W.components(); ++q) W(i, j, q) = 0.0;
    }
  });
  WeightedPoisson poisson(c, W.margin(), opt);
  const Field V = poisson.solve(-1.0 * W);
  ResidueReport rep = radius_independence_scan(c, T, gradient_up(c, V), radii);
  rep.solver_residual = poisson.last_residual();
  const GreenFunction G = green_function(c, opt);
  rep.green_defect = G.green_defect;
  for (double r : radii) {
    rep.green_flux_by_radius.push_back(contour_flux(G.weighted_gradient, 0.0, 0.0, r, default_contour_samples(g))[0]);
  }
  return rep;
}

}  // namespace wcur
