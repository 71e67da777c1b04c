#include "wcur/currents.hpp"

#include <algorithm>
#include <cmath>

namespace wcur {
namespace {

// (F . h^{ab}) h_ab at one node.
Vec contract_sff(const GeometryCache& c, const Vec& F, int i, int j) {
  Vec r = Vec::Zero(c.dim);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Vec up = Vec::Zero(c.dim);
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) up += c.ginv(a, p, i, j) * c.ginv(b, q, i, j) * c.h(p, q, i, j);
      r += F.dot(up) * c.h(a, b, i, j);
    }
  return r;
}

}  // namespace

Field willmore_operator(const GeometryCache& c) {
  const Field perp = normal_laplacian(c, c.mean_curvature);
  return node_map(c.grid(), c.dim, perp.margin(), [&](int i, int j, double* o) {
    const Vec H = c.H(i, j);
    const Vec w = perp.vec(i, j) + contract_sff(c, H, i, j) - 2.0 * H.squaredNorm() * H;
    for (int q = 0; q < c.dim; ++q) o[q] = w[q];
  });
}

FieldPair stress_tensor(const GeometryCache& c) {
  const FieldPair dH = gradient_up(c, c.mean_curvature);
  FieldPair T;
  for (int a = 0; a < 2; ++a) {
    T[a] = node_map(c.grid(), c.dim, dH[a].margin(), [&](int i, int j, double* o) {
      const Vec g = dH[a].vec(i, j);
      const Vec t = g - 2.0 * c.project_normal(g, i, j) + c.H(i, j).squaredNorm() * c.dphi_up(a, i, j);
      for (int q = 0; q < c.dim; ++q) o[q] = t[q];
    });
  }
  return T;
}

CurrentSet conservation_residuals(const GeometryCache& c, const Field& W, const FieldPair& T) {
  const int m = c.dim;
  const Grid& g = c.grid();
  CurrentSet s;
  s.W = W;
  s.T = T;
  const Field& phi = c.patch->phi;
  for (int a = 0; a < 2; ++a) {
    s.rotation[a] = node_map(g, blade::binomial(m, 2), T[a].margin(), [&](int i, int j, double* o) {
      const MultiVec r = wedge(MultiVec::vector(T[a].vec(i, j)), MultiVec::vector(c.phi(i, j))) +
                         wedge(MultiVec::vector(c.H(i, j)), MultiVec::vector(c.dphi_up(a, i, j)));
      for (int q = 0; q < r.size(); ++q) o[q] = r[q];
    });
    s.dilation[a] = dot(T[a], phi);
  }
  s.res_trans = covariant_divergence(c, T) + W;
  s.res_rot = covariant_divergence(c, s.rotation) + wedge(W, 1, phi, 1, m);
  s.res_dil = covariant_divergence(c, s.dilation) + dot(W, phi);
  s.margin = std::max({s.res_trans.margin(), s.res_rot.margin(), s.res_dil.margin()});
  s.trans = residual_norm(s.res_trans, s.margin - s.res_trans.margin());
  s.rot = residual_norm(s.res_rot, s.margin - s.res_rot.margin());
  s.dil = residual_norm(s.res_dil, s.margin - s.res_dil.margin());
  return s;
}

CurrentSet compute_currents(const GeometryCache& c) {
  return conservation_residuals(c, willmore_operator(c), stress_tensor(c));
}

Field smooth_bump(const Grid& g, double u0, double v0, double radius) {
  Field b(g, 1);
  for (int i = 0; i < g.u.n; ++i)
    for (int j = 0; j < g.v.n; ++j) {
      const double du = g.u.coord(i) - u0;
      const double dv = g.v.coord(j) - v0;
      const double s2 = (du * du + dv * dv) / (radius * radius);
      b(i, j, 0) = s2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s2)) : 0.0;
    }
  return b;
}

double VariationResult::relative_gap() const { return std::abs(fd_derivative - pairing) / std::abs(pairing); }

VariationResult energy_variation_check(const ImmersionPatch& patch, const Field& bump, double primary_step,
                                       const std::vector<double>& steps, DiffOrder order, int collar) {
  if (bump.components() != 1 || !(bump.grid() == patch.grid)) {
    throw ValidationError("bump must be a scalar field on the patch grid");
  }
  const GeometryCache c0 = compute_geometry(patch, order);
  const Field W = willmore_operator(c0);
  const Grid& g = patch.grid;
  const int keep_out = W.margin() + collar;
  for (int i = 0; i < g.u.n; ++i)
    for (int j = 0; j < g.v.n; ++j) {
      if (bump(i, j, 0) == 0.0) continue;
      const bool near_u = !g.u.periodic && (i < keep_out || i >= g.u.n - keep_out);
      const bool near_v = !g.v.periodic && (j < keep_out || j >= g.v.n - keep_out);
      if (near_u || near_v) throw ValidationError("bump support touches the boundary collar");
    }

  const int m = patch.dim;
  Field B(g, m);
  for (int i = 0; i < g.u.n; ++i)
    for (int j = 0; j < g.v.n; ++j) {
      Vec n;
      if (m == 3) {
        n = c0.unit_normal(i, j);
      } else {
        n = c0.project_normal(Vec::Unit(m, m - 1), i, j);
        n /= n.norm();
      }
      B.set(i, j, Vec(bump(i, j, 0) * n));
    }
  const NodalJets jb = finite_difference_jets(B);

  auto energy = [&](double t) {
    ImmersionPatch q = patch;
    q.phi += t * B;
    for (int a = 0; a < 2; ++a) q.d1[a] += t * jb.d1[a];
    for (int s = 0; s < 3; ++s) q.d2[s] += t * jb.d2[s];
    return willmore_energy(compute_geometry(q, order));
  };
  auto derivative = [&](double t) {
    return (-energy(2 * t) + 8 * energy(t) - 8 * energy(-t) + energy(-2 * t)) / (12 * t);
  };

  VariationResult r;
  r.pairing = surface_integral(c0, dot(B, W));
  r.fd_derivative = derivative(primary_step);
  r.steps = steps;
  std::sort(r.steps.begin(), r.steps.end(), std::greater<>());
  for (double t : r.steps) r.fd_by_step.push_back(derivative(t));
  if (r.steps.size() >= 2) {
    const size_t k = r.steps.size() - 1;
    const double ratio4 = std::pow(r.steps[k - 1] / r.steps[k], 4);
    r.extrapolated = (ratio4 * r.fd_by_step[k] - r.fd_by_step[k - 1]) / (ratio4 - 1.0);
  } else {
    r.extrapolated = r.fd_derivative;
  }
  return r;
}

double InvarianceResult::relative_change() const {
  const double scale = std::max(std::abs(before), std::abs(after));
  return scale == 0.0 ? 0.0 : std::abs(after - before) / scale;
}

InvarianceResult invariance_check(const ImmersionPatch& patch, const Motion& motion, DiffOrder order) {
  ImmersionPatch moved;
  switch (motion.kind) {
    case Motion::Kind::translation: moved = translate(patch, motion.shift); break;
    case Motion::Kind::rotation: moved = rotate(patch, motion.rotation); break;
    case Motion::Kind::dilation: moved = dilate(patch, motion.lambda); break;
  }
  return {willmore_energy(compute_geometry(patch, order)), willmore_energy(compute_geometry(moved, order))};
}

Eigen::MatrixXd plane_rotation(int m, int a, int b, double angle) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(m, m);
  r(a, a) = std::cos(angle);
  r(b, b) = std::cos(angle);
  r(a, b) = -std::sin(angle);
  r(b, a) = std::sin(angle);
  return r;
}

}  // namespace wcur
