#include "wcur/potentials.hpp"

#include <algorithm>
#include <cmath>

#include "wcur/currents.hpp"

namespace wcur {
namespace {

template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const SolverFailure& e) {
    throw SolverFailure(std::string("stage ") + name + ": " + e.what(), e.achieved);
  }
}

int pair_margin(const FieldPair& p) { return std::max(p[0].margin(), p[1].margin()); }

FieldPair zero_pair(const Grid& g, int comps, int margin) { return {Field(g, comps, margin), Field(g, comps, margin)}; }

MultiVec mv(const Field& f, int i, int j, int m, int grade) { return f.multivec(i, j, m, grade); }
MultiVec vec_mv(const Vec& v) { return MultiVec::vector(v); }

void store(double* o, const MultiVec& r) {
  for (int q = 0; q < r.size(); ++q) o[q] = r[q];
}

ResidualNorm norm_at(const Field& f, int margin) { return residual_norm(f, margin - f.margin()); }

ResidualNorm pair_norm(const FieldPair& p, int margin) {
  const ResidualNorm a = norm_at(p[0], margin), b = norm_at(p[1], margin);
  return {std::max(a.sup, b.sup), std::sqrt(a.l2 * a.l2 + b.l2 * b.l2)};
}

Field shift_to_gauge(Field f, int gi, int gj) {
  const int nc = f.components();
  std::vector<double> at(nc);
  for (int q = 0; q < nc; ++q) at[q] = f(gi, gj, q);
  f.for_each_valid([&](int i, int j) {
    for (int q = 0; q < nc; ++q) f(i, j, q) -= at[q];
  });
  return f;
}

}  // namespace

PotentialOverrides PotentialOverrides::zero(const GeometryCache& c) {
  const int m = c.dim;
  PotentialOverrides o;
  o.grad_V = zero_pair(c.grid(), m, 0);
  o.grad_X = zero_pair(c.grid(), blade::binomial(m, 2), 0);
  o.Y = Field(c.grid(), 1, 0);
  return o;
}

PotentialSet build_potential_set(const GeometryCache& c, const Field& W, const PotentialOverrides& ov,
                                 PoissonOptions opt) {
  const int m = c.dim;
  const int m2 = blade::binomial(m, 2);
  const Grid& g = c.grid();
  if (W.components() != m) throw ValidationError("forcing field must be R^m valued");

  PotentialSet p;
  p.dim = m;
  p.gauge_i = g.center(0);
  p.gauge_j = g.center(1);
  p.T = stress_tensor(c);
  auto track = [&](const WeightedPoisson& s) { p.solver_residual = std::max(p.solver_residual, s.last_residual()); };

  // V
  if (ov.grad_V) {
    p.grad_V = *ov.grad_V;
  } else {
    p.V = stage("V", [&] {
      WeightedPoisson solver(c, W.margin(), opt);
      Field v = solver.solve(-1.0 * W);
      track(solver);
      return v;
    });
    p.grad_V = gradient_up(c, *p.V);
  }

  // L from T^j - grad^j V = |g|^{-1/2} eps^{kj} d_k L, i.e.
  // d_1 L = |g|^{1/2}(T^2 - grad^2 V), d_2 L = -|g|^{1/2}(T^1 - grad^1 V).
  {
    const int margin = std::max(pair_margin(p.T), pair_margin(p.grad_V));
    FieldPair dL;
    for (int k = 0; k < 2; ++k) {
      const int jdir = 1 - k;
      const double sign = k == 0 ? 1.0 : -1.0;
      dL[k] = node_map(g, m, margin, [&](int i, int j, double* o) {
        const double s = sign * c.sqrt_det(i, j, 0);
        for (int q = 0; q < m; ++q) o[q] = s * (p.T[jdir](i, j, q) - p.grad_V[jdir](i, j, q));
      });
    }
    const ScalarPotential L = stage("L", [&] { return recover_scalar_potential(dL, p.gauge_i, p.gauge_j); });
    p.L = L.value;
    p.defect_L = L.defect;
  }

  // X
  if (ov.grad_X) {
    p.grad_X = *ov.grad_X;
    p.dX = lower_index(c, p.grad_X);
  } else {
    const Field rhs = node_map(g, m2, pair_margin(p.grad_V), [&](int i, int j, double* o) {
      MultiVec r(m, 2);
      for (int a = 0; a < 2; ++a) r += wedge(vec_mv(p.grad_V[a].vec(i, j)), vec_mv(c.dphi(a, i, j)));
      store(o, r);
    });
    p.X = stage("X", [&] {
      WeightedPoisson solver(c, rhs.margin(), opt);
      Field x = solver.solve(rhs);
      track(solver);
      return x;
    });
    p.dX = flat_gradient(c, *p.X);
    p.grad_X = raise_index(c, p.dX);
  }

  // Y
  if (ov.Y) {
    p.Y = *ov.Y;
  } else {
    const Field rhs = ov.Y_source ? *ov.Y_source : node_map(g, 1, pair_margin(p.grad_V), [&](int i, int j, double* o) {
      o[0] = p.grad_V[0].vec(i, j).dot(c.dphi(0, i, j)) + p.grad_V[1].vec(i, j).dot(c.dphi(1, i, j));
    });
    p.Y = stage("Y", [&] {
      WeightedPoisson solver(c, rhs.margin(), opt);
      Field y = solver.solve(rhs);
      track(solver);
      return y;
    });
  }
  p.Y = shift_to_gauge(p.Y, p.gauge_i, p.gauge_j);
  p.dY = flat_gradient(c, p.Y);
  p.grad_Y = raise_index(c, p.dY);

  // R and S from their gradients.
  {
    const int margin = std::max({p.L.margin(), pair_margin(p.grad_X), pair_margin(p.grad_Y)});
    FieldPair dR, dS;
    for (int k = 0; k < 2; ++k) {
      dR[k] = node_map(g, m2, margin, [&](int i, int j, double* o) {
        const MultiVec Lv = vec_mv(p.L.vec(i, j));
        MultiVec r = wedge(Lv, vec_mv(c.dphi(k, i, j)));
        for (int a = 0; a < 2; ++a) {
          const double e = levi_civita(k, a);
          if (e == 0.0) continue;
          const MultiVec inner_term =
              wedge(vec_mv(c.H(i, j)), vec_mv(c.dphi_up(a, i, j))) + mv(p.grad_X[a], i, j, m, 2);
          r -= inner_term * (c.sqrt_det(i, j, 0) * e);
        }
        store(o, r);
      });
      dS[k] = node_map(g, 1, margin, [&](int i, int j, double* o) {
        double s = p.L.vec(i, j).dot(c.dphi(k, i, j));
        for (int a = 0; a < 2; ++a) s -= c.sqrt_det(i, j, 0) * levi_civita(k, a) * p.grad_Y[a](i, j, 0);
        o[0] = s;
      });
    }
    const ScalarPotential R = stage("R", [&] { return recover_scalar_potential(dR, p.gauge_i, p.gauge_j); });
    const ScalarPotential S = stage("S", [&] { return recover_scalar_potential(dS, p.gauge_i, p.gauge_j); });
    p.R = R.value;
    p.S = S.value;
    p.defect_R = R.defect;
    p.defect_S = S.defect;
  }
  p.compatible = std::max({p.defect_L, p.defect_R, p.defect_S}) <= kCompatibilityThreshold;
  return p;
}

SystemResiduals system_residuals(const GeometryCache& c, const PotentialSet& p) {
  const int m = c.dim;
  const int m2 = blade::binomial(m, 2);
  const Grid& g = c.grid();
  const Field lapS = laplace_beltrami(c, p.S);
  const Field lapR = laplace_beltrami(c, p.R);
  const FieldPair dS = flat_gradient(c, p.S);
  const FieldPair dR = flat_gradient(c, p.R);
  const FieldPair dtau = tangent_plane_derivative(c);

  FieldPair tau_X, tau_YX;
  for (int a = 0; a < 2; ++a) {
    const int margin = std::max(p.grad_X[a].margin(), p.grad_Y[a].margin());
    tau_X[a] = node_map(g, 1, p.grad_X[a].margin(), [&](int i, int j, double* o) {
      o[0] = inner(c.tau(i, j), mv(p.grad_X[a], i, j, m, 2));
    });
    tau_YX[a] = node_map(g, m2, margin, [&](int i, int j, double* o) {
      const MultiVec t = c.tau(i, j);
      store(o, t * p.grad_Y[a](i, j, 0) + bullet(t, mv(p.grad_X[a], i, j, m, 2)));
    });
  }
  const Field div_tau_X = covariant_divergence(c, tau_X);
  const Field div_tau_YX = covariant_divergence(c, tau_YX);
  // eps^{kj} d_j d_k X: zero for a solved X, not for a closed-form grad X
  // that is only divergence-matched.
  const FieldPair ddX0 = flat_gradient(c, p.dX[0]);
  const FieldPair ddX1 = flat_gradient(c, p.dX[1]);
  const Field x_curl = ddX0[1] - ddX1[0];

  SystemResiduals r;
  r.margin = std::max({lapS.margin(), lapR.margin(), div_tau_X.margin(), div_tau_YX.margin(), x_curl.margin(),
                       pair_margin(p.grad_X), pair_margin(p.grad_Y)});
  r.s_eq = node_map(g, 1, r.margin, [&](int i, int j, double* o) {
    const double s = c.sqrt_det(i, j, 0);
    double v = s * lapS(i, j, 0) + s * div_tau_X(i, j, 0);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double e = levi_civita(a, b);
        if (e != 0.0) v -= e * inner(mv(dtau[a], i, j, m, 2), mv(dR[b], i, j, m, 2));
      }
    o[0] = v;
  });
  r.r_eq = node_map(g, m2, r.margin, [&](int i, int j, double* o) {
    const double s = c.sqrt_det(i, j, 0);
    MultiVec v = mv(lapR, i, j, m, 2) * s - mv(div_tau_YX, i, j, m, 2) * s - mv(x_curl, i, j, m, 2);
    for (int k = 0; k < 2; ++k)
      for (int a = 0; a < 2; ++a) {
        const double e = levi_civita(k, a);
        if (e == 0.0) continue;
        const MultiVec dt = mv(dtau[a], i, j, m, 2);
        v -= (dt * dS[k](i, j, 0) + bullet(dt, mv(dR[k], i, j, m, 2))) * e;
      }
    store(o, v);
  });
  r.phi_eq = node_map(g, m, r.margin, [&](int i, int j, double* o) {
    const double s = c.sqrt_det(i, j, 0);
    MultiVec v = vec_mv(c.H(i, j)) * (2.0 * s);
    for (int a = 0; a < 2; ++a) {
      const MultiVec da = vec_mv(c.dphi(a, i, j));
      v -= (da * p.grad_Y[a](i, j, 0) + bullet(mv(p.grad_X[a], i, j, m, 2), da)) * s;
      for (int b = 0; b < 2; ++b) {
        const double e = levi_civita(a, b);
        if (e == 0.0) continue;
        const MultiVec db = vec_mv(c.dphi(b, i, j));
        v -= (db * dS[a](i, j, 0) + bullet(mv(dR[a], i, j, m, 2), db)) * e;
      }
    }
    store(o, v);
  });
  r.s = norm_at(r.s_eq, r.margin);
  r.r = norm_at(r.r_eq, r.margin);
  r.phi = norm_at(r.phi_eq, r.margin);
  r.x_curl = norm_at(x_curl, r.margin);
  return r;
}

GradientResiduals gradient_identity_residuals(const GeometryCache& c, const PotentialSet& p) {
  const int m = c.dim;
  const int m2 = blade::binomial(m, 2);
  const Grid& g = c.grid();
  const FieldPair dS = flat_gradient(c, p.S);
  const FieldPair dR = flat_gradient(c, p.R);
  const FieldPair dL = flat_gradient(c, p.L);
  const FieldPair upS = raise_index(c, dS);
  const FieldPair upR = raise_index(c, dR);

  GradientResiduals r;
  r.margin = std::max({pair_margin(upS), pair_margin(upR), pair_margin(dL), pair_margin(p.grad_X),
                       pair_margin(p.dX), pair_margin(p.grad_Y), pair_margin(p.dY), pair_margin(p.T),
                       pair_margin(p.grad_V)});
  for (int a = 0; a < 2; ++a) {
    r.grad_S[a] = node_map(g, 1, r.margin, [&](int i, int j, double* o) {
      const MultiVec t = c.tau(i, j);
      const double inv = 1.0 / c.sqrt_det(i, j, 0);
      double rhs = -inner(t, mv(p.grad_X[a], i, j, m, 2));
      for (int k = 0; k < 2; ++k) {
        const double e = levi_civita(a, k);
        if (e != 0.0) rhs += inv * e * (inner(t, mv(dR[k], i, j, m, 2)) - p.dY[k](i, j, 0));
      }
      o[0] = upS[a](i, j, 0) - rhs;
    });
    r.grad_R[a] = node_map(g, m2, r.margin, [&](int i, int j, double* o) {
      const MultiVec t = c.tau(i, j);
      const double inv = 1.0 / c.sqrt_det(i, j, 0);
      MultiVec rhs = t * p.grad_Y[a](i, j, 0) + bullet(t, mv(p.grad_X[a], i, j, m, 2));
      for (int k = 0; k < 2; ++k) {
        const double e = levi_civita(k, a);
        if (e == 0.0) continue;
        rhs += (t * dS[k](i, j, 0) + bullet(t, mv(dR[k], i, j, m, 2)) + mv(p.dX[k], i, j, m, 2)) * (inv * e);
      }
      store(o, mv(upR[a], i, j, m, 2) - rhs);
    });
    r.decomposition[a] = node_map(g, m, r.margin, [&](int i, int j, double* o) {
      const double inv = 1.0 / c.sqrt_det(i, j, 0);
      Vec v = p.T[a].vec(i, j) - p.grad_V[a].vec(i, j);
      for (int k = 0; k < 2; ++k) v -= inv * levi_civita(k, a) * dL[k].vec(i, j);
      for (int q = 0; q < m; ++q) o[q] = v[q];
    });
  }
  r.s = pair_norm(r.grad_S, r.margin);
  r.r = pair_norm(r.grad_R, r.margin);
  r.l = pair_norm(r.decomposition, r.margin);
  return r;
}

}  // namespace wcur
