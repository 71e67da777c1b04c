#include "wcur/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace wcur {

Vec GeometryCache::h(int a, int b, int i, int j) const {
  const double* p = sff.node(i, j) + sym_index(a, b) * dim;
  Vec v(dim);
  for (int c = 0; c < dim; ++c) v[c] = p[c];
  return v;
}

Vec GeometryCache::project_normal(const Vec& w, int i, int j) const {
  const Vec d0 = dphi(0, i, j);
  const Vec d1 = dphi(1, i, j);
  const double t0 = w.dot(d0);
  const double t1 = w.dot(d1);
  const double c0 = ginv(0, 0, i, j) * t0 + ginv(0, 1, i, j) * t1;
  const double c1 = ginv(1, 0, i, j) * t0 + ginv(1, 1, i, j) * t1;
  return w - c0 * d0 - c1 * d1;
}

Vec GeometryCache::unit_normal(int i, int j) const {
  if (dim != 3) throw ValidationError("unit normal is only defined for surfaces in R^3");
  return normal_plane.vec(i, j);
}

GeometryCache compute_geometry(const ImmersionPatch& patch, DiffOrder order) {
  check_nondegenerate(patch);
  GeometryCache c;
  c.patch = std::make_shared<const ImmersionPatch>(patch);
  c.order = order;
  const int m = patch.dim;
  c.dim = m;
  const Grid& g = patch.grid;
  c.metric = Field(g, 3);
  c.inverse = Field(g, 3);
  c.det = Field(g, 1);
  c.sqrt_det = Field(g, 1);
  c.christoffel = Field(g, 6);
  c.sff = Field(g, 3 * m);
  c.mean_curvature = Field(g, m);
  c.tangent_plane = Field(g, blade::binomial(m, 2));
  c.normal_plane = Field(g, blade::binomial(m, m - 2));

  for (int i = 0; i < g.u.n; ++i) {
    for (int j = 0; j < g.v.n; ++j) {
      const Vec d[2] = {patch.d1[0].vec(i, j), patch.d1[1].vec(i, j)};
      double gm[3] = {d[0].dot(d[0]), d[0].dot(d[1]), d[1].dot(d[1])};
      const double det = gm[0] * gm[2] - gm[1] * gm[1];
      if (!(det >= kMinMetricDet)) throw DegenerateImmersion("degenerate metric during geometry computation");
      const double gi[3] = {gm[2] / det, -gm[1] / det, gm[0] / det};
      for (int s = 0; s < 3; ++s) {
        c.metric(i, j, s) = gm[s];
        c.inverse(i, j, s) = gi[s];
      }
      c.det(i, j, 0) = det;
      c.sqrt_det(i, j, 0) = std::sqrt(det);

      auto ginv = [&](int a, int b) { return gi[sym_index(a, b)]; };
      Vec H = Vec::Zero(m);
      for (int s = 0; s < 3; ++s) {
        const Vec dd = patch.d2[s].vec(i, j);
        const double low[2] = {dd.dot(d[0]), dd.dot(d[1])};
        Vec hs = dd;
        for (int k = 0; k < 2; ++k) {
          const double gam = ginv(k, 0) * low[0] + ginv(k, 1) * low[1];
          c.christoffel(i, j, k * 3 + s) = gam;
          hs -= gam * d[k];
        }
        for (int q = 0; q < m; ++q) c.sff(i, j, s * m + q) = hs[q];
        // g^{ab} h_ab with the off-diagonal pair counted twice.
        H += (s == 1 ? 2.0 : 1.0) * gi[s] * hs;
      }
      c.mean_curvature.set(i, j, Vec(0.5 * H));

      const MultiVec tau = wedge(MultiVec::vector(d[0]), MultiVec::vector(d[1])) * (1.0 / std::sqrt(det));
      c.tangent_plane.set(i, j, tau);
      c.normal_plane.set(i, j, hodge_star(tau));
    }
  }
  return c;
}

Field scalar_mean_curvature(const GeometryCache& c) {
  if (c.dim != 3) throw ValidationError("scalar mean curvature needs m = 3");
  return node_map(c.grid(), 1, 0, [&](int i, int j, double* o) { o[0] = c.H(i, j).dot(c.unit_normal(i, j)); });
}

Field laplace_beltrami(const GeometryCache& c, const Field& f) {
  const Field d0 = partial(f, 0, c.order);
  const Field d1 = partial(f, 1, c.order);
  const Field d00 = partial2(f, 0, c.order);
  const Field d01 = partial_mixed(f, c.order);
  const Field d11 = partial2(f, 1, c.order);
  const int nc = f.components();
  return node_map(f.grid(), nc, d0.margin(), [&](int i, int j, double* o) {
    const double g00 = c.ginv(0, 0, i, j), g01 = c.ginv(0, 1, i, j), g11 = c.ginv(1, 1, i, j);
    // g^{jk} Gamma^l_jk
    double contracted[2];
    for (int l = 0; l < 2; ++l) {
      contracted[l] = g00 * c.gamma(l, 0, 0, i, j) + 2.0 * g01 * c.gamma(l, 0, 1, i, j) + g11 * c.gamma(l, 1, 1, i, j);
    }
    for (int q = 0; q < nc; ++q) {
      o[q] = g00 * d00(i, j, q) + 2.0 * g01 * d01(i, j, q) + g11 * d11(i, j, q) - contracted[0] * d0(i, j, q) -
             contracted[1] * d1(i, j, q);
    }
  });
}

FieldPair flat_gradient(const GeometryCache& c, const Field& f) {
  return {partial(f, 0, c.order), partial(f, 1, c.order)};
}

FieldPair raise_index(const GeometryCache& c, const FieldPair& lower) {
  const int nc = lower[0].components();
  const int margin = std::max(lower[0].margin(), lower[1].margin());
  FieldPair up;
  for (int a = 0; a < 2; ++a) {
    up[a] = node_map(lower[0].grid(), nc, margin, [&](int i, int j, double* o) {
      const double ga0 = c.ginv(a, 0, i, j), ga1 = c.ginv(a, 1, i, j);
      for (int q = 0; q < nc; ++q) o[q] = ga0 * lower[0](i, j, q) + ga1 * lower[1](i, j, q);
    });
  }
  return up;
}

FieldPair lower_index(const GeometryCache& c, const FieldPair& up) {
  const int nc = up[0].components();
  const int margin = std::max(up[0].margin(), up[1].margin());
  FieldPair low;
  for (int a = 0; a < 2; ++a) {
    low[a] = node_map(up[0].grid(), nc, margin, [&](int i, int j, double* o) {
      const double ga0 = c.metric(i, j, sym_index(a, 0)), ga1 = c.metric(i, j, sym_index(a, 1));
      for (int q = 0; q < nc; ++q) o[q] = ga0 * up[0](i, j, q) + ga1 * up[1](i, j, q);
    });
  }
  return low;
}

FieldPair tangent_plane_derivative(const GeometryCache& c) {
  const int m = c.dim;
  FieldPair out;
  for (int a = 0; a < 2; ++a) {
    out[a] = node_map(c.grid(), blade::binomial(m, 2), 0, [&](int i, int j, double* o) {
      const MultiVec d0 = MultiVec::vector(c.dphi(0, i, j));
      const MultiVec d1 = MultiVec::vector(c.dphi(1, i, j));
      const MultiVec dd0 = MultiVec::vector(c.patch->d2[sym_index(a, 0)].vec(i, j));
      const MultiVec dd1 = MultiVec::vector(c.patch->d2[sym_index(a, 1)].vec(i, j));
      // d_a log |g|^{1/2} = Gamma^k_ak
      const double dlog = c.gamma(0, a, 0, i, j) + c.gamma(1, a, 1, i, j);
      const double s = 1.0 / c.sqrt_det(i, j, 0);
      const MultiVec r = (wedge(dd0, d1) + wedge(d0, dd1)) * s - c.tau(i, j) * dlog;
      for (int q = 0; q < r.size(); ++q) o[q] = r[q];
    });
  }
  return out;
}

FieldPair gradient_up(const GeometryCache& c, const Field& f) { return raise_index(c, flat_gradient(c, f)); }

Field covariant_divergence(const GeometryCache& c, const FieldPair& T) {
  const int nc = T[0].components();
  if (T[1].components() != nc) throw std::invalid_argument("covariant_divergence: component mismatch");
  const int margin = std::max(T[0].margin(), T[1].margin());
  FieldPair w;
  for (int a = 0; a < 2; ++a) {
    w[a] = node_map(T[a].grid(), nc, margin, [&](int i, int j, double* o) {
      const double s = c.sqrt_det(i, j, 0);
      for (int q = 0; q < nc; ++q) o[q] = s * T[a](i, j, q);
    });
  }
  const Field a = partial(w[0], 0, c.order);
  const Field b = partial(w[1], 1, c.order);
  return node_map(a.grid(), nc, a.margin(), [&](int i, int j, double* o) {
    const double s = c.sqrt_det(i, j, 0);
    for (int q = 0; q < nc; ++q) o[q] = (a(i, j, q) + b(i, j, q)) / s;
  });
}

Field project_normal(const GeometryCache& c, const Field& F) {
  return node_map(F.grid(), c.dim, F.margin(),
                  [&](int i, int j, double* o) {
                    const Vec p = c.project_normal(F.vec(i, j), i, j);
                    for (int q = 0; q < c.dim; ++q) o[q] = p[q];
                  });
}

double normality_defect(const GeometryCache& c, const Field& F) {
  double sup = 0.0;
  F.for_each_valid([&](int i, int j) { sup = std::max(sup, F.vec(i, j).norm()); });
  const double scale = std::max(1.0, sup);
  double worst = 0.0;
  F.for_each_valid([&](int i, int j) {
    const Vec f = F.vec(i, j);
    for (int k = 0; k < 2; ++k) {
      const Vec d = c.dphi(k, i, j);
      worst = std::max(worst, std::abs(f.dot(d)) / (d.norm() * scale));
    }
  });
  return worst;
}

Field normal_laplacian(const GeometryCache& c, const Field& F) {
  if (F.components() != c.dim) throw ValidationError("normal_laplacian: field must be R^m valued");
  const double defect = normality_defect(c, F);
  if (defect > 1e-6) {
    throw ValidationError("normal_laplacian: input field is not normal (defect " + std::to_string(defect) + ")");
  }
  const Field lap = laplace_beltrami(c, F);
  const int m = c.dim;
  return node_map(F.grid(), m, lap.margin(), [&](int i, int j, double* o) {
    Vec r = c.project_normal(lap.vec(i, j), i, j);
    const Vec f = F.vec(i, j);
    // (F . h^{ab}) h_ab with h^{ab} = g^{ac} g^{bd} h_cd
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        Vec up = Vec::Zero(m);
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q) up += c.ginv(a, p, i, j) * c.ginv(b, q, i, j) * c.h(p, q, i, j);
        r += f.dot(up) * c.h(a, b, i, j);
      }
    for (int q = 0; q < m; ++q) o[q] = r[q];
  });
}

double surface_integral(const GeometryCache& c, const Field& integrand, Quadrature rule) {
  if (integrand.components() != 1) throw std::invalid_argument("surface_integral: scalar integrand expected");
  const Grid& g = c.grid();
  // Gregory end corrections of the trapezoid rule (fourth order).
  static constexpr double kGregory[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
  for (int a = 0; a < 2; ++a) {
    if (rule == Quadrature::gregory && !g.axis(a).periodic && integrand.end(a) - integrand.begin(a) < 6) {
      throw ValidationError("gregory quadrature needs at least 6 nodes per open axis");
    }
  }
  auto weight = [&](int a, int k) {
    if (g.axis(a).periodic) return 1.0;
    const int from_edge = std::min(k - integrand.begin(a), integrand.end(a) - 1 - k);
    if (rule == Quadrature::trapezoid) return from_edge == 0 ? 0.5 : 1.0;
    return from_edge < 3 ? kGregory[from_edge] : 1.0;
  };
  double sum = 0.0;
  integrand.for_each_valid(
      [&](int i, int j) { sum += weight(0, i) * weight(1, j) * integrand(i, j, 0) * c.sqrt_det(i, j, 0); });
  return sum * g.cell_area();
}

double willmore_energy(const GeometryCache& c) { return surface_integral(c, squared_norm(c.mean_curvature)); }

Field dot(const Field& a, const Field& b) {
  const int margin = std::max(a.margin(), b.margin());
  return node_map(a.grid(), 1, margin, [&](int i, int j, double* o) {
    double s = 0.0;
    for (int q = 0; q < a.components(); ++q) s += a(i, j, q) * b(i, j, q);
    o[0] = s;
  });
}

Field scale(const Field& a, const Field& s) {
  const int margin = std::max(a.margin(), s.margin());
  return node_map(a.grid(), a.components(), margin, [&](int i, int j, double* o) {
    for (int q = 0; q < a.components(); ++q) o[q] = s(i, j, 0) * a(i, j, q);
  });
}

Field squared_norm(const Field& a) { return dot(a, a); }

namespace {

template <class Op>
Field binary_multivec(const Field& a, int pa, const Field& b, int pb, int m, int grade, Op op) {
  const int margin = std::max(a.margin(), b.margin());
  return node_map(a.grid(), blade::binomial(m, grade), margin, [&](int i, int j, double* o) {
    const MultiVec r = op(a.multivec(i, j, m, pa), b.multivec(i, j, m, pb));
    for (int q = 0; q < r.size(); ++q) o[q] = r[q];
  });
}

}  // namespace

Field wedge(const Field& a, int pa, const Field& b, int pb, int m) {
  return binary_multivec(a, pa, b, pb, m, pa + pb,
                         [](const MultiVec& x, const MultiVec& y) { return wedge(x, y); });
}

Field bullet(const Field& a, int pa, const Field& b, int pb, int m) {
  return binary_multivec(a, pa, b, pb, m, pa + pb - 2,
                         [](const MultiVec& x, const MultiVec& y) { return bullet(x, y); });
}

Field hodge_star(const Field& a, int pa, int m) {
  return node_map(a.grid(), blade::binomial(m, m - pa), a.margin(), [&](int i, int j, double* o) {
    const MultiVec r = hodge_star(a.multivec(i, j, m, pa));
    for (int q = 0; q < r.size(); ++q) o[q] = r[q];
  });
}

}  // namespace wcur
