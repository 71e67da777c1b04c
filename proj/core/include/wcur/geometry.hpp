#pragma once

#include <memory>

#include "wcur/patch.hpp"
#include "wcur/stencil.hpp"

namespace wcur {

/// Index of the symmetric pair (a, b) in {uu, uv, vv} storage.
inline int sym_index(int a, int b) { return a + b; }

/// Levi-Civita symbol with eps^{12} = 1.
inline double levi_civita(int a, int b) { return a == b ? 0.0 : (a < b ? 1.0 : -1.0); }

/// First- and second-order geometry of a patch, all on the patch's nodes
/// (margin 0).
struct GeometryCache {
  std::shared_ptr<const ImmersionPatch> patch;
  DiffOrder order = DiffOrder::fourth;
  int dim = 3;

  Field metric;         // g_11, g_12, g_22
  Field inverse;        // g^11, g^12, g^22
  Field det;            // |g|
  Field sqrt_det;       // |g|^{1/2}
  Field christoffel;    // Gamma^k_ij at k*3 + sym_index(i, j)
  Field sff;            // h_ij at sym_index(i, j)*m + c
  Field mean_curvature; // H = 1/2 g^ij h_ij
  Field tangent_plane;  // |g|^{-1/2} d_1 Phi ^ d_2 Phi, a unit 2-vector
  Field normal_plane;   // star(tangent_plane), a unit (m-2)-vector

  const Grid& grid() const { return patch->grid; }

  Vec dphi(int a, int i, int j) const { return patch->d1[a].vec(i, j); }
  Vec phi(int i, int j) const { return patch->phi.vec(i, j); }
  double ginv(int a, int b, int i, int j) const { return inverse(i, j, sym_index(a, b)); }
  double gamma(int k, int a, int b, int i, int j) const { return christoffel(i, j, k * 3 + sym_index(a, b)); }
  Vec h(int a, int b, int i, int j) const;
  Vec H(int i, int j) const { return mean_curvature.vec(i, j); }
  /// grad^a Phi = g^{ab} d_b Phi.
  Vec dphi_up(int a, int i, int j) const { return ginv(a, 0, i, j) * dphi(0, i, j) + ginv(a, 1, i, j) * dphi(1, i, j); }
  /// Component of w normal to the surface.
  Vec project_normal(const Vec& w, int i, int j) const;
  MultiVec tau(int i, int j) const { return tangent_plane.multivec(i, j, dim, 2); }
  /// Unit normal for m = 3 (the 1-vector star(tau)); oriented along d_1 Phi x d_2 Phi.
  Vec unit_normal(int i, int j) const;
};

GeometryCache compute_geometry(const ImmersionPatch& patch, DiffOrder order = DiffOrder::fourth);

/// Node-wise scalar H . nu (m = 3 only).
Field scalar_mean_curvature(const GeometryCache& c);

/// Delta_g f = g^{jk}(d_j d_k f - Gamma^l_jk d_l f), componentwise.
Field laplace_beltrami(const GeometryCache& c, const Field& f);

/// Flat partials (d_1 f, d_2 f).
FieldPair flat_gradient(const GeometryCache& c, const Field& f);

/// grad^j f = g^{jk} d_k f, componentwise.
FieldPair gradient_up(const GeometryCache& c, const Field& f);

/// Raise the index of a pair of flat partials.
FieldPair raise_index(const GeometryCache& c, const FieldPair& lower);

/// Lower a contravariant pair: g_{kj} up^j.
FieldPair lower_index(const GeometryCache& c, const FieldPair& up);

/// Flat partials d_j of the unit tangent 2-vector, exact from the 2-jet.
FieldPair tangent_plane_derivative(const GeometryCache& c);

/// |g|^{-1/2} d_j(|g|^{1/2} T^j).
Field covariant_divergence(const GeometryCache& c, const FieldPair& T);

/// Pointwise normal projection of an R^m valued field.
Field project_normal(const GeometryCache& c, const Field& F);

/// Laplacian of the normal bundle connection for a normal field F.
/// Throws ValidationError if F is not normal to 1e-6 (relative).
Field normal_laplacian(const GeometryCache& c, const Field& F);

/// Max over valid nodes of |F . d_k Phi| / (|d_k Phi| * max(1, sup|F|)).
double normality_defect(const GeometryCache& c, const Field& F);

enum class Quadrature { trapezoid, gregory };

/// Quadrature of integrand * |g|^{1/2} over the valid region of the
/// integrand: trapezoid (or its fourth-order Gregory correction) on
/// non-periodic axes, rectangle on periodic ones.
double surface_integral(const GeometryCache& c, const Field& integrand, Quadrature rule = Quadrature::trapezoid);

double willmore_energy(const GeometryCache& c);

// Node-wise algebra helpers over fields.
Field dot(const Field& a, const Field& b);
Field scale(const Field& a, const Field& s);  // s has one component
Field squared_norm(const Field& a);

// Node-wise exterior algebra on fields holding grade-p components in R^m.
Field wedge(const Field& a, int pa, const Field& b, int pb, int m);
Field bullet(const Field& a, int pa, const Field& b, int pb, int m);
Field hodge_star(const Field& a, int pa, int m);
/// Map each valid node of a fresh field with `components` slots.
template <class F>
Field node_map(const Grid& g, int components, int margin, F&& fn) {
  Field out(g, components, margin);
  out.for_each_valid([&](int i, int j) { fn(i, j, out.node(i, j)); });
  return out;
}

}  // namespace wcur
