#pragma once

#include <vector>

#include "wcur/geometry.hpp"

namespace wcur {

/// W = Lap_perp H + (h^i_j . H) h^j_i - 2|H|^2 H. Margin: one stencil pass.
Field willmore_operator(const GeometryCache& c);

/// T^j = grad^j H - 2 pi_n grad^j H + |H|^2 grad^j Phi. Margin: one pass.
FieldPair stress_tensor(const GeometryCache& c);

struct CurrentSet {
  Field W;                // R^m
  FieldPair T;            // R^m per direction
  FieldPair rotation;     // T^j ^ Phi + H ^ grad^j Phi, in Lambda^2
  FieldPair dilation;     // T^j . Phi
  Field res_trans;        // div T + W
  Field res_rot;          // div(rotation) + W ^ Phi
  Field res_dil;          // div(dilation) + W . Phi
  ResidualNorm trans, rot, dil;
  int margin = 0;         // common margin of the residual fields
};

CurrentSet conservation_residuals(const GeometryCache& c, const Field& W, const FieldPair& T);

/// Convenience: W and T from the cache, then the residuals.
CurrentSet compute_currents(const GeometryCache& c);

/// Smooth compactly supported bump exp(1 - 1/(1 - s^2)), s = |x - centre| / radius.
Field smooth_bump(const Grid& g, double u0, double v0, double radius);

struct VariationResult {
  double fd_derivative = 0.0;            // 5-point symmetric difference at the primary step
  double pairing = 0.0;                  // integral of B . W
  std::vector<double> steps;
  std::vector<double> fd_by_step;
  double extrapolated = 0.0;             // Richardson over the two smallest usable steps
  double relative_gap() const;           // |fd - pairing| / |pairing|
};

/// Compares d/dt E(Phi + t B) at t = 0 with the pairing of B = bump * n
/// against the Willmore operator. n is the unit normal (m = 3) or the
/// normalized normal part of e_m otherwise. The bump has to vanish on the
/// W margin plus a `collar` of extra layers next to non-periodic edges.
VariationResult energy_variation_check(const ImmersionPatch& patch, const Field& bump, double primary_step = 1e-3,
                                       const std::vector<double>& steps = {1e-2, 1e-3, 1e-4},
                                       DiffOrder order = DiffOrder::fourth, int collar = 4);

struct Motion {
  enum class Kind { translation, rotation, dilation } kind = Kind::translation;
  Vec shift;
  Eigen::MatrixXd rotation;
  double lambda = 1.0;

  static Motion translate(const Vec& a) { return {Kind::translation, a, {}, 1.0}; }
  static Motion rotate(const Eigen::MatrixXd& r) { return {Kind::rotation, {}, r, 1.0}; }
  static Motion dilate(double l) { return {Kind::dilation, {}, {}, l}; }
};

struct InvarianceResult {
  double before = 0.0;
  double after = 0.0;
  double relative_change() const;
};

InvarianceResult invariance_check(const ImmersionPatch& patch, const Motion& motion,
                                  DiffOrder order = DiffOrder::fourth);

/// Rotation by `angle` in the (a, b) coordinate plane of R^m.
Eigen::MatrixXd plane_rotation(int m, int a, int b, double angle);

}  // namespace wcur
