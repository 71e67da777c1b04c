#pragma once

#include <optional>
#include <string>

#include "wcur/poisson.hpp"

namespace wcur {

/// Closed-form replacements for stages of the potential chain. Gradient
/// overrides are contravariant (grad^j). Anything left empty is solved for.
struct PotentialOverrides {
  std::optional<FieldPair> grad_V;  // R^m
  std::optional<FieldPair> grad_X;  // Lambda^2
  std::optional<Field> Y;
  std::optional<Field> Y_source;    // solve Lap_g Y = Y_source instead

  /// V = X = Y = 0 (valid whenever W vanishes).
  static PotentialOverrides zero(const GeometryCache& c);
};

struct PotentialSet {
  int dim = 3;
  FieldPair T;                // stress tensor the chain was built from
  std::optional<Field> V;     // only when solved
  FieldPair grad_V;           // grad^j V
  Field L;                    // R^m
  FieldPair grad_X, dX;       // grad^j X and d_k X, Lambda^2
  std::optional<Field> X;     // only when solved
  Field Y;
  FieldPair grad_Y, dY;
  Field S;                    // scalar
  Field R;                    // Lambda^2

  // Bookkeeping.
  std::string boundary = "dirichlet_zero";
  int gauge_i = 0, gauge_j = 0;
  double defect_L = 0.0, defect_S = 0.0, defect_R = 0.0;
  bool compatible = true;
  double solver_residual = 0.0;
};

/// Builds V, L, X, Y, S, R from the Willmore-type forcing W: Lap_g V = -W,
/// T^j - grad^j V = |g|^{-1/2} eps^{kj} d_k L, Lap_g X = grad^j V ^ d_j Phi,
/// Lap_g Y = grad^j V . d_j Phi, then S and R from their gradients
///   d_k R = L ^ d_k Phi - |g|^{1/2} eps_{kj} (H ^ grad^j Phi + grad^j X),
///   d_k S = L . d_k Phi - |g|^{1/2} eps_{kj} grad^j Y.
/// Solver failures are rethrown with the stage name.
PotentialSet build_potential_set(const GeometryCache& c, const Field& W, const PotentialOverrides& overrides = {},
                                 PoissonOptions opt = {});

struct SystemResiduals {
  Field s_eq;    // scalar
  Field r_eq;    // Lambda^2
  Field phi_eq;  // R^m
  ResidualNorm s, r, phi;
  ResidualNorm x_curl;  // eps^{kj} d_j d_k X, kept in the R-equation
  int margin = 0;
};

/// Node-wise residuals of the second-order system for S, R and Phi:
///   |g|^{1/2} Lap_g S - eps^{jk} d_j tau . d_k R + |g|^{1/2} div(tau . grad^j X)
///   |g|^{1/2} Lap_g R - eps^{kj}(d_j tau d_k S + d_j tau . d_k R + d_j d_k X) - |g|^{1/2} div(tau grad^j Y + tau . grad^j X)
///   2 |g|^{1/2} H - eps^{jk}(d_j S d_k Phi + d_j R . d_k Phi) - |g|^{1/2}(grad^j Y d_j Phi + grad^j X . d_j Phi)
/// with tau the unit tangent 2-vector and "." between multivectors the
/// first-order contraction. The d_j d_k X term vanishes when X is a function
/// and only matters for closed-form grad X overrides that are not exact.
SystemResiduals system_residuals(const GeometryCache& c, const PotentialSet& p);

struct GradientResiduals {
  FieldPair grad_S;  // grad^j S - [|g|^{-1/2} eps^{jk}(tau . d_k R - d_k Y) - tau . grad^j X]
  FieldPair grad_R;  // grad^j R - [|g|^{-1/2} eps^{kj}(tau d_k S + tau . d_k R + d_k X) + tau grad^j Y + tau . grad^j X]
  FieldPair decomposition;  // T^j - grad^j V - |g|^{-1/2} eps^{kj} d_k L
  ResidualNorm s, r, l;
  int margin = 0;
};

GradientResiduals gradient_identity_residuals(const GeometryCache& c, const PotentialSet& p);

}  // namespace wcur
