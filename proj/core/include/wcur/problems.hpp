#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wcur/potentials.hpp"

namespace wcur {

/// Common output of the problem drivers: the forcing that enters the
/// potential chain, the chain itself and the residuals of its system.
struct ProblemReport {
  Field W;                 // problem residual: zero on solutions
  PotentialSet potentials;
  SystemResiduals system;
  GradientResiduals gradients;
};

/// Willmore surfaces: W is the Willmore operator, V = X = Y = 0.
ProblemReport willmore_problem(const GeometryCache& c);

/// Contravariant q^{ij} per node, stored as q11, q12, q21, q22.
struct QValidation {
  double symmetry_defect = 0.0;       // sup |q^12 - q^21|
  double trace_defect = 0.0;          // sup |g_ij q^ij|
  double transversality_defect = 0.0; // sup |grad_j q^ij|, interior nodes
  bool transverse = true;
};

inline constexpr double kQTolerance = 1e-8;
inline constexpr double kTransversalityTolerance = 1e-6;

/// Throws ValidationError("q not symmetric" / "q not traceless").
QValidation validate_q(const GeometryCache& c, const Field& q);

/// Text format: header lines `nx N` and `ny N`, then rows `i j q11 q12 q21 q22`.
Field load_q_field(std::istream& in, const Grid& grid);
Field load_q_file(const std::string& path, const Grid& grid);

struct ConstrainedReport : ProblemReport {
  QValidation q;
  Field h0q;                       // (h_0)_ij q^ij
  double identity_dot = 0.0;       // sup |grad^j V . d_j Phi|
  double identity_wedge = 0.0;     // sup |grad^j V ^ d_j Phi|
  std::vector<std::string> warnings;
};

/// W - (h_0)_ij q^ij with h_0 = h - H g, grad^j V = -q^ij d_i Phi, X = Y = 0.
/// For q = 0 every field matches willmore_problem bit for bit.
ConstrainedReport constrained_problem(const GeometryCache& c, const Field& q);

struct HelfrichParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

struct HelfrichReport : ProblemReport {
  Field rhs;                       // 2 alpha H + beta nu - gamma(|h|^2/2 - 2 H^2) nu
  ResidualNorm el;                 // norm of W over the W margin
  double xprop_cross = 0.0;        // sup |nu x grad^j X - beta/4 |Phi|^2 grad^j Phi|
  double xprop_normal = 0.0;       // sup |grad^j X x d_j Phi - beta/2 |Phi|^2 nu|
};

/// Codimension one only. The closed-form potentials are
///   grad^j V = -alpha grad^j Phi + beta/2 |g|^{-1/2} eps^{ij} Phi x d_i Phi
///              + gamma/2 (h^ij - 2 H g^ij) d_i Phi,
///   grad^j X = beta/4 |g|^{-1/2} eps^{ij} |Phi|^2 d_i Phi   (carried as *X in Lambda^2),
///   Lap_g Y = -2 alpha - gamma H + beta Phi . nu.
HelfrichReport helfrich_problem(const GeometryCache& c, const HelfrichParams& p);

struct ChenReport : ProblemReport {
  Field lap_H;                     // Lap_g H, R^m
  ResidualNorm biharmonic;         // norm of Lap_g H
  Field identity;                  // Lap_g(Phi.H) - 2|H|^2 - 2 grad^j Phi . d_j H - Phi . Lap_g H
  ResidualNorm identity_norm;
  Field chen_W;                    // 2 (H . h^jk) h_jk - 2 |H|^2 H
};

/// grad^j V = |H|^2 grad^j Phi - 2 (H . h^jk) d_k Phi, X = 0, Y = Phi . H.
/// W of the report is the Willmore operator minus chen_W.
ChenReport chen_problem(const GeometryCache& c);

struct ClosedSurfaceIntegrals {
  double A = 0.0;
  double M = 0.0;                  // integral of H . nu
  double Vol = 0.0;                // integral of Phi . nu
  double balancing_residual = 0.0; // 2 alpha A + gamma M - beta Vol
  double scale = 0.0;              // |alpha| A + |gamma| |M| + |beta| |Vol|
  double tail_area = 0.0;          // analytic part not covered by the chart
};

/// Needs a closed chart: doubly periodic, or a centred stereographic sphere
/// chart (the uncovered cap is added in closed form). m = 3.
ClosedSurfaceIntegrals closed_surface_integrals(const GeometryCache& c, const HelfrichParams& p);

struct FlowOptions {
  double tau = 1e-4;
  int steps = 50;
  int collar = 4;                  // frozen layers next to open edges
  DiffOrder order = DiffOrder::fourth;
};

struct FlowSample {
  int step = 0;
  double energy = 0.0;
  double sup_W = 0.0;
  double det_g_min = 0.0;
};

struct FlowResult {
  std::vector<FlowSample> trace;
  ImmersionPatch final_patch;
  double stable_tau = 0.0;         // frozen-coefficient explicit Euler bound at step 0 (conservative)
  bool strictly_decreasing = true;
  double drift = 0.0;              // |E_last - E_0|
};

/// Explicit Euler Phi <- Phi - tau chi W with FD jets refreshed each step.
/// chi is 0 on the collar and rises smoothly to 1 over another collar width.
FlowResult willmore_flow(const ImmersionPatch& patch, const FlowOptions& opt = {});

}  // namespace wcur
