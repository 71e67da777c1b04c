#pragma once

#include <vector>

#include "wcur/poisson.hpp"

namespace wcur {

/// Flux of a weighted contravariant field P^j through the coordinate circle
/// of radius r around (cu, cv): oint P^j n_j ds with the flat outward normal.
/// P is interpolated bilinearly; `samples` trapezoid points in angle.
/// Throws ValidationError("circle exits valid region") when a sample needs a
/// node outside the valid region of P.
Vec contour_flux(const FieldPair& P, double cu, double cv, double r, int samples);

/// Default angular resolution: four points per grid line.
int default_contour_samples(const Grid& g);

struct GreenFunction {
  Field value;              // L_g = l + u, scalar; 0 at an excluded centre node
  Field singular;           // l = (4 pi)^{-1} log(x^T A0^{-1} x)
  Field remainder;          // u, Dirichlet zero on the grid boundary
  FieldPair weighted_gradient;  // |g|^{1/2} grad^j L_g
  double green_defect = 0.0;    // relative algebraic residual of the u solve
  bool centre_node = false;     // the origin is a grid node
};

/// Green function of d_j(|g|^{1/2} g^{jk} d_k .) with a unit source at the
/// chart origin, by singularity splitting. A0 = |g|^{1/2} g^{-1} at the origin
/// (averaged over the surrounding nodes when the origin falls inside a cell).
GreenFunction green_function(const GeometryCache& c, PoissonOptions opt = {});

struct ResidueReport {
  Vec beta_res;                          // mean flux over the radii
  std::vector<double> radii;
  std::vector<Vec> flux_by_radius;
  double spread = 0.0;
  double solver_residual = 0.0;          // V solve
  double green_defect = 0.0;             // L_g remainder solve
  std::vector<double> green_flux_by_radius;  // should be 1
  bool flagged = false;                  // spread above 1e-2
};

inline constexpr double kSpreadThreshold = 1e-2;
/// Fluxes at or below this size count as zero when forming the spread.
inline constexpr double kNullFlux = 1e-8;

/// oint nu_j |g|^{1/2}(T^j - grad^j V) dl on the circle of radius r around
/// the chart origin.
Vec residue_flux(const GeometryCache& c, const FieldPair& T, const FieldPair& grad_V, double r);

/// Fluxes at three or more strictly increasing radii.
/// spread = max_r |flux(r) - mean| / |mean|.
ResidueReport radius_independence_scan(const GeometryCache& c, const FieldPair& T, const FieldPair& grad_V,
                                       const std::vector<double>& radii);

/// Full pipeline: T from the cache, V from Lap_g V = -W with W zeroed inside
/// the core disk (default: half the smallest radius), then the scan, plus
/// the Green function flux through the same circles.
ResidueReport compute_residue(const GeometryCache& c, const std::vector<double>& radii, double core_radius = -1.0,
                              PoissonOptions opt = {});

}  // namespace wcur
