#pragma once

#include <iosfwd>
#include <string>

#include "wcur/grid.hpp"

namespace wcur {

/// The immersion has (numerically) singular metric somewhere.
class DegenerateImmersion : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

inline constexpr double kMinMetricDet = 1e-10;

enum class JetSource { analytic, finite_difference };

/// How the chart relates to a closed surface, for whole-surface integrals.
struct Closure {
  enum class Kind {
    open,          // patch of a surface; no closed-surface integrals
    periodic,      // both axes periodic: the chart is the whole surface
    sphere_chart,  // origin-centred stereographic square chart of a round sphere
  };
  Kind kind = Kind::open;
  double sphere_radius = 0.0;
};

/// Gridded 2-jet of an immersion of a planar domain into R^m.
struct ImmersionPatch {
  std::string name;
  int dim = 3;
  Grid grid;
  Field phi;                // m components
  FieldPair d1;             // d_u Phi, d_v Phi
  std::array<Field, 3> d2;  // d_uu, d_uv, d_vv
  JetSource source = JetSource::analytic;
  Closure closure;
};

/// Throws DegenerateImmersion when det(g) < kMinMetricDet or any stored
/// value is non-finite.
void check_nondegenerate(const ImmersionPatch& p);

/// Patch with positions given and jets rebuilt by finite differences.
ImmersionPatch patch_from_positions(const Grid& grid, const Field& phi, std::string name = "sampled");

// Rigid motions and dilation, applied to the stored jets exactly.
ImmersionPatch translate(const ImmersionPatch& p, const Vec& a);
ImmersionPatch rotate(const ImmersionPatch& p, const Eigen::MatrixXd& rotation);
ImmersionPatch dilate(const ImmersionPatch& p, double lambda);

/// Sampled-surface text format:
///   m <int>, nx <int>, ny <int>, hx <float>, hy <float>,
///   periodic_u <0|1>, periodic_v <0|1>, then nx*ny rows `i j phi_1 .. phi_m`.
ImmersionPatch load_sampled_patch(std::istream& in);
ImmersionPatch load_sampled_patch_file(const std::string& path);
void write_sampled_patch(std::ostream& out, const ImmersionPatch& p);

}  // namespace wcur
