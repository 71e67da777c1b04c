#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "wcur/patch.hpp"

namespace wcur {

struct GridSpec {
  int nu = 65;
  int nv = 65;
  /// Overrides the catalog default domain {u0, u1, v0, v1}.
  std::optional<std::array<double, 4>> domain;

  GridSpec() = default;
  explicit GridSpec(int n) : nu(n), nv(n) {}
  GridSpec(int n, std::array<double, 4> box) : nu(n), nv(n), domain(box) {}
};

struct CatalogEntry {
  std::string name;
  std::string params;       // e.g. "R,r"
  std::string defaults;     // e.g. "1.4142135623730951,1"
  std::string description;
};

const std::vector<CatalogEntry>& catalog_entries();

/// Analytic 2-jet of a catalog surface. Throws ValidationError on unknown
/// names, bad parameter counts and degenerate parameter choices.
ImmersionPatch build_catalog_patch(const std::string& name, const std::vector<double>& params, const GridSpec& grid);

/// Parses "NAME" or "NAME:p1,p2,..." and builds the patch.
ImmersionPatch build_catalog_patch(const std::string& spec, const GridSpec& grid);

/// Area of the part of the unit sphere covered by the stereographic chart
/// on [-L, L]^2.
double stereographic_square_area(double half_width);

}  // namespace wcur
