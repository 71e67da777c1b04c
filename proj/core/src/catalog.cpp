#include "wcur/catalog.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "wcur/format.hpp"
#include "wcur/jet.hpp"

namespace wcur {
namespace {

using std::numbers::pi;
using Chart = std::function<std::vector<Jet2>(const Jet2&, const Jet2&)>;

struct Recipe {
  Chart chart;
  std::array<double, 4> domain;
  bool periodic_u = false;
  bool periodic_v = false;
  Closure closure;
};

std::vector<Jet2> catenoid_point(const Jet2& u, const Jet2& v) { return {cosh(v) * cos(u), cosh(v) * sin(u), v}; }

void expect_params(const std::string& name, const std::vector<double>& p, size_t lo, size_t hi) {
  if (p.size() < lo || p.size() > hi) {
    throw ValidationError("surface '" + name + "' takes " + std::to_string(lo) +
                          (hi > lo ? "-" + std::to_string(hi) : std::string()) + " parameters, got " +
                          std::to_string(p.size()));
  }
  for (double x : p) {
    if (!std::isfinite(x)) throw ValidationError("surface '" + name + "': non-finite parameter");
  }
}

double param(const std::vector<double>& p, size_t k, double fallback) { return k < p.size() ? p[k] : fallback; }

Recipe torus_recipe(double R, double r) {
  if (!(r > 0.0) || !(R > r)) throw ValidationError("torus needs 0 < r < R (degenerate metric otherwise)");
  Recipe rec;
  rec.chart = [R, r](const Jet2& u, const Jet2& v) -> std::vector<Jet2> {
    const Jet2 w = R + r * cos(v);
    return {w * cos(u), w * sin(u), r * sin(v)};
  };
  rec.domain = {0.0, 2 * pi, 0.0, 2 * pi};
  rec.periodic_u = rec.periodic_v = true;
  rec.closure.kind = Closure::Kind::periodic;
  return rec;
}

Recipe make_recipe(const std::string& name, const std::vector<double>& p) {
  Recipe rec;
  if (name == "flat") {
    expect_params(name, p, 0, 1);
    const double a = param(p, 0, 1.0);
    if (!(a > 0)) throw ValidationError("flat: half-width must be positive");
    rec.chart = [](const Jet2& u, const Jet2& v) -> std::vector<Jet2> { return {u, v, Jet2(0.0)}; };
    rec.domain = {-a, a, -a, a};
  } else if (name == "sphere_stereo") {
    expect_params(name, p, 0, 2);
    const double radius = param(p, 0, 1.0);
    const double shift = param(p, 1, 0.0);
    if (!(radius > 0)) throw ValidationError("sphere_stereo: radius must be positive");
    // Second coordinate flipped so that d_u x d_v points outward.
    rec.chart = [radius, shift](const Jet2& u, const Jet2& v) -> std::vector<Jet2> {
      const Jet2 s = u + shift;
      const Jet2 r2 = s * s + v * v;
      const Jet2 k = radius / (1.0 + r2);
      return {2.0 * s * k, -2.0 * v * k, (r2 - 1.0) * k};
    };
    rec.domain = {-1.0, 1.0, -1.0, 1.0};
    if (shift == 0.0) {
      rec.closure.kind = Closure::Kind::sphere_chart;
      rec.closure.sphere_radius = radius;
    }
  } else if (name == "cylinder") {
    if (p.size() != 0 && p.size() != 2 && p.size() != 4) {
      throw ValidationError("surface 'cylinder' takes 0, 2 or 4 parameters");
    }
    expect_params(name, p, 0, 4);
    rec.chart = [](const Jet2& u, const Jet2& v) -> std::vector<Jet2> { return {cos(u), sin(u), v}; };
    rec.domain = {0.0, 2 * pi, param(p, 0, 0.0), param(p, 1, 1.0)};
    rec.periodic_u = p.size() < 4;
    if (p.size() == 4) {
      rec.domain[0] = p[2];
      rec.domain[1] = p[3];
    }
  } else if (name == "catenoid") {
    expect_params(name, p, 0, 2);
    if (p.size() == 1) throw ValidationError("surface 'catenoid' takes 0 or 2 parameters");
    rec.chart = catenoid_point;
    rec.domain = {0.0, 2 * pi, param(p, 0, -1.0), param(p, 1, 1.0)};
    rec.periodic_u = true;
  } else if (name == "clifford_torus") {
    expect_params(name, p, 0, 0);
    rec = torus_recipe(std::sqrt(2.0), 1.0);
  } else if (name == "torus_Rr") {
    expect_params(name, p, 2, 2);
    rec = torus_recipe(p[0], p[1]);
  } else if (name == "graph_z2") {
    expect_params(name, p, 0, 1);
    const double a = param(p, 0, 1.0);
    if (!(a > 0)) throw ValidationError("graph_z2: half-width must be positive");
    rec.chart = [](const Jet2& u, const Jet2& v) -> std::vector<Jet2> {
      return {u, v, u * u - v * v, 2.0 * u * v};
    };
    rec.domain = {-a, a, -a, a};
  } else if (name == "inverted_catenoid_end") {
    expect_params(name, p, 0, 1);
    const double a = std::exp(-param(p, 0, -0.5));
    // Cartesian chart around the puncture: rho = e^{-v}, angle = u, so
    // cosh(v) = (1 + rho^2) / (2 rho); then inversion p / |p|^2.
    rec.chart = [](const Jet2& x, const Jet2& y) -> std::vector<Jet2> {
      const Jet2 rho2 = x * x + y * y;
      const Jet2 k = (1.0 + rho2) / (2.0 * rho2);
      const Jet2 q0 = k * x;
      const Jet2 q1 = k * y;
      const Jet2 q2 = -0.5 * log(rho2);
      const Jet2 n2 = q0 * q0 + q1 * q1 + q2 * q2;
      return {q0 / n2, q1 / n2, q2 / n2};
    };
    rec.domain = {-a, a, -a, a};
  } else {
    throw ValidationError("unknown surface '" + name + "' (see `wcur surfaces`)");
  }
  return rec;
}

}  // namespace

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = {
      {"flat", "a", "1", "plane (u, v, 0) on [-a, a]^2"},
      {"sphere_stereo", "radius,shift", "1,0",
       "round sphere, stereographic chart on [-1, 1]^2 centred at u = shift; outward normal, H = -1/radius"},
      {"cylinder", "v0,v1[,u0,u1]", "0,1", "unit cylinder, u periodic on [0, 2pi) unless u0,u1 are given"},
      {"catenoid", "v0,v1", "-1,1", "catenoid (cosh v cos u, cosh v sin u, v), u periodic"},
      {"clifford_torus", "", "", "torus R = sqrt 2, r = 1, both axes periodic"},
      {"torus_Rr", "R,r", "", "torus of revolution, 0 < r < R, both axes periodic"},
      {"graph_z2", "a", "1", "graph of z^2 in R^4 on [-a, a]^2 (minimal)"},
      {"inverted_catenoid_end", "v_min", "-0.5",
       "catenoid end v >= v_min inverted in the unit sphere, Cartesian chart on [-a, a]^2 with a = exp(-v_min); "
       "needs an even grid so no node sits on the puncture"},
  };
  return entries;
}

ImmersionPatch build_catalog_patch(const std::string& name, const std::vector<double>& params, const GridSpec& gs) {
  Recipe rec = make_recipe(name, params);
  std::array<double, 4> box = gs.domain.value_or(rec.domain);
  if (gs.domain && (rec.periodic_u || rec.periodic_v)) {
    // Periodic axes keep their full period.
    if (rec.periodic_u) box[0] = rec.domain[0], box[1] = rec.domain[1];
    if (rec.periodic_v) box[2] = rec.domain[2], box[3] = rec.domain[3];
  }
  if (name == "inverted_catenoid_end") {
    if (gs.nu % 2 != 0 || gs.nv % 2 != 0) {
      throw ValidationError("inverted_catenoid_end needs an even grid size (odd sizes put a node on the puncture)");
    }
    if (box[0] * box[1] >= 0 || box[2] * box[3] >= 0) {
      throw ValidationError("inverted_catenoid_end domain must contain the puncture at the origin");
    }
  }
  if (rec.closure.kind == Closure::Kind::sphere_chart) {
    const bool centred_square = box[0] == -box[1] && box[2] == -box[3] && box[1] == box[3];
    if (!centred_square) rec.closure.kind = Closure::Kind::open;
  }

  const Grid grid(Axis{gs.nu, box[0], box[1], rec.periodic_u}, Axis{gs.nv, box[2], box[3], rec.periodic_v});
  const int m = static_cast<int>(rec.chart(Jet2(0.5), Jet2(0.5)).size());

  ImmersionPatch p;
  p.name = name;
  p.dim = m;
  p.grid = grid;
  p.phi = Field(grid, m);
  for (auto& f : p.d1) f = Field(grid, m);
  for (auto& f : p.d2) f = Field(grid, m);
  p.source = JetSource::analytic;
  p.closure = rec.closure;

  for (int i = 0; i < grid.u.n; ++i) {
    for (int j = 0; j < grid.v.n; ++j) {
      const std::vector<Jet2> x = rec.chart(Jet2::variable(grid.u.coord(i), 0), Jet2::variable(grid.v.coord(j), 1));
      for (int c = 0; c < m; ++c) {
        p.phi(i, j, c) = x[c].f;
        p.d1[0](i, j, c) = x[c].d[0];
        p.d1[1](i, j, c) = x[c].d[1];
        for (int s = 0; s < 3; ++s) p.d2[s](i, j, c) = x[c].dd[s];
      }
    }
  }
  check_nondegenerate(p);
  return p;
}

ImmersionPatch build_catalog_patch(const std::string& spec, const GridSpec& grid) {
  const size_t colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string::npos) params = parse_number_list(std::string_view(spec).substr(colon + 1));
  return build_catalog_patch(name, params, grid);
}

double stereographic_square_area(double L) {
  const double s = std::sqrt(1.0 + L * L);
  return 16.0 * (L / s) * std::atan(L / s);
}

}  // namespace wcur
