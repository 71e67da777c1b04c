#include "wcur/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>

#include "wcur/catalog.hpp"
#include "wcur/currents.hpp"
#include "wcur/format.hpp"

namespace wcur {
namespace {

ProblemReport finish(const GeometryCache& c, Field W, PotentialSet p) {
  ProblemReport r;
  r.W = std::move(W);
  r.potentials = std::move(p);
  r.system = system_residuals(c, r.potentials);
  r.gradients = gradient_identity_residuals(c, r.potentials);
  return r;
}

// h^{ab} = g^{ap} g^{bq} h_pq.
Vec h_up(const GeometryCache& c, int a, int b, int i, int j) {
  Vec r = Vec::Zero(c.dim);
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) r += c.ginv(a, p, i, j) * c.ginv(b, q, i, j) * c.h(p, q, i, j);
  return r;
}

double q_at(const Field& q, int a, int b, int i, int j) { return q(i, j, 2 * a + b); }

}  // namespace

ProblemReport willmore_problem(const GeometryCache& c) {
  Field W = willmore_operator(c);
  PotentialSet p = build_potential_set(c, W, PotentialOverrides::zero(c));
  return finish(c, std::move(W), std::move(p));
}

QValidation validate_q(const GeometryCache& c, const Field& q) {
  const Grid& g = c.grid();
  if (q.components() != 4 || !(q.grid() == g)) throw ValidationError("q must hold q11 q12 q21 q22 on the patch grid");
  double scale = 1.0;
  for (double x : q.values()) {
    if (!std::isfinite(x)) throw ValidationError("q has non-finite values");
    scale = std::max(scale, std::abs(x));
  }
  QValidation v;
  for (int i = 0; i < g.u.n; ++i)
    for (int j = 0; j < g.v.n; ++j) {
      v.symmetry_defect = std::max(v.symmetry_defect, std::abs(q_at(q, 0, 1, i, j) - q_at(q, 1, 0, i, j)));
      double tr = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) tr += c.metric(i, j, sym_index(a, b)) * q_at(q, a, b, i, j);
      v.trace_defect = std::max(v.trace_defect, std::abs(tr));
    }
  if (v.symmetry_defect > kQTolerance * scale) {
    throw ValidationError("q not symmetric (defect " + format_number(v.symmetry_defect, 3) + ")");
  }
  if (v.trace_defect > kQTolerance * scale) {
    throw ValidationError("q not traceless (g_ij q^ij up to " + format_number(v.trace_defect, 3) + ")");
  }

  // grad_j q^ij = d_j q^ij + Gamma^i_jk q^kj + Gamma^j_jk q^ik
  const FieldPair dq = flat_gradient(c, q);
  dq[0].for_each_valid([&](int i, int j) {
    for (int a = 0; a < 2; ++a) {
      double s = 0.0;
      for (int b = 0; b < 2; ++b) {
        s += dq[b](i, j, 2 * a + b);
        for (int k = 0; k < 2; ++k) {
          s += c.gamma(a, b, k, i, j) * q_at(q, k, b, i, j) + c.gamma(b, b, k, i, j) * q_at(q, a, k, i, j);
        }
      }
      v.transversality_defect = std::max(v.transversality_defect, std::abs(s));
    }
  });
  v.transverse = v.transversality_defect <= kTransversalityTolerance;
  return v;
}

Field load_q_field(std::istream& in, const Grid& grid) {
  std::string line;
  long line_no = 0;
  int nx = -1, ny = -1;
  std::vector<std::pair<long, std::string>> data;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    if (tok[0] == "nx" || tok[0] == "ny") {
      const auto n = tok.size() == 2 ? parse_integer(tok[1]) : std::nullopt;
      if (!n || !data.empty()) throw ValidationError("malformed q header at line " + std::to_string(line_no));
      (tok[0] == "nx" ? nx : ny) = static_cast<int>(*n);
      continue;
    }
    data.emplace_back(line_no, line);
  }
  if (nx < 0 || ny < 0) throw ValidationError("malformed q header: nx and ny required");
  if (nx != grid.u.n || ny != grid.v.n) {
    throw ValidationError("q grid " + std::to_string(nx) + "x" + std::to_string(ny) + " does not match surface grid " +
                          std::to_string(grid.u.n) + "x" + std::to_string(grid.v.n));
  }
  if (data.size() != static_cast<size_t>(nx) * ny) {
    throw ValidationError("row count mismatch: header gives " + std::to_string(static_cast<long>(nx) * ny) +
                          " nodes, found " + std::to_string(data.size()) + " rows");
  }
  Field q(grid, 4);
  std::vector<char> seen(data.size(), 0);
  for (const auto& [no, text] : data) {
    const std::string where = "q line " + std::to_string(no) + ": ";
    const auto tok = split_ws(text);
    if (tok.size() != 6) throw ValidationError(where + "expected 6 fields");
    const auto i = parse_integer(tok[0]);
    const auto j = parse_integer(tok[1]);
    if (!i || !j || *i < 0 || *i >= nx || *j < 0 || *j >= ny) throw ValidationError(where + "bad node index");
    const size_t k = static_cast<size_t>(*i) * ny + *j;
    if (seen[k]) throw ValidationError(where + "duplicate node");
    seen[k] = 1;
    for (int s = 0; s < 4; ++s) {
      const auto x = parse_number(tok[2 + s]);
      if (!x || !std::isfinite(*x)) throw ValidationError(where + "bad q value");
      q(static_cast<int>(*i), static_cast<int>(*j), s) = *x;
    }
  }
  return q;
}

Field load_q_file(const std::string& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open q file '" + path + "'");
  return load_q_field(in, grid);
}

ConstrainedReport constrained_problem(const GeometryCache& c, const Field& q) {
  const int m = c.dim;
  const Grid& g = c.grid();
  ConstrainedReport r;
  r.q = validate_q(c, q);
  if (!r.q.transverse) {
    r.warnings.push_back("q not transverse: sup |grad_j q^ij| = " + format_number(r.q.transversality_defect, 3));
  }

  r.h0q = node_map(g, m, 0, [&](int i, int j, double* o) {
    const Vec H = c.H(i, j);
    Vec s = Vec::Zero(m);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) s += q_at(q, a, b, i, j) * (c.h(a, b, i, j) - c.metric(i, j, sym_index(a, b)) * H);
    for (int k = 0; k < m; ++k) o[k] = s[k];
  });
  const Field Wop = willmore_operator(c);
  Field W = node_map(g, m, Wop.margin(), [&](int i, int j, double* o) {
    for (int k = 0; k < m; ++k) o[k] = Wop(i, j, k) - r.h0q(i, j, k);
  });

  PotentialOverrides ov = PotentialOverrides::zero(c);
  for (int b = 0; b < 2; ++b) {
    (*ov.grad_V)[b] = node_map(g, m, 0, [&](int i, int j, double* o) {
      const Vec s = q_at(q, 0, b, i, j) * c.dphi(0, i, j) + q_at(q, 1, b, i, j) * c.dphi(1, i, j);
      for (int k = 0; k < m; ++k) o[k] = 0.0 - s[k];
    });
  }
  PotentialSet p = build_potential_set(c, Wop, ov);
  for (int i = 0; i < g.u.n; ++i)
    for (int j = 0; j < g.v.n; ++j) {
      double d = 0.0;
      MultiVec w(m, 2);
      for (int a = 0; a < 2; ++a) {
        const Vec gv = p.grad_V[a].vec(i, j);
        d += gv.dot(c.dphi(a, i, j));
        w += wedge(MultiVec::vector(gv), MultiVec::vector(c.dphi(a, i, j)));
      }
      r.identity_dot = std::max(r.identity_dot, std::abs(d));
      r.identity_wedge = std::max(r.identity_wedge, w.norm());
    }
  static_cast<ProblemReport&>(r) = finish(c, std::move(W), std::move(p));
  return r;
}

HelfrichReport helfrich_problem(const GeometryCache& c, const HelfrichParams& hp) {
  if (c.dim != 3) throw ValidationError("helfrich problem requires m = 3");
  const Grid& g = c.grid();
  const auto [alpha, beta, gamma] = hp;
  HelfrichReport r;

  r.rhs = node_map(g, 3, 0, [&](int i, int j, double* o) {
    const Vec nu = c.unit_normal(i, j);
    const Vec H = c.H(i, j);
    double hh = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) hh += h_up(c, a, b, i, j).dot(c.h(a, b, i, j));
    const Vec v = 2.0 * alpha * H + beta * nu - gamma * (0.5 * hh - 2.0 * H.squaredNorm()) * nu;
    for (int k = 0; k < 3; ++k) o[k] = v[k];
  });
  const Field Wop = willmore_operator(c);
  Field W = Wop - r.rhs;
  r.el = residual_norm(W);

  PotentialOverrides ov;
  FieldPair gradV, gradXv, gradX;
  for (int b = 0; b < 2; ++b) {
    gradV[b] = node_map(g, 3, 0, [&](int i, int j, double* o) {
      const Vec phi = c.phi(i, j);
      const double Hs = c.H(i, j).dot(c.unit_normal(i, j));
      const double inv = 1.0 / c.sqrt_det(i, j, 0);
      Vec v = -alpha * c.dphi_up(b, i, j);
      for (int a = 0; a < 2; ++a) {
        v += 0.5 * beta * inv * levi_civita(a, b) * cross(phi, c.dphi(a, i, j));
        const double hs = h_up(c, a, b, i, j).dot(c.unit_normal(i, j));
        v += 0.5 * gamma * (hs - 2.0 * Hs * c.ginv(a, b, i, j)) * c.dphi(a, i, j);
      }
      for (int k = 0; k < 3; ++k) o[k] = v[k];
    });
    gradXv[b] = node_map(g, 3, 0, [&](int i, int j, double* o) {
      const double s = 0.25 * beta / c.sqrt_det(i, j, 0) * c.phi(i, j).squaredNorm();
      Vec v = Vec::Zero(3);
      for (int a = 0; a < 2; ++a) v += s * levi_civita(a, b) * c.dphi(a, i, j);
      for (int k = 0; k < 3; ++k) o[k] = v[k];
    });
    gradX[b] = hodge_star(gradXv[b], 1, 3);  // x ^ y = *(x cross y)
  }
  ov.grad_V = gradV;
  ov.grad_X = gradX;
  ov.Y_source = node_map(g, 1, 0, [&](int i, int j, double* o) {
    const Vec nu = c.unit_normal(i, j);
    o[0] = -2.0 * alpha - gamma * c.H(i, j).dot(nu) + beta * c.phi(i, j).dot(nu);
  });

  for (int i = 0; i < g.u.n; ++i)
    for (int j = 0; j < g.v.n; ++j) {
      const Vec nu = c.unit_normal(i, j);
      const double p2 = c.phi(i, j).squaredNorm();
      Vec normal_part = -0.5 * beta * p2 * nu;
      for (int b = 0; b < 2; ++b) {
        const Vec x = gradXv[b].vec(i, j);
        r.xprop_cross = std::max(r.xprop_cross, (cross(nu, x) - 0.25 * beta * p2 * c.dphi_up(b, i, j)).norm());
        normal_part += cross(x, c.dphi(b, i, j));
      }
      r.xprop_normal = std::max(r.xprop_normal, normal_part.norm());
    }

  PotentialSet p = build_potential_set(c, Wop, ov);
  static_cast<ProblemReport&>(r) = finish(c, std::move(W), std::move(p));
  return r;
}

ChenReport chen_problem(const GeometryCache& c) {
  const int m = c.dim;
  const Grid& g = c.grid();
  ChenReport r;
  r.lap_H = laplace_beltrami(c, c.mean_curvature);
  r.biharmonic = residual_norm(r.lap_H);

  const Field PhiH = dot(c.patch->phi, c.mean_curvature);
  const Field lap_PhiH = laplace_beltrami(c, PhiH);
  const FieldPair dH = flat_gradient(c, c.mean_curvature);
  const int margin = std::max({lap_PhiH.margin(), r.lap_H.margin(), dH[0].margin(), dH[1].margin()});
  r.identity = node_map(g, 1, margin, [&](int i, int j, double* o) {
    const Vec H = c.H(i, j);
    double rhs = 2.0 * H.squaredNorm() + c.phi(i, j).dot(r.lap_H.vec(i, j));
    for (int a = 0; a < 2; ++a) rhs += 2.0 * c.dphi_up(a, i, j).dot(dH[a].vec(i, j));
    o[0] = lap_PhiH(i, j, 0) - rhs;
  });
  r.identity_norm = residual_norm(r.identity);

  r.chen_W = node_map(g, m, 0, [&](int i, int j, double* o) {
    const Vec H = c.H(i, j);
    Vec v = -2.0 * H.squaredNorm() * H;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) v += 2.0 * H.dot(h_up(c, a, b, i, j)) * c.h(a, b, i, j);
    for (int k = 0; k < m; ++k) o[k] = v[k];
  });
  const Field Wop = willmore_operator(c);
  Field W = Wop - r.chen_W;

  PotentialOverrides ov = PotentialOverrides::zero(c);
  for (int b = 0; b < 2; ++b) {
    (*ov.grad_V)[b] = node_map(g, m, 0, [&](int i, int j, double* o) {
      const Vec H = c.H(i, j);
      Vec v = H.squaredNorm() * c.dphi_up(b, i, j);
      for (int k = 0; k < 2; ++k) v -= 2.0 * H.dot(h_up(c, b, k, i, j)) * c.dphi(k, i, j);
      for (int q = 0; q < m; ++q) o[q] = v[q];
    });
  }
  ov.Y = PhiH;
  PotentialSet p = build_potential_set(c, Wop, ov);
  static_cast<ProblemReport&>(r) = finish(c, std::move(W), std::move(p));
  return r;
}

ClosedSurfaceIntegrals closed_surface_integrals(const GeometryCache& c, const HelfrichParams& hp) {
  const ImmersionPatch& patch = *c.patch;
  const bool sphere = patch.closure.kind == Closure::Kind::sphere_chart;
  if (!c.grid().closed() && !sphere) throw ValidationError("balancing requires closed surface");
  if (c.dim != 3) throw ValidationError("closed surface integrals require m = 3");
  const Grid& g = c.grid();
  Field one(g, 1), Hn(g, 1), Pn(g, 1);
  for (int i = 0; i < g.u.n; ++i)
    for (int j = 0; j < g.v.n; ++j) {
      const Vec nu = c.unit_normal(i, j);
      one(i, j, 0) = 1.0;
      Hn(i, j, 0) = c.H(i, j).dot(nu);
      Pn(i, j, 0) = c.phi(i, j).dot(nu);
    }
  ClosedSurfaceIntegrals s;
  s.A = surface_integral(c, one, Quadrature::gregory);
  s.M = surface_integral(c, Hn, Quadrature::gregory);
  s.Vol = surface_integral(c, Pn, Quadrature::gregory);
  if (sphere) {
    // Cap beyond the chart square: H . nu = -1/R and Phi . nu = R there.
    const double R = patch.closure.sphere_radius;
    s.tail_area = R * R * (4.0 * std::numbers::pi - stereographic_square_area(g.u.hi));
    s.A += s.tail_area;
    s.M -= s.tail_area / R;
    s.Vol += s.tail_area * R;
  }
  s.balancing_residual = 2.0 * hp.alpha * s.A + hp.gamma * s.M - hp.beta * s.Vol;
  s.scale = std::abs(hp.alpha) * s.A + std::abs(hp.gamma) * std::abs(s.M) + std::abs(hp.beta) * std::abs(s.Vol);
  return s;
}

namespace {

double smoothstep_taper(const Axis& ax, int k, int collar) {
  if (ax.periodic) return 1.0;
  const int d = std::min(k, ax.n - 1 - k);
  const double s = std::clamp(static_cast<double>(d - collar) / collar, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

double min_metric_det(const GeometryCache& c) {
  double lo = INFINITY;
  for (double x : c.det.values()) lo = std::min(lo, x);
  return lo;
}

// Largest eigenvalue of the tapered step operator chi W, linearized as
// 1/2 Lap^2 on graphs with the fourth-order stencil symbol 16/(3h^2) per
// axis, frozen at each node. Conservative: it ignores how narrow the moving
// region is on small grids.
double explicit_stability_bound(const GeometryCache& c, int collar) {
  const Grid& g = c.grid();
  double worst = 0.0;
  for (int i = 0; i < g.u.n; ++i)
    for (int j = 0; j < g.v.n; ++j) {
      const double chi = smoothstep_taper(g.u, i, collar) * smoothstep_taper(g.v, j, collar);
      const double s = 16.0 / 3.0 *
                       (c.ginv(0, 0, i, j) / (g.u.h() * g.u.h()) + c.ginv(1, 1, i, j) / (g.v.h() * g.v.h()));
      worst = std::max(worst, 0.5 * chi * s * s);
    }
  return worst > 0.0 ? 2.0 / worst : INFINITY;
}

}  // namespace

FlowResult willmore_flow(const ImmersionPatch& patch, const FlowOptions& opt) {
  if (!(opt.tau > 0.0) || !std::isfinite(opt.tau)) throw ValidationError("flow step tau must be positive");
  if (opt.steps < 0) throw ValidationError("flow step count must be non-negative");
  if (opt.collar < 0) throw ValidationError("flow collar must be non-negative");
  const Grid& g = patch.grid;
  const int m = patch.dim;
  for (int a = 0; a < 2; ++a) {
    if (!g.axis(a).periodic && g.axis(a).n < 2 * opt.collar + 3) {
      throw ValidationError("grid too small for the flow collar");
    }
  }
  const int collar = opt.collar;

  FlowResult r;
  Field phi = patch.phi;
  phi.set_margin(0);
  for (int k = 0;; ++k) {
    ImmersionPatch cur;
    try {
      cur = patch_from_positions(g, phi, patch.name);
    } catch (const DegenerateImmersion& e) {
      throw SolverFailure("flow aborted at step " + std::to_string(k) + ": " + e.what(), 0.0);
    }
    const GeometryCache c = compute_geometry(cur, opt.order);
    const Field W = willmore_operator(c);
    FlowSample s;
    s.step = k;
    s.energy = willmore_energy(c);
    s.sup_W = residual_norm(W).sup;
    s.det_g_min = min_metric_det(c);
    if (!std::isfinite(s.energy) || !std::isfinite(s.sup_W)) {
      throw SolverFailure("flow aborted at step " + std::to_string(k) + ": non-finite energy", 0.0);
    }
    if (k == 0) r.stable_tau = explicit_stability_bound(c, collar);
    r.trace.push_back(s);
    if (k == opt.steps) {
      r.final_patch = std::move(cur);
      break;
    }
    W.for_each_valid([&](int i, int j) {
      const double chi = smoothstep_taper(g.u, i, collar) * smoothstep_taper(g.v, j, collar);
      if (chi == 0.0) return;
      for (int q = 0; q < m; ++q) phi(i, j, q) -= opt.tau * chi * W(i, j, q);
    });
  }
  for (size_t k = 1; k < r.trace.size(); ++k) {
    r.strictly_decreasing = r.strictly_decreasing && r.trace[k].energy < r.trace[k - 1].energy;
  }
  r.drift = std::abs(r.trace.back().energy - r.trace.front().energy);
  return r;
}

}  // namespace wcur
