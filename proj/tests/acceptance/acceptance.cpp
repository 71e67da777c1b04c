// One line per criterion: "criterion N: PASS|FAIL  details". Exit status is
// nonzero when any selected criterion fails.
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wcur/catalog.hpp"
#include "wcur/currents.hpp"
#include "wcur/format.hpp"
#include "wcur/multivec.hpp"
#include "wcur/potentials.hpp"
#include "wcur/problems.hpp"
#include "wcur/residue.hpp"

using namespace wcur;
namespace o = wcur::oracle;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a sub-check; the criterion passes only if every sub-check does.
  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!ok) detail << " [fail: " << what << "]";
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

GeometryCache cache(const std::string& spec, int n, DiffOrder order = DiffOrder::fourth) {
  return compute_geometry(build_catalog_patch(spec, GridSpec(n)), order);
}

double spacing(const GeometryCache& c) { return c.grid().u.h(); }

// Errors already at roundoff carry no order information.
constexpr double kRoundoff = 1e-11;

struct Conv {
  double coarse = 0.0, fine = 0.0, order = 0.0;
  bool exact = false;
  std::string str() const { return exact ? "exact(" + num(fine) + ")" : num(fine) + "@p=" + num(order); }
};

Conv converge(double coarse, double fine, double h_coarse, double h_fine) {
  Conv c{coarse, fine, 0.0, coarse <= kRoundoff};
  if (!c.exact) c.order = o::observed_order(coarse, fine, h_coarse, h_fine);
  return c;
}

bool order_at_least(const Conv& c, double lo) { return c.exact || c.order >= lo; }
bool order_within(const Conv& c, double lo, double hi) { return c.exact || (c.order >= lo && c.order <= hi); }

// ---------------------------------------------------------------------------

void criterion_1(Outcome& out) {
  const std::vector<std::string> surfaces{"sphere_stereo", "catenoid", "clifford_torus", "graph_z2"};
  for (DiffOrder order : {DiffOrder::fourth, DiffOrder::second}) {
    const bool primary = order == DiffOrder::fourth;
    bool ok = true;
    out.detail << (primary ? " fourth-order:" : " | second-order:");
    for (const std::string& s : surfaces) {
      const GeometryCache a = cache(s, 65, order), b = cache(s, 129, order);
      const Conv cv = converge(residual_norm(willmore_operator(a)).sup, residual_norm(willmore_operator(b)).sup,
                               spacing(a), spacing(b));
      const bool s_ok = cv.fine <= 1e-3 && order_within(cv, 1.7, 2.3);
      ok = ok && s_ok;
      out.detail << ' ' << s << '=' << cv.str() << (s_ok ? "" : "!");
    }
    // The default scheme decides; the second-order run is reported alongside.
    if (primary) out.require(ok, "sup|W| <= 1e-3 with order in [1.7, 2.3] at 65->129");
  }
}

void criterion_2(Outcome& out) {
  const ImmersionPatch p = build_catalog_patch("cylinder", GridSpec(129));
  const GeometryCache c = compute_geometry(p);
  const Field W = willmore_operator(c);
  const Field ref = o::codim1_willmore(p);
  double worst = 0.0, worst_ref = 0.0;
  long nodes = 0;
  W.for_each_valid([&](int i, int j) {
    ++nodes;
    worst = std::max(worst, std::abs(W.vec(i, j).norm() - 0.25));
    if (ref.valid(i, j)) worst_ref = std::max(worst_ref, std::abs(ref(i, j, 0)) - 0.25);
  });
  out.detail << " nodes=" << nodes << " max||W|-1/4|=" << num(worst) << " oracle max||.|-1/4|=" << num(worst_ref);
  out.require(nodes > 0 && worst <= 1e-3, "|W| = 0.250 +- 1e-3");
  out.require(std::abs(worst_ref) <= 1e-3, "oracle magnitude");
}

void criterion_3(Outcome& out) {
  for (const std::string s : {"cylinder", "sphere_stereo"}) {
    const GeometryCache a = cache(s, 65), b = cache(s, 129);
    const CurrentSet ca = compute_currents(a), cb = compute_currents(b);
    const double ha = spacing(a), hb = spacing(b);
    const Conv t = converge(ca.trans.sup, cb.trans.sup, ha, hb), r = converge(ca.rot.sup, cb.rot.sup, ha, hb),
               d = converge(ca.dil.sup, cb.dil.sup, ha, hb);
    out.detail << ' ' << s << ": trans " << t.str() << " rot " << r.str() << " dil " << d.str() << ';';
    out.require(order_at_least(t, 1.7) && order_at_least(r, 1.7) && order_at_least(d, 1.7), s + " order >= 1.7");
  }
  const CurrentSet f = compute_currents(cache("flat", 65));
  const double flat = std::max({f.trans.sup, f.rot.sup, f.dil.sup});
  out.detail << " flat " << num(flat);
  out.require(flat <= 1e-14, "flat residuals <= 1e-14");
}

void criterion_4(Outcome& out) {
  const ImmersionPatch p = build_catalog_patch("cylinder", GridSpec(129));
  const VariationResult r = energy_variation_check(p, smooth_bump(p.grid, kPi, 0.5, 0.3), 1e-3);
  out.detail << " fd=" << num(r.fd_derivative) << " pairing=" << num(r.pairing) << " gap=" << num(r.relative_gap());
  out.require(r.relative_gap() <= 1e-3, "relative gap <= 1e-3");
}

void criterion_5(Outcome& out) {
  const Eigen::MatrixXd rot = plane_rotation(3, 0, 2, 0.7) * plane_rotation(3, 0, 1, -1.1);
  for (const std::string s : {"sphere_stereo", "torus_Rr:2,0.5", "cylinder"}) {
    const ImmersionPatch p = build_catalog_patch(s, GridSpec(65));
    double worst = 0.0;
    for (const Motion& m : {Motion::translate(Eigen::Vector3d(0.3, -1.2, 2.5)), Motion::rotate(rot), Motion::dilate(1.7)}) {
      worst = std::max(worst, invariance_check(p, m).relative_change());
    }
    out.detail << ' ' << s << '=' << num(worst);
    out.require(worst <= 1e-10, s + " relative change <= 1e-10");
  }
}

void criterion_6(Outcome& out) {
  struct Case {
    std::string surface;
    bool zero_overrides;
  };
  for (const Case& k : {Case{"sphere_stereo", true}, Case{"cylinder:0,1,-1,1", false}}) {
    SystemResiduals sys[2];
    GradientResiduals grad[2];
    double h[2];
    int idx = 0;
    for (int n : {65, 129}) {
      const GeometryCache c = cache(k.surface, n);
      const Field W = willmore_operator(c);
      const PotentialSet p =
          build_potential_set(c, W, k.zero_overrides ? PotentialOverrides::zero(c) : PotentialOverrides{});
      sys[idx] = system_residuals(c, p);
      grad[idx] = gradient_identity_residuals(c, p);
      h[idx++] = spacing(c);
    }
    // Measured in L2: the sup sits on the first valid ring next to the
    // Dirichlet edge and is reported for reference.
    const std::pair<const char*, std::pair<ResidualNorm, ResidualNorm>> rows[] = {
        {"S-eq", {sys[0].s, sys[1].s}},   {"R-eq", {sys[0].r, sys[1].r}},
        {"Phi-eq", {sys[0].phi, sys[1].phi}}, {"gradS", {grad[0].s, grad[1].s}},
        {"gradR", {grad[0].r, grad[1].r}}};
    out.detail << ' ' << k.surface << ':';
    for (const auto& [name, pr] : rows) {
      const Conv l2 = converge(pr.first.l2, pr.second.l2, h[0], h[1]);
      const Conv sup = converge(pr.first.sup, pr.second.sup, h[0], h[1]);
      out.detail << ' ' << name << " l2 " << l2.str() << " (sup " << sup.str() << ')';
      out.require(order_at_least(l2, 1.0), k.surface + ' ' + name + " order >= 1");
    }
    out.detail << ';';
  }
}

void criterion_7(Outcome& out) {
  const double e = willmore_energy(cache("clifford_torus", 128));
  const double rel = std::abs(e - 2 * kPi * kPi) / (2 * kPi * kPi);
  out.detail << " E=" << format_number(e, 12) << " rel=" << num(rel);
  out.require(rel <= 1e-4, "within 1e-4 of 2 pi^2");
}

void criterion_8(Outcome& out) {
  // Pointwise EL residual on the default chart; the integrals need the wide
  // truncated chart so that the closed-form tail stays small.
  const GeometryCache c = cache("sphere_stereo", 129);
  const GeometryCache wide = compute_geometry(build_catalog_patch("sphere_stereo", GridSpec(129, {-4, 4, -4, 4})));
  for (const HelfrichParams p : {HelfrichParams{1, 2, 0}, HelfrichParams{1, 1, 1}}) {
    const HelfrichReport h = helfrich_problem(c, p);
    const ClosedSurfaceIntegrals s = closed_surface_integrals(wide, p);
    const std::string tag = "(" + num(p.alpha) + "," + num(p.beta) + "," + num(p.gamma) + ")";
    out.detail << ' ' << tag << " el=" << num(h.el.sup) << " bal/scale=" << num(std::abs(s.balancing_residual) / s.scale);
    out.require(h.el.sup <= 1e-6, tag + " EL residual <= 1e-6");
    out.require(std::abs(s.balancing_residual) <= 1e-6 * s.scale, tag + " balancing");
    // Perturbed beta: residual 1.
    const HelfrichReport off = helfrich_problem(c, {p.alpha, p.beta + 1, p.gamma});
    out.detail << " beta+1 el=" << format_number(off.el.sup, 9) << ';';
    out.require(std::abs(off.el.sup - 1.0) <= 1e-6, tag + " perturbed residual 1 +- 1e-6");
  }
  // Off the critical line the residual is not small ("iff").
  const HelfrichReport away = helfrich_problem(c, {1, 0.5, 0});
  out.require(away.el.sup > 1e-6, "non-critical multipliers leave a residual");
  const ClosedSurfaceIntegrals s = closed_surface_integrals(wide, {});
  out.detail << " A-4pi=" << num(s.A - 4 * kPi) << " M+4pi=" << num(s.M + 4 * kPi) << " Vol-4pi=" << num(s.Vol - 4 * kPi)
             << " tail=" << num(s.tail_area);
  out.require(std::abs(s.A - 4 * kPi) <= 1e-6 && std::abs(s.M + 4 * kPi) <= 1e-6 && std::abs(s.Vol - 4 * kPi) <= 1e-6,
              "closed-form integrals");
}

void criterion_9(Outcome& out) {
  const ChenReport s = chen_problem(cache("sphere_stereo", 129));
  double worst = 0.0;
  s.lap_H.for_each_valid([&](int i, int j) { worst = std::max(worst, std::abs(s.lap_H.vec(i, j).norm() - 2.0)); });
  out.detail << " sphere max||LapH|-2|=" << num(worst) << "; identity:";
  out.require(worst <= 1e-3, "sphere |Lap H| = 2 +- 1e-3");

  struct Case {
    std::string surface;
    int coarse, fine;
    bool minimal;
    double excluded = 0.0;  // radius of the disk around the chart origin left out
  };
  // The inverted catenoid end is not smooth at its puncture; the identity is
  // measured on the smooth part of the chart.
  const Case cases[] = {{"flat", 65, 129, true},           {"sphere_stereo", 65, 129, false},
                        {"cylinder", 65, 129, false},      {"catenoid", 65, 129, true},
                        {"clifford_torus", 65, 129, false}, {"torus_Rr:2,0.5", 65, 129, false},
                        {"graph_z2", 65, 129, true},       {"inverted_catenoid_end", 64, 128, false, 0.3}};
  auto identity_sup = [](const ChenReport& r, double excluded) {
    const Grid& g = r.identity.grid();
    double s = 0.0;
    r.identity.for_each_valid([&](int i, int j) {
      if (std::hypot(g.u.coord(i), g.v.coord(j)) >= excluded) s = std::max(s, std::abs(r.identity(i, j, 0)));
    });
    return s;
  };
  for (const Case& k : cases) {
    const GeometryCache a = cache(k.surface, k.coarse), b = cache(k.surface, k.fine);
    const ChenReport ra = chen_problem(a), rb = chen_problem(b);
    const Conv cv = converge(identity_sup(ra, k.excluded), identity_sup(rb, k.excluded), spacing(a), spacing(b));
    out.detail << ' ' << k.surface << '=' << cv.str();
    out.require(order_at_least(cv, 1.8), k.surface + " identity O(h^2)");
    if (k.minimal) {
      out.detail << "(biharm " << num(rb.biharmonic.sup) << ')';
      out.require(rb.biharmonic.sup <= 1e-10, k.surface + " biharmonic defect <= 1e-10");
    }
  }
}

void criterion_10(Outcome& out) {
  const std::vector<double> radii{0.3, 0.5, 0.7};
  const ResidueReport smooth = compute_residue(cache("sphere_stereo:1,0.5", 129), radii);
  out.detail << " smooth |beta|=" << num(smooth.beta_res.norm());
  out.require(smooth.beta_res.norm() <= 1e-5, "smooth chart |beta_res| <= 1e-5");

  const ResidueReport end = compute_residue(cache("inverted_catenoid_end", 128), radii);
  out.detail << " catenoid end beta=(" << num(end.beta_res[0]) << ',' << num(end.beta_res[1]) << ','
             << num(end.beta_res[2]) << ") spread=" << num(end.spread);
  out.require(end.beta_res.norm() > 0.1, "|beta_res| > 0.1");
  out.require(end.spread <= 1e-2, "spread <= 1e-2");

  const GeometryCache flat = cache("flat", 129);
  const GreenFunction G = green_function(flat);
  const int samples = default_contour_samples(flat.grid());
  double enclosing = 0.0;
  for (double r : radii) enclosing = std::max(enclosing, std::abs(contour_flux(G.weighted_gradient, 0, 0, r, samples)[0] - 1.0));
  const double outside = std::abs(contour_flux(G.weighted_gradient, 0.5, 0.4, 0.3, samples)[0]);
  out.detail << " green |flux-1|=" << num(enclosing) << " non-enclosing=" << num(outside);
  out.require(enclosing <= 1e-3, "Green flux 1 +- 1e-3");
  out.require(outside <= 1e-3, "non-enclosing flux <= 1e-3");
}

void criterion_11(Outcome& out) {
  std::mt19937_64 rng(20240611);
  double adj = 0.0, star = 0.0, r3 = 0.0, foot = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const int m = 2 + static_cast<int>(rng() % 7);
    const int qg = static_cast<int>(rng() % (m + 1));
    const int pg = static_cast<int>(rng() % (qg + 1));
    const MultiVec g = o::random_multivec(rng, m, qg), b = o::random_multivec(rng, m, pg),
                   a = o::random_multivec(rng, m, qg - pg);
    adj = std::max(adj, std::abs(inner(interior(g, b), a) - inner(g, wedge(b, a))) / (1.0 + g.norm() * b.norm() * a.norm()));
  }
  for (int t = 0; t < 10000; ++t) {
    const int m = 2 + static_cast<int>(rng() % 7);
    const int k = static_cast<int>(rng() % (m + 1));
    const MultiVec a = o::random_multivec(rng, m, k);
    const double sign = (k * (m - k)) % 2 == 0 ? 1.0 : -1.0;
    star = std::max(star, (hodge_star(hodge_star(a)) - a * sign).max_abs());
    // a ^ *a = |a|^2 vol.
    star = std::max(star, std::abs(wedge(a, hodge_star(a)).coeff((1u << m) - 1) - inner(a, a)));
  }
  for (int t = 0; t < 10000; ++t) {
    const MultiVec u = o::random_multivec(rng, 3, 2), w = o::random_multivec(rng, 3, 2);
    const Vec v = o::random_vec(rng, 3);
    r3 = std::max(r3, (bullet(u, MultiVec::vector(v)).to_vector() - cross(hodge_star(u).to_vector(), v)).norm());
    const MultiVec ref = hodge_star(MultiVec::vector(cross(hodge_star(u).to_vector(), hodge_star(w).to_vector())));
    r3 = std::max(r3, (bullet(u, w) - ref).max_abs());
  }
  for (int t = 0; t < 1000; ++t) {
    const Vec w1 = o::random_vec(rng, 4), w2 = o::random_vec(rng, 4), w3 = o::random_vec(rng, 4), w4 = o::random_vec(rng, 4);
    const MultiVec lhs =
        bullet(wedge(MultiVec::vector(w1), MultiVec::vector(w2)), wedge(MultiVec::vector(w3), MultiVec::vector(w4)));
    foot = std::max(foot, (lhs - o::footnote_expansion(w1, w2, w3, w4)).max_abs());
  }
  out.detail << " adjointness=" << num(adj) << " star=" << num(star) << " R3=" << num(r3) << " expansion=" << num(foot);
  out.require(adj <= 1e-12 && star <= 1e-12 && r3 <= 1e-12 && foot <= 1e-12, "all within 1e-12");
}

void criterion_12(Outcome& out) {
  const FlowOptions opt;  // tau 1e-4, 50 steps
  const FlowResult cyl = willmore_flow(build_catalog_patch("cylinder:0,4", GridSpec(17)), opt);
  out.detail << " cylinder E " << num(cyl.trace.front().energy) << " -> " << num(cyl.trace.back().energy)
             << " strictly_decreasing=" << (cyl.strictly_decreasing ? "yes" : "no");
  out.require(cyl.trace.size() == 51 && cyl.strictly_decreasing, "cylinder strictly decreasing");
  for (const std::string s : {"flat", "sphere_stereo"}) {
    const FlowResult f = willmore_flow(build_catalog_patch(s, GridSpec(17)), opt);
    out.detail << ' ' << s << " drift=" << num(f.drift);
    out.require(f.drift <= 1e-6, s + " drift <= 1e-6");
  }
}

const std::vector<std::function<void(Outcome&)>> kCriteria{
    criterion_1, criterion_2, criterion_3, criterion_4,  criterion_5,  criterion_6,
    criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wcur acceptance criteria"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number(s); all when omitted")
      ->check(CLI::Range(1, static_cast<int>(kCriteria.size())));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (int k = 1; k <= static_cast<int>(kCriteria.size()); ++k) selected.push_back(k);
  }

  bool all = true;
  for (int k : selected) {
    Outcome out;
    try {
      kCriteria[k - 1](out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    all = all && out.pass;
    std::printf("criterion %d: %s %s\n", k, out.pass ? "PASS" : "FAIL", out.detail.str().c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
