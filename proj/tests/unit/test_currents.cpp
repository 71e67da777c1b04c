#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wcur/catalog.hpp"
#include "wcur/currents.hpp"

using namespace wcur;
namespace o = wcur::oracle;

namespace {

GeometryCache cache(const std::string& spec, int n) { return compute_geometry(build_catalog_patch(spec, GridSpec(n))); }

}  // namespace

TEST_SUITE("currents") {
  TEST_CASE("Willmore operator on flat and sphere") {
    CHECK(residual_norm(willmore_operator(cache("flat", 33))).sup == 0.0);
    double e[2];
    int k = 0;
    for (int n : {65, 129}) e[k++] = residual_norm(willmore_operator(cache("sphere_stereo", n))).sup;
    CHECK(e[1] <= 1e-3);
    CHECK(e[1] < e[0]);
  }

  TEST_CASE("cylinder: |W| = 1/4 along the normal") {
    const GeometryCache c = cache("cylinder", 65);
    const Field W = willmore_operator(c);
    W.for_each_valid([&](int i, int j) {
      CHECK(std::abs(W.vec(i, j).norm() - 0.25) <= 1e-5);
      CHECK(std::abs(std::abs(W.vec(i, j).dot(c.unit_normal(i, j))) - 0.25) <= 1e-5);
    });
    CHECK(normality_defect(c, W) <= 1e-6);
  }

  TEST_CASE("W . nu matches the codimension-one oracle") {
    for (const char* name : {"cylinder", "torus_Rr:2,0.5", "sphere_stereo:1.5"}) {
      CAPTURE(std::string(name));
      double e[2];
      int k = 0;
      for (int n : {64, 128}) {
        const ImmersionPatch p = build_catalog_patch(name, GridSpec(n));
        const GeometryCache c = compute_geometry(p);
        const Field W = willmore_operator(c);
        const Field ref = o::codim1_willmore(p);
        Field view = W;
        view.set_margin(std::max(W.margin(), ref.margin()));
        double worst = 0.0;
        view.for_each_valid([&](int i, int j) {
          worst = std::max(worst, std::abs(W.vec(i, j).dot(c.unit_normal(i, j)) - ref(i, j, 0)));
        });
        e[k++] = worst;
      }
      CHECK((e[1] <= 1e-9 || o::observed_order(e[0], e[1], 2.0, 1.0) >= 1.8));
    }
  }

  TEST_CASE("stress tensor") {
    const GeometryCache cf = cache("flat", 33);
    const FieldPair Tf = stress_tensor(cf);
    CHECK(residual_norm(Tf[0]).sup == 0.0);
    CHECK(residual_norm(Tf[1]).sup == 0.0);

    const GeometryCache cs = cache("sphere_stereo", 129);
    const FieldPair Ts = stress_tensor(cs);
    CHECK(std::max(residual_norm(Ts[0]).sup, residual_norm(Ts[1]).sup) <= 1e-5);

    // Cylinder: T^u = -1/4 grad^u Phi, T^v = +1/4 grad^v Phi.
    const GeometryCache cy = cache("cylinder", 65);
    const FieldPair Ty = stress_tensor(cy);
    Ty[0].for_each_valid([&](int i, int j) {
      CHECK((Ty[0].vec(i, j) + 0.25 * cy.dphi_up(0, i, j)).norm() <= 1e-5);
      CHECK((Ty[1].vec(i, j) - 0.25 * cy.dphi_up(1, i, j)).norm() <= 1e-5);
    });
  }

  TEST_CASE("conservation residuals") {
    const CurrentSet flat = compute_currents(cache("flat", 33));
    CHECK(flat.trans.sup <= 1e-14);
    CHECK(flat.rot.sup <= 1e-14);
    CHECK(flat.dil.sup <= 1e-14);

    const CurrentSet sphere = compute_currents(cache("sphere_stereo", 129));
    CHECK(sphere.trans.sup <= 1e-3);
    CHECK(sphere.rot.sup <= 1e-3);
    CHECK(sphere.dil.sup <= 1e-3);

    // Second-order stencils land in [1.7, 2.3]; the default fourth-order
    // chain converges faster.
    for (DiffOrder order : {DiffOrder::second, DiffOrder::fourth}) {
      double e[2];
      int k = 0;
      for (int n : {65, 129}) {
        const CurrentSet cur = compute_currents(compute_geometry(build_catalog_patch("cylinder", GridSpec(n)), order));
        e[k++] = cur.trans.sup;
      }
      const double observed = o::observed_order(e[0], e[1], 2.0, 1.0);
      CHECK(observed >= 1.7);
      if (order == DiffOrder::second) CHECK(observed <= 2.3);
    }
  }

  TEST_CASE("rotation residual is the translation residual wedged with Phi") {
    double e[2];
    int k = 0;
    for (int n : {32, 64}) {
      const GeometryCache c = cache("torus_Rr:2,0.5", n);
      const CurrentSet cur = compute_currents(c);
      double worst = 0.0;
      cur.res_rot.for_each_valid([&](int i, int j) {
        const MultiVec ref = wedge(MultiVec::vector(cur.res_trans.vec(i, j)), MultiVec::vector(c.phi(i, j)));
        worst = std::max(worst, (cur.res_rot.multivec(i, j, 3, 2) - ref).max_abs());
      });
      e[k++] = worst;
    }
    CHECK(o::observed_order(e[0], e[1], 2.0, 1.0) >= 1.8);
  }

  TEST_CASE("energy variation") {
    const ImmersionPatch flat = build_catalog_patch("flat", GridSpec(33));
    const VariationResult rf = energy_variation_check(flat, smooth_bump(flat.grid, 0.0, 0.0, 0.4));
    CHECK(std::abs(rf.pairing) <= 1e-14);
    CHECK(std::abs(rf.fd_derivative) <= 1e-10);

    const ImmersionPatch cyl = build_catalog_patch("cylinder", GridSpec(65));
    const VariationResult rc = energy_variation_check(cyl, smooth_bump(cyl.grid, std::numbers::pi, 0.5, 0.3));
    CHECK(rc.relative_gap() <= 1e-3);
    CHECK(rc.pairing < 0.0);

    const ImmersionPatch sph = build_catalog_patch("sphere_stereo", GridSpec(65));
    const VariationResult rs = energy_variation_check(sph, smooth_bump(sph.grid, 0.1, -0.1, 0.4));
    CHECK(std::abs(rs.pairing) <= 1e-5);
    CHECK(std::abs(rs.fd_derivative) <= 1e-4);

    CHECK_THROWS_WITH_AS(energy_variation_check(flat, smooth_bump(flat.grid, 0.9, 0.0, 0.4)),
                         doctest::Contains("collar"), ValidationError);
  }

  TEST_CASE("energy invariance under rigid motions and dilation") {
    const ImmersionPatch cyl = build_catalog_patch("cylinder", GridSpec(65));
    Vec a(3);
    a << 5, -3, 2;
    CHECK(invariance_check(cyl, Motion::translate(a)).relative_change() <= 1e-12);
    CHECK(invariance_check(cyl, Motion::dilate(2.5)).relative_change() <= 1e-10);
    const ImmersionPatch sph = build_catalog_patch("sphere_stereo", GridSpec(65));
    CHECK(invariance_check(sph, Motion::rotate(plane_rotation(3, 1, 2, std::numbers::pi / 2))).relative_change() <=
          1e-12);
    CHECK_THROWS_AS(invariance_check(cyl, Motion::dilate(-1.0)), ValidationError);
  }
}
