#include <benchmark/benchmark.h>

#include <bit>
#include <random>

#include "wcur/catalog.hpp"
#include "wcur/currents.hpp"
#include "wcur/multivec.hpp"
#include "wcur/potentials.hpp"
#include "wcur/residue.hpp"

using namespace wcur;

namespace {

void BM_Geometry(benchmark::State& state) {
  const ImmersionPatch p = build_catalog_patch("torus_Rr:2,0.5", GridSpec(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(compute_geometry(p));
}
BENCHMARK(BM_Geometry)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

void BM_WillmoreOperator(benchmark::State& state) {
  const GeometryCache c = compute_geometry(build_catalog_patch("clifford_torus", GridSpec(static_cast<int>(state.range(0)))));
  for (auto _ : state) benchmark::DoNotOptimize(willmore_operator(c));
}
BENCHMARK(BM_WillmoreOperator)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Currents(benchmark::State& state) {
  const GeometryCache c = compute_geometry(build_catalog_patch("cylinder", GridSpec(static_cast<int>(state.range(0)))));
  for (auto _ : state) benchmark::DoNotOptimize(compute_currents(c));
}
BENCHMARK(BM_Currents)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

void BM_PoissonDirect(benchmark::State& state) {
  const GeometryCache c = compute_geometry(build_catalog_patch("sphere_stereo", GridSpec(static_cast<int>(state.range(0)))));
  Field rhs(c.grid(), 1);
  for (double& x : rhs.values()) x = 1.0;
  for (auto _ : state) {
    WeightedPoisson solver(c, 0);
    benchmark::DoNotOptimize(solver.solve(rhs));
  }
}
BENCHMARK(BM_PoissonDirect)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

void BM_PotentialChain(benchmark::State& state) {
  const GeometryCache c =
      compute_geometry(build_catalog_patch("cylinder:0,1,-1,1", GridSpec(static_cast<int>(state.range(0)))));
  const Field W = willmore_operator(c);
  for (auto _ : state) benchmark::DoNotOptimize(build_potential_set(c, W));
}
BENCHMARK(BM_PotentialChain)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

void BM_Residue(benchmark::State& state) {
  const GeometryCache c = compute_geometry(build_catalog_patch("inverted_catenoid_end", GridSpec(128)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_residue(c, {0.3, 0.5, 0.7}));
}
BENCHMARK(BM_Residue)->Unit(benchmark::kMillisecond);

void BM_Bullet(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  MultiVec a(m, 2), b(m, 2);
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    if (std::popcount(mask) == 2) {
      a += MultiVec::basis(m, mask) * d(rng);
      b += MultiVec::basis(m, mask) * d(rng);
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(bullet(a, b));
}
BENCHMARK(BM_Bullet)->Arg(3)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
