#include <benchmark/benchmark.h>

#include "kmc/engine.hpp"
#include "kmc/mesh_gen.hpp"
#include "kmc/propagators.hpp"
#include "kmc/specfun.hpp"

using namespace kmc;

static void BM_ErfcInv(benchmark::State& state) {
    RandomStream rng(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(specfun::erfc_inv(rng.uniform()));
}
BENCHMARK(BM_ErfcInv);

static void BM_PlaneImpact(benchmark::State& state) {
    RandomStream rng(2, 0);
    for (auto _ : state) benchmark::DoNotOptimize(plane_impact(3.0, 1.0, rng));
}
BENCHMARK(BM_PlaneImpact);

static void BM_HemisphereExit(benchmark::State& state) {
    RandomStream rng(3, 0);
    const auto& table = HemisphereCdfTable::instance();
    for (auto _ : state) benchmark::DoNotOptimize(hemisphere_exit(0.7, 1.0, table, rng));
}
BENCHMARK(BM_HemisphereExit);

static void BM_Reinsertion(benchmark::State& state) {
    RandomStream rng(4, 0);
    const auto table = shared_reinsertion_table(3.0);
    const bool interpolate = state.range(0) != 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(reinsert_or_escape({0, 0, 3.0}, 1.0, 1.0, *table, rng, false, interpolate));
}
BENCHMARK(BM_Reinsertion)->Arg(0)->Arg(1);

static void BM_MaxSignedDistance(benchmark::State& state) {
    const auto mesh = make_fibonacci_sphere(51, 0.1, static_cast<int>(state.range(0)));
    RandomStream rng(5, 0);
    int face = -1;
    for (auto _ : state) {
        const Vec3 p{rng.uniform() - 0.5, rng.uniform() - 0.5, rng.uniform() + 0.5};
        benchmark::DoNotOptimize(mesh.max_signed_distance(p, face));
    }
    state.counters["faces"] = static_cast<double>(mesh.faces.size());
}
BENCHMARK(BM_MaxSignedDistance)->Arg(100)->Arg(400)->Arg(1600);

static void BM_RunPlaneSinglePore(benchmark::State& state) {
    const auto scene = make_planar_scene({PlanarPore{{0, 0}, 1.0, ""}});
    EngineOptions o;
    o.particles = static_cast<std::uint64_t>(state.range(0));
    o.seed = 6;
    for (auto _ : state) benchmark::DoNotOptimize(run_plane(scene, Release::sphere(5.0), o));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunPlaneSinglePore)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_RunCube(benchmark::State& state) {
    const auto cube = make_cube(1.0);
    EngineOptions o;
    o.particles = static_cast<std::uint64_t>(state.range(0));
    o.seed = 7;
    for (auto _ : state) benchmark::DoNotOptimize(run_polyhedron(cube, Release::sphere(5.0), o));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunCube)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_RunFibonacciSphere(benchmark::State& state) {
    const auto mesh = make_fibonacci_sphere(21, 0.1, 200);
    EngineOptions o;
    o.particles = static_cast<std::uint64_t>(state.range(0));
    o.seed = 8;
    for (auto _ : state) benchmark::DoNotOptimize(run_polyhedron(mesh, Release::at({0, 0, 2.5}), o));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunFibonacciSphere)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
