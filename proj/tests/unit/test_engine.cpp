#include <cmath>
#include <numbers>

#include <doctest.h>

#include "kmc/analytic.hpp"
#include "kmc/engine.hpp"
#include "kmc/errors.hpp"
#include "kmc/mesh_gen.hpp"
#include "kmc/stats.hpp"

using namespace kmc;
using std::numbers::pi;

namespace {

PlanarScene one_pore() { return make_planar_scene({PlanarPore{{0, 0}, 1.0, ""}}); }

std::uint64_t total(const SimulationResult& r) { return r.captured() + r.escapes + r.capped; }

EngineOptions opts(std::uint64_t M, std::uint64_t seed = 1) {
    EngineOptions o;
    o.particles = M;
    o.seed = seed;
    return o;
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("conservation of particles") {
    auto o = opts(5000);
    o.chunk_size = 333;
    const auto a = run_plane(one_pore(), Release::at({0.5, 0.5, 2}), o);
    CHECK(total(a) == 5000);
    const auto b = run_polyhedron(make_fibonacci_sphere(21, 0.1, 100), Release::at({0, 0, 2}), o);
    CHECK(total(b) == 5000);
    CHECK(b.capture_steps.size() == b.captured());
    o.max_steps = 3;
    const auto c = run_polyhedron(make_fibonacci_sphere(21, 0.1, 100), Release::at({0, 0, 2}), o);
    CHECK(c.capped > 0);
    CHECK(total(c) == 5000);
}

TEST_CASE("results do not depend on the worker count") {
    const auto mesh = make_fibonacci_sphere(21, 0.1, 100);
    for (int variant = 0; variant < 2; ++variant) {
        std::uint64_t digest = 0;
        for (int w : {1, 4, 16}) {
            auto o = opts(3000, 99);
            o.workers = w;
            o.chunk_size = 128;
            const auto r = variant == 0 ? run_plane(one_pore(), Release::sphere(4.0), o)
                                        : run_polyhedron(mesh, Release::at({0, 0, 2.5}), o);
            if (w == 1) digest = r.digest();
            CHECK(r.digest() == digest);
        }
    }
    CHECK(run_plane(one_pore(), Release::sphere(4.0), opts(2000, 1)).digest() !=
          run_plane(one_pore(), Release::sphere(4.0), opts(2000, 2)).digest());
}

TEST_CASE("capture times are positive and finite") {
    const auto r = run_polyhedron(make_cube(1.0), Release::sphere(3.0), opts(20000));
    for (const auto& v : r.capture_times)
        for (double t : v) {
            REQUIRE(t > 0.0);
            REQUIRE(std::isfinite(t));
        }
}

TEST_CASE("single pore capacitance") {
    const auto c = estimate_capacitance(one_pore(), 5.0, opts(1'000'000, 7));
    CHECK(c.cv == doctest::Approx(2.56e-3).epsilon(0.02));
    CHECK(std::abs(c.capacitance - 2 / pi) < 3 * c.cv * (2 / pi));
}

TEST_CASE("two distant pores follow the series capacitance") {
    const auto s = make_planar_scene({PlanarPore{{-5, 0}, 1.0, ""}, PlanarPore{{5, 0}, 1.0, ""}});
    const auto c = estimate_capacitance(s, 9.0, opts(1'000'000, 3));
    const double want = analytic::strieder_capacitance(10.0);
    CHECK(std::abs(c.capacitance - want) < 3 * c.cv * want);
}

TEST_CASE("cube capacitance") {
    const auto c = estimate_capacitance(make_cube(1.0), 5.0, opts(1'000'000, 5));
    CHECK(std::abs(c.capacitance - analytic::kCubeCapacitance) < 3 * c.cv * analytic::kCubeCapacitance);
}

TEST_CASE("cube arrivals follow the equivalent sphere at late times") {
    auto o = opts(1'000'000, 12);
    o.D = 10.0;
    const auto r = run_polyhedron(make_cube(1.0), Release::at({0, 0, 5}), o);
    std::vector<double> all;
    for (const auto& v : r.capture_times) all.insert(all.end(), v.begin(), v.end());
    const std::vector<double> grid = {1.0, 3.0, 10.0, 100.0, 1000.0};
    const auto F = stats::empirical_cdf(all, grid, r.particles);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(std::abs(F[i] / analytic::cube_equiv_cdf(grid[i], 5.0, o.D) - 1) < 0.02);
}

TEST_CASE("absorbing sphere mesh captures about 1/R0") {
    const auto m = make_absorbing_sphere(800);
    const auto r = run_polyhedron(m, Release::at({0, 0, 3}), opts(200000, 4));
    CHECK(double(r.captured()) / r.particles == doctest::Approx(1.0 / 3).epsilon(0.02));
}

TEST_CASE("scenes without absorbers lose every particle") {
    const auto r = run_plane(make_planar_scene({}), Release::at({0, 0, 1}), opts(2000));
    CHECK(r.escapes == 2000);
    auto cube = make_cube(1.0);
    std::vector<FaceSpec> f;
    for (const auto& face : cube.faces) f.push_back({face.verts, false, ""});
    const auto reflecting = make_mesh(cube.vertices, f);
    const auto q = run_polyhedron(reflecting, Release::at({0, 0, 2}), opts(2000));
    CHECK(q.escapes == 2000);
}

TEST_CASE("release validation") {
    CHECK_THROWS_AS(run_plane(one_pore(), Release::at({0, 0, -1}), opts(10)), ConfigError);
    CHECK_THROWS_AS(run_plane(one_pore(), Release::at({0.2, 0, 0}), opts(10)), ConfigError);
    CHECK_THROWS_AS(run_plane(one_pore(), Release::sphere(0.5), opts(10)), ConfigError);
    CHECK_THROWS_AS(run_polyhedron(make_cube(1), Release::at({0, 0, 0.2}), opts(10)), ConfigError);
    CHECK_THROWS_AS(run_polyhedron(make_cube(1), Release::sphere(0.7), opts(10)), ConfigError);
    CHECK_THROWS_AS(run_plane(one_pore(), Release::at({0, 0, 1}), opts(0)), ConfigError);
    // A release on the reflecting plane outside every pore is admissible.
    CHECK(total(run_plane(one_pore(), Release::at({3, 0, 0}), opts(100))) == 100);
}

}
