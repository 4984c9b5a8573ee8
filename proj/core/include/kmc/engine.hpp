#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kmc/geometry.hpp"
#include "kmc/propagators.hpp"
#include "kmc/vec.hpp"

namespace kmc {

enum class Status { Alive, Captured, Escaped, Capped };

struct Particle {
    Vec3 position;
    double clock = 0.0;
    Status status = Status::Alive;
    int target = -1;
    std::uint64_t steps = 0;
};

struct Release {
    enum class Kind { Point, Sphere } kind = Kind::Point;
    Vec3 point;
    // Sphere releases are centred on the scene's enclosing disc (planar,
    // upper hemisphere only) or the mesh bounding sphere.
    double radius = 0.0;

    static Release at(const Vec3& p) { return {Kind::Point, p, 0.0}; }
    static Release sphere(double r) { return {Kind::Sphere, {}, r}; }
};

struct EngineOptions {
    double D = 1.0;
    std::uint64_t particles = 1000;
    std::uint64_t seed = 1;
    int workers = 1;
    int table_mu = 400;
    int table_nu = 400;
    // Exact reinsertion time with interpolated angle instead of nearest entry.
    bool interpolate_reinsertion = false;
    std::uint64_t max_steps = 1'000'000;
    std::uint64_t chunk_size = 4096;
    // Overrides the shared table for the scene's ratio when set.
    std::shared_ptr<const ReinsertionTable> table;
    std::string config_digest;
};

struct SimulationResult {
    std::vector<std::string> labels;
    // Capture times per target, in particle order.
    std::vector<std::vector<double>> capture_times;
    std::uint64_t escapes = 0;
    std::uint64_t capped = 0;
    std::uint64_t particles = 0;
    // Projection steps over all particles, and over captured particles only.
    std::uint64_t iterations = 0;
    std::uint64_t capture_iterations = 0;
    // Steps taken by each captured particle, in particle order.
    std::vector<std::uint64_t> capture_steps;
    std::uint64_t seed = 0;
    std::string config_digest;

    std::uint64_t captured() const;
    std::uint64_t captured(int target) const { return capture_times[target].size(); }
    // FNV-1a over labels, counts and the bit patterns of every capture time.
    std::uint64_t digest() const;
};

SimulationResult run_plane(const PlanarScene& scene, const Release& release, const EngineOptions& opts);
SimulationResult run_polyhedron(const ConvexMesh& mesh, const Release& release, const EngineOptions& opts);

// Single trajectories, for inspection and tests.
Particle simulate_plane_particle(const PlanarScene& scene, const Release& release, const EngineOptions& opts,
                                 const ReinsertionTable& table, std::uint64_t index);
Particle simulate_polyhedron_particle(const ConvexMesh& mesh, const Release& release,
                                      const EngineOptions& opts, const ReinsertionTable& table,
                                      std::uint64_t index);

struct CapacitanceEstimate {
    double capacitance;
    double cv;
    double p;
    std::uint64_t captures;
    std::uint64_t particles;
};

CapacitanceEstimate capacitance_from(const SimulationResult& r, double release_radius);
CapacitanceEstimate estimate_capacitance(const PlanarScene& scene, double release_radius, const EngineOptions& opts);
CapacitanceEstimate estimate_capacitance(const ConvexMesh& mesh, double release_radius, const EngineOptions& opts);

}  // namespace kmc
