#include "kmc/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <numbers>
#include <thread>

#include "kmc/errors.hpp"
#include "kmc/stats.hpp"

namespace kmc {

std::uint64_t SimulationResult::captured() const {
    std::uint64_t s = 0;
    for (const auto& v : capture_times) s += v.size();
    return s;
}

std::uint64_t SimulationResult::digest() const {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    for (const auto& l : labels) mix(l.data(), l.size() + 1);
    for (const auto& v : capture_times) {
        const std::uint64_t n = v.size();
        mix(&n, sizeof n);
        mix(v.data(), v.size() * sizeof(double));
    }
    mix(&escapes, sizeof escapes);
    mix(&capped, sizeof capped);
    mix(&particles, sizeof particles);
    mix(&iterations, sizeof iterations);
    return h;
}

namespace {

Vec3 uniform_direction(RandomStream& rng) {
    const double z = 2.0 * rng.uniform() - 1.0;
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

struct Record {
    int target;
    double time;
};

struct ChunkResult {
    std::vector<Record> captures;
    std::vector<std::uint64_t> capture_steps;
    std::uint64_t escapes = 0, capped = 0, iterations = 0, capture_iterations = 0;
};

template <class Sim>
SimulationResult run_chunks(const std::vector<std::string>& labels, const EngineOptions& opts, Sim&& simulate) {
    if (opts.particles == 0) throw ConfigError("particle count must be at least 1");
    if (!(opts.D > 0.0)) throw ConfigError("D must be positive");
    if (opts.chunk_size == 0) throw ConfigError("chunk size must be positive");

    const std::uint64_t M = opts.particles;
    const std::uint64_t n_chunks = (M + opts.chunk_size - 1) / opts.chunk_size;
    std::vector<ChunkResult> chunks(n_chunks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto work = [&]() {
        try {
            for (;;) {
                const std::uint64_t c = next.fetch_add(1);
                if (c >= n_chunks || failed.load()) return;
                ChunkResult& out = chunks[c];
                const std::uint64_t lo = c * opts.chunk_size;
                const std::uint64_t hi = std::min(M, lo + opts.chunk_size);
                for (std::uint64_t i = lo; i < hi; ++i) {
                    const Particle p = simulate(i);
                    out.iterations += p.steps;
                    switch (p.status) {
                    case Status::Captured:
                        out.captures.push_back({p.target, p.clock});
                        out.capture_iterations += p.steps;
                        out.capture_steps.push_back(p.steps);
                        break;
                    case Status::Escaped: ++out.escapes; break;
                    case Status::Capped: ++out.capped; break;
                    case Status::Alive: throw NumericalError("particle left alive");
                    }
                }
            }
        } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
        }
    };

    const int workers = std::max(1, opts.workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    SimulationResult r;
    r.labels = labels;
    r.capture_times.resize(labels.size());
    r.particles = M;
    r.seed = opts.seed;
    r.config_digest = opts.config_digest;
    for (const auto& c : chunks) {
        for (const auto& rec : c.captures) r.capture_times[rec.target].push_back(rec.time);
        r.escapes += c.escapes;
        r.capped += c.capped;
        r.iterations += c.iterations;
        r.capture_iterations += c.capture_iterations;
        r.capture_steps.insert(r.capture_steps.end(), c.capture_steps.begin(), c.capture_steps.end());
    }
    return r;
}

std::shared_ptr<const ReinsertionTable> table_for(double ratio, const EngineOptions& opts) {
    if (opts.table) {
        if (opts.table->ratio() != ratio) throw ConfigError("reinsertion table ratio does not match the scene");
        return opts.table;
    }
    return shared_reinsertion_table(ratio, opts.table_mu, opts.table_nu);
}

}  // namespace

// ------------------------------------------------------------- plane

Particle simulate_plane_particle(const PlanarScene& scene, const Release& release, const EngineOptions& opts,
                                 const ReinsertionTable& table, std::uint64_t index) {
    RandomStream rng(opts.seed, index);
    const auto& hemi = HemisphereCdfTable::instance();
    const double D = opts.D;
    const Vec3 center{scene.disc_center.x, scene.disc_center.y, 0.0};
    const double inner = scene.inner_radius();

    Particle p;
    if (release.kind == Release::Kind::Sphere) {
        Vec3 d = uniform_direction(rng);
        d.z = std::abs(d.z);
        p.position = center + d * release.radius;
    } else {
        p.position = release.point;
    }

    auto to_plane = [&]() {
        if (p.position.z > 0.0) {
            const PlaneImpact hit = plane_impact(p.position.z, D, rng);
            p.position = {p.position.x + hit.dx, p.position.y + hit.dy, 0.0};
            p.clock += hit.t;
            ++p.steps;
        }
        p.position.z = 0.0;
    };

    to_plane();
    for (;;) {
        if (p.steps >= opts.max_steps) {
            p.status = Status::Capped;
            return p;
        }
        const Vec2 xy{p.position.x, p.position.y};
        const PoreDistance nd = nearest_pore_distance(xy, scene);
        if (nd.pore >= 0) {
            p.status = Status::Captured;
            p.target = nd.pore;
            return p;
        }
        Vec3 rel = p.position - center;
        double rho = norm(rel);
        if (rho < inner) {
            const HemisphereExit ex = hemisphere_exit(nd.distance, D, hemi, rng);
            p.position += ex.offset;
            p.clock += ex.t;
            ++p.steps;
        } else {
            if (rho == 0.0) {
                rel = {kDistanceFloor, 0.0, 0.0};
                rho = kDistanceFloor;
            }
            const double r_land = rho / scene.reinsertion_ratio;
            const Reinsertion re = reinsert_or_escape(rel, r_land, D, table, rng, true, opts.interpolate_reinsertion);
            ++p.steps;
            if (re.escaped) {
                p.status = Status::Escaped;
                p.clock = INFINITY;
                return p;
            }
            p.position = center + re.landing;
            p.clock += re.t;
        }
        to_plane();
    }
}

SimulationResult run_plane(const PlanarScene& scene, const Release& release, const EngineOptions& opts) {
    if (release.kind == Release::Kind::Point) {
        const Vec3& x0 = release.point;
        if (!std::isfinite(x0.x) || !std::isfinite(x0.y) || !std::isfinite(x0.z))
            throw ConfigError("release point not finite");
        if (x0.z < 0.0) throw ConfigError("release point lies below the plane");
        if (x0.z == 0.0 && nearest_pore_distance({x0.x, x0.y}, scene).pore >= 0)
            throw ConfigError("release point lies inside a pore");
    } else if (!(release.radius >= scene.disc_radius) || release.radius <= 0.0) {
        throw ConfigError("release hemisphere must enclose every pore");
    }
    const auto table = table_for(scene.reinsertion_ratio, opts);
    std::vector<std::string> labels;
    for (const auto& p : scene.pores) labels.push_back(p.label);
    return run_chunks(labels, opts, [&](std::uint64_t i) {
        return simulate_plane_particle(scene, release, opts, *table, i);
    });
}

// ---------------------------------------------------------- polyhedron

Particle simulate_polyhedron_particle(const ConvexMesh& mesh, const Release& release,
                                      const EngineOptions& opts, const ReinsertionTable& table,
                                      std::uint64_t index) {
    RandomStream rng(opts.seed, index);
    const auto& hemi = HemisphereCdfTable::instance();
    const double D = opts.D;
    const Vec3& center = mesh.bounding_center;
    const double ball = mesh.reinsertion_ratio * mesh.bounding_radius;
    const double surf_tol = 1e-12 * std::max(1.0, mesh.diameter());

    Particle p;
    p.position = release.kind == Release::Kind::Sphere ? center + uniform_direction(rng) * release.radius
                                                       : release.point;

    for (;;) {
        if (p.steps >= opts.max_steps) {
            p.status = Status::Capped;
            return p;
        }
        // Stage I
        const Vec3 rel = p.position - center;
        const double rho = norm(rel);
        if (rho > ball) {
            const Reinsertion re = reinsert_or_escape(rel, rho / mesh.reinsertion_ratio, D, table, rng, false,
                                                      opts.interpolate_reinsertion);
            ++p.steps;
            if (re.escaped) {
                p.status = Status::Escaped;
                p.clock = INFINITY;
                return p;
            }
            p.position = center + re.landing;
            p.clock += re.t;
        }

        // Stage II
        int f;
        double z0 = mesh.max_signed_distance(p.position, f);
        if (!(z0 > 0.0)) z0 = kDistanceFloor;

        // Stages III and IV on face f
        for (;;) {
            if (p.steps >= opts.max_steps) break;
            const Face& face = mesh.faces[f];
            const PlaneImpact hit = plane_impact(z0, D, rng);
            ++p.steps;
            p.clock += hit.t;
            const Vec3 q = p.position - face.normal * mesh.signed_distance(f, p.position) + face.u * hit.dx +
                           face.v * hit.dy;

            int g = f;
            if (!point_in_face(q, face)) {
                // The impact plane may continue into a coplanar neighbour.
                int h;
                const double d = mesh.max_signed_distance(q, h);
                g = -1;
                if (d <= surf_tol) {
                    for (std::size_t k = 0; k < mesh.faces.size(); ++k)
                        if (std::abs(mesh.signed_distance(static_cast<int>(k), q)) <= surf_tol &&
                            point_in_face(q, mesh.faces[k])) {
                            g = static_cast<int>(k);
                            break;
                        }
                }
                if (g < 0) {
                    p.position = q;
                    break;  // back to Stage I
                }
            }
            const Face& hitf = mesh.faces[g];
            if (hitf.absorbing) {
                p.status = Status::Captured;
                p.target = hitf.target;
                return p;
            }
            const double r = inscribed_hemisphere_radius(q, hitf);
            const HemisphereExit ex = hemisphere_exit(r, D, hemi, rng);
            ++p.steps;
            p.clock += ex.t;
            p.position = q + hitf.u * ex.offset.x + hitf.v * ex.offset.y + hitf.normal * ex.offset.z;
            f = g;
            z0 = ex.offset.z;
        }
    }
}

SimulationResult run_polyhedron(const ConvexMesh& mesh, const Release& release, const EngineOptions& opts) {
    if (release.kind == Release::Kind::Point) {
        int f;
        if (!(mesh.max_signed_distance(release.point, f) > 0.0))
            throw ConfigError("release point must lie strictly outside the mesh");
    } else if (!(release.radius > mesh.bounding_radius)) {
        throw ConfigError("release sphere must enclose the mesh");
    }
    const auto table = table_for(mesh.reinsertion_ratio, opts);
    return run_chunks(mesh.targets, opts, [&](std::uint64_t i) {
        return simulate_polyhedron_particle(mesh, release, opts, *table, i);
    });
}

// ---------------------------------------------------------- capacitance

CapacitanceEstimate capacitance_from(const SimulationResult& r, double release_radius) {
    CapacitanceEstimate c;
    c.captures = r.captured();
    c.particles = r.particles;
    c.p = static_cast<double>(c.captures) / static_cast<double>(c.particles);
    c.capacitance = release_radius * c.p;
    c.cv = c.p > 0.0 ? stats::coefficient_of_variation(c.p, c.particles) : INFINITY;
    return c;
}

CapacitanceEstimate estimate_capacitance(const PlanarScene& scene, double release_radius, const EngineOptions& opts) {
    return capacitance_from(run_plane(scene, Release::sphere(release_radius), opts), release_radius);
}

CapacitanceEstimate estimate_capacitance(const ConvexMesh& mesh, double release_radius, const EngineOptions& opts) {
    return capacitance_from(run_polyhedron(mesh, Release::sphere(release_radius), opts), release_radius);
}

}  // namespace kmc
