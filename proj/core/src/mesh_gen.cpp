#include "kmc/mesh_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kmc/errors.hpp"

namespace kmc {

ConvexMesh make_cube(double side) {
    if (!(side > 0.0)) throw ConfigError("cube side must be positive");
    const double h = 0.5 * side;
    std::vector<Vec3> v;
    for (int i = 0; i < 8; ++i) v.push_back({(i & 1) ? h : -h, (i & 2) ? h : -h, (i & 4) ? h : -h});
    std::vector<FaceSpec> f = {
        {{0, 4, 6, 2}, true, "-x"}, {{1, 3, 7, 5}, true, "+x"},
        {{0, 1, 5, 4}, true, "-y"}, {{2, 6, 7, 3}, true, "+y"},
        {{0, 2, 3, 1}, true, "-z"}, {{4, 5, 7, 6}, true, "+z"},
    };
    return make_mesh(std::move(v), f);
}

std::vector<Vec3> fibonacci_sphere_points(int n) {
    if (n < 1) throw ConfigError("fibonacci_sphere_points: n must be positive");
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<Vec3> p(n);
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        p[i] = {r * std::cos(phi), r * std::sin(phi), z};
    }
    return p;
}

double fibonacci_pore_radius(int n_pores, double sigma) {
    if (n_pores < 1) throw ConfigError("n_pores must be positive");
    if (!(sigma > 0.0 && sigma < 1.0)) throw ConfigError("sigma must lie in (0, 1)");
    return 2.0 * std::sqrt(sigma / n_pores);
}

namespace {

double angle_between(const Vec3& a, const Vec3& b) {
    return std::atan2(norm(cross(a, b)), dot(a, b));
}

// Gradient descent on sum 1/|x_i - x_j| over free points, others fixed.
void relax(std::vector<Vec3>& pts, std::size_t n_fixed, double step0, const SphereMeshOptions& opts) {
    const std::size_t n = pts.size();
    if (n == n_fixed) return;

    auto energy = [&](const std::vector<Vec3>& p) {
        double e = 0.0;
        for (std::size_t i = n_fixed; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (j < n_fixed || j > i) e += 1.0 / norm(p[i] - p[j]);
        return e;
    };

    std::vector<Vec3> grad(n), trial;
    double e = energy(pts);
    double step = step0;
    for (int it = 0; it < opts.max_relax_iterations; ++it) {
        double gmax = 0.0;
        for (std::size_t i = n_fixed; i < n; ++i) {
            Vec3 g;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const Vec3 d = pts[i] - pts[j];
                const double r = norm(d);
                g -= d / (r * r * r);
            }
            g -= pts[i] * dot(g, pts[i]);
            grad[i] = g;
            gmax = std::max(gmax, norm(g));
        }
        if (gmax == 0.0) break;
        // step is the largest displacement this iteration
        bool accepted = false;
        while (!accepted && step > 1e-12) {
            trial = pts;
            for (std::size_t i = n_fixed; i < n; ++i) trial[i] = normalized(pts[i] - grad[i] * (step / gmax));
            const double e2 = energy(trial);
            if (e2 < e) {
                const double rel = (e - e2) / e;
                pts.swap(trial);
                e = e2;
                accepted = true;
                step *= 1.2;
                if (rel < opts.relax_tolerance) return;
            } else {
                step *= 0.5;
            }
        }
        if (!accepted) return;
    }
}

}  // namespace

ConvexMesh make_fibonacci_sphere(int n_pores, double sigma, int refinement, const SphereMeshOptions& opts) {
    const double a = fibonacci_pore_radius(n_pores, sigma);
    const int K = opts.ring_points;
    if (K < 10) throw ConfigError("each pore needs at least 10 ring points");
    if (refinement < 0) throw ConfigError("refinement must be non-negative");

    // Flat K-gon with area pi a^2 inscribed in the sphere.
    const double s2 = 2.0 * std::numbers::pi * a * a / (K * std::sin(2.0 * std::numbers::pi / K));
    if (!(s2 < 1.0)) throw ConfigError("pore radius too large for the unit sphere");
    const double rho = std::asin(std::sqrt(s2));

    const auto centers = fibonacci_sphere_points(n_pores);
    for (int i = 0; i < n_pores; ++i)
        for (int j = i + 1; j < n_pores; ++j)
            if (angle_between(centers[i], centers[j]) <= 2.0 * rho)
                throw ConfigError("pore caps overlap; reduce sigma or the pore count");

    std::vector<Vec3> pts;
    std::vector<int> owner;  // pore index for ring points, -1 for free
    for (int k = 0; k < n_pores; ++k) {
        Vec3 u, v;
        orthonormal_frame(centers[k], u, v);
        for (int m = 0; m < K; ++m) {
            const double ph = 2.0 * std::numbers::pi * m / K;
            pts.push_back(centers[k] * std::cos(rho) + (u * std::cos(ph) + v * std::sin(ph)) * std::sin(rho));
            owner.push_back(k);
        }
    }
    const std::size_t n_fixed = pts.size();

    const double h = refinement > 0 ? std::sqrt(4.0 * std::numbers::pi / refinement) : 1.0;
    const double keep_out = rho + 0.5 * h;
    if (refinement > 0) {
        for (const auto& q : fibonacci_sphere_points(refinement)) {
            bool ok = true;
            for (const auto& c : centers)
                if (angle_between(q, c) < keep_out) {
                    ok = false;
                    break;
                }
            if (ok) {
                pts.push_back(q);
                owner.push_back(-1);
            }
        }
    }

    relax(pts, n_fixed, 0.2 * h, opts);

    const double margin = rho + 0.25 * h;
    for (std::size_t i = n_fixed; i < pts.size(); ++i)
        for (const auto& c : centers) {
            const double ang = angle_between(pts[i], c);
            if (ang < margin) {
                Vec3 tdir = pts[i] - c * dot(pts[i], c);
                if (norm(tdir) < 1e-12) {
                    Vec3 u, v;
                    orthonormal_frame(c, u, v);
                    tdir = u;
                }
                tdir = normalized(tdir);
                pts[i] = c * std::cos(margin) + tdir * std::sin(margin);
            }
        }

    if (pts.size() < 4) throw ConfigError("sphere mesh has too few points");
    const auto tris = convex_hull(pts);

    // Compact to the vertices actually on the hull.
    std::vector<int> remap(pts.size(), -1);
    std::vector<Vec3> verts;
    for (const auto& t : tris)
        for (int v : t)
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(verts.size());
                verts.push_back(pts[v]);
            }
    for (std::size_t i = 0; i < n_fixed; ++i)
        if (remap[i] < 0) throw NumericalError("sphere mesh: a pore ring point was lost in the hull");

    std::vector<FaceSpec> faces;
    faces.reserve(tris.size());
    for (const auto& t : tris) {
        FaceSpec f;
        f.verts = {remap[t[0]], remap[t[1]], remap[t[2]]};
        const int o = owner[t[0]];
        if (o >= 0 && owner[t[1]] == o && owner[t[2]] == o) {
            f.absorbing = true;
            f.label = "pore_" + std::to_string(o + 1);
        }
        faces.push_back(std::move(f));
    }
    return make_mesh(std::move(verts), faces);
}

ConvexMesh make_absorbing_sphere(int n_points) {
    if (n_points < 4) throw ConfigError("sphere needs at least 4 points");
    const auto pts = fibonacci_sphere_points(n_points);
    const auto tris = convex_hull(pts);
    std::vector<FaceSpec> faces;
    for (const auto& t : tris) faces.push_back({{t[0], t[1], t[2]}, true, "sphere"});
    return make_mesh(pts, faces);
}

ConvexMesh make_ellipsoid_skirt(double r_eq, int refinement) {
    if (!(r_eq >= 1.0)) throw ConfigError("equatorial radius must be at least 1");
    if (refinement < 8) throw ConfigError("ellipsoid refinement must be at least 8");
    const int n_phi = refinement;
    const int n_half = std::max(1, n_phi / 8);

    // Ring heights and radii on (r/r_eq)^2 + (z/B)^2 = 1 through (1, +-1).
    std::vector<double> rz, rr;
    for (int k = -n_half; k <= n_half; ++k) {
        const double s = static_cast<double>(k) / n_half;
        if (r_eq == 1.0) {
            rz.push_back(s);
            rr.push_back(1.0);
        } else {
            const double B = 1.0 / std::sqrt(1.0 - 1.0 / (r_eq * r_eq));
            const double psi0 = std::asin(1.0 / B);
            const double psi = psi0 * s;
            rz.push_back(k == n_half ? 1.0 : k == -n_half ? -1.0 : B * std::sin(psi));
            rr.push_back(std::abs(k) == n_half ? 1.0 : r_eq * std::cos(psi));
        }
    }
    const int n_ring = static_cast<int>(rz.size());

    std::vector<Vec3> v;
    for (int k = 0; k < n_ring; ++k)
        for (int m = 0; m < n_phi; ++m) {
            const double ph = 2.0 * std::numbers::pi * m / n_phi;
            v.push_back({rr[k] * std::cos(ph), rr[k] * std::sin(ph), rz[k]});
        }
    auto id = [&](int k, int m) { return k * n_phi + (m % n_phi); };

    std::vector<FaceSpec> faces;
    FaceSpec top{{}, true, "top"}, bottom{{}, true, "bottom"};
    for (int m = 0; m < n_phi; ++m) {
        top.verts.push_back(id(n_ring - 1, m));
        bottom.verts.push_back(id(0, n_phi - 1 - m));
    }
    faces.push_back(top);
    faces.push_back(bottom);
    for (int k = 0; k + 1 < n_ring; ++k)
        for (int m = 0; m < n_phi; ++m)
            faces.push_back({{id(k, m), id(k, m + 1), id(k + 1, m + 1), id(k + 1, m)}, false, ""});
    return make_mesh(std::move(v), faces);
}

}  // namespace kmc
