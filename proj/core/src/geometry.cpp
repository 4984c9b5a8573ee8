#include "kmc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kmc/errors.hpp"

namespace kmc {

double PlanarPore::capacitance() const { return 2.0 * radius / std::numbers::pi; }

namespace {

struct Circle {
    Vec2 c;
    double r;
    bool contains(const Vec2& p) const { return norm(p - c) <= r * (1.0 + 1e-12) + 1e-15; }
};

Circle circle2(const Vec2& a, const Vec2& b) {
    const Vec2 c = (a + b) * 0.5;
    return {c, norm(a - c)};
}

Circle circle3(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double bx = b.x - a.x, by = b.y - a.y, cx = c.x - a.x, cy = c.y - a.y;
    const double d = 2.0 * (bx * cy - by * cx);
    if (std::abs(d) < 1e-300) {
        // collinear: widest pair
        Circle best = circle2(a, b);
        for (const Circle& k : {circle2(a, c), circle2(b, c)})
            if (k.r > best.r) best = k;
        return best;
    }
    const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    const Vec2 o{a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
    return {o, norm(a - o)};
}

// Minimum enclosing circle of points (incremental construction).
Circle min_enclosing_circle(const std::vector<Vec2>& p) {
    Circle c{p[0], 0.0};
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (c.contains(p[i])) continue;
        c = {p[i], 0.0};
        for (std::size_t j = 0; j < i; ++j) {
            if (c.contains(p[j])) continue;
            c = circle2(p[i], p[j]);
            for (std::size_t k = 0; k < j; ++k)
                if (!c.contains(p[k])) c = circle3(p[i], p[j], p[k]);
        }
    }
    return c;
}

}  // namespace

PlanarScene make_planar_scene(std::vector<PlanarPore> pores, double reinsertion_ratio) {
    if (!(reinsertion_ratio > 1.0)) throw ConfigError("reinsertion ratio must exceed 1");
    for (std::size_t k = 0; k < pores.size(); ++k) {
        auto& p = pores[k];
        if (!(p.radius > 0.0) || !std::isfinite(p.radius)) throw ConfigError("pore radius must be positive");
        if (!std::isfinite(p.center.x) || !std::isfinite(p.center.y)) throw ConfigError("pore centre not finite");
        if (p.label.empty()) p.label = "pore_" + std::to_string(k + 1);
    }
    for (std::size_t j = 0; j < pores.size(); ++j)
        for (std::size_t k = j + 1; k < pores.size(); ++k) {
            if (norm(pores[j].center - pores[k].center) <= pores[j].radius + pores[k].radius)
                throw ConfigError("pores " + pores[j].label + " and " + pores[k].label + " overlap");
            if (pores[j].label == pores[k].label) throw ConfigError("duplicate pore label " + pores[j].label);
        }

    PlanarScene s;
    s.reinsertion_ratio = reinsertion_ratio;
    if (!pores.empty()) {
        std::vector<Vec2> centers;
        for (const auto& p : pores) centers.push_back(p.center);
        const Circle c = min_enclosing_circle(centers);
        s.disc_center = c.c;
        for (const auto& p : pores) s.disc_radius = std::max(s.disc_radius, norm(p.center - c.c) + p.radius);
    }
    s.pores = std::move(pores);
    return s;
}

PoreDistance nearest_pore_distance(const Vec2& point, const PlanarScene& scene) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < scene.pores.size(); ++k) {
        const auto& p = scene.pores[k];
        const double d = norm(point - p.center) - p.radius;
        if (d <= 0.0) return {0.0, static_cast<int>(k)};
        best = std::min(best, d);
    }
    return {std::max(best, kDistanceFloor), -1};
}

// ---------------------------------------------------------------- mesh

double ConvexMesh::max_signed_distance(const Vec3& p, int& face) const {
    double best = -std::numeric_limits<double>::infinity();
    int idx = -1;
    const std::size_t n = off.size();
    for (std::size_t f = 0; f < n; ++f) {
        const double d = nx[f] * p.x + ny[f] * p.y + nz[f] * p.z - off[f];
        if (d > best) {
            best = d;
            idx = static_cast<int>(f);
        }
    }
    face = idx;
    return best;
}

bool ConvexMesh::contains(const Vec3& p) const {
    int f;
    return max_signed_distance(p, f) <= 0.0;
}

ConvexMesh make_mesh(std::vector<Vec3> vertices, const std::vector<FaceSpec>& specs,
                     double reinsertion_ratio) {
    if (!(reinsertion_ratio > 1.0)) throw ConfigError("reinsertion ratio must exceed 1");
    if (vertices.size() < 4) throw ConfigError("mesh needs at least 4 vertices");
    if (specs.size() < 4) throw ConfigError("mesh needs at least 4 faces");

    ConvexMesh m;
    m.reinsertion_ratio = reinsertion_ratio;
    m.vertices = std::move(vertices);

    Vec3 lo = m.vertices[0], hi = m.vertices[0];
    Vec3 interior;
    for (const auto& v : m.vertices) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) throw ConfigError("vertex not finite");
        lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
        hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
        interior += v;
    }
    interior = interior / static_cast<double>(m.vertices.size());
    m.bounding_center = (lo + hi) * 0.5;
    for (const auto& v : m.vertices) m.bounding_radius = std::max(m.bounding_radius, norm(v - m.bounding_center));

    const int nv = static_cast<int>(m.vertices.size());
    for (std::size_t fi = 0; fi < specs.size(); ++fi) {
        const auto& spec = specs[fi];
        if (spec.verts.size() < 3) throw ConfigError("face " + std::to_string(fi) + " has fewer than 3 vertices");
        for (int v : spec.verts)
            if (v < 0 || v >= nv) throw ConfigError("face " + std::to_string(fi) + " references a missing vertex");

        Face f;
        f.verts = spec.verts;
        f.absorbing = spec.absorbing;
        f.label = spec.label;

        // Newell normal and area
        Vec3 nrm, cen;
        const std::size_t k = f.verts.size();
        for (std::size_t i = 0; i < k; ++i) {
            const Vec3& a = m.vertices[f.verts[i]];
            const Vec3& b = m.vertices[f.verts[(i + 1) % k]];
            nrm += cross(a, b);
            cen += a;
        }
        cen = cen / static_cast<double>(k);
        const double len = norm(nrm);
        if (!(len > 0.0)) throw ConfigError("face " + std::to_string(fi) + " is degenerate");
        nrm = nrm / len;
        if (dot(nrm, cen - interior) < 0.0) {
            std::reverse(f.verts.begin(), f.verts.end());
            nrm = -nrm;
        }
        f.normal = nrm;
        f.area = 0.5 * len;
        f.centroid = cen;
        f.offset = dot(nrm, cen);
        orthonormal_frame(nrm, f.u, f.v);

        for (std::size_t i = 0; i < k; ++i) {
            const Vec3& a = m.vertices[f.verts[i]];
            const Vec3& b = m.vertices[f.verts[(i + 1) % k]];
            const Vec3 en = normalized(cross(nrm, b - a));  // points inward for CCW loops
            f.edge_normals.push_back(en);
            f.edge_offsets.push_back(dot(en, a));
        }

        if (f.absorbing) {
            if (f.label.empty()) f.label = "face_" + std::to_string(fi);
            auto it = std::find(m.targets.begin(), m.targets.end(), f.label);
            if (it == m.targets.end()) {
                f.target = static_cast<int>(m.targets.size());
                m.targets.push_back(f.label);
            } else {
                f.target = static_cast<int>(it - m.targets.begin());
            }
        }
        m.nx.push_back(nrm.x);
        m.ny.push_back(nrm.y);
        m.nz.push_back(nrm.z);
        m.off.push_back(f.offset);
        m.faces.push_back(std::move(f));
    }
    validate_mesh(m);
    return m;
}

void validate_mesh(const ConvexMesh& m) {
    const double tol = 1e-10 * std::max(m.diameter(), 1e-300);
    for (std::size_t fi = 0; fi < m.faces.size(); ++fi) {
        const Face& f = m.faces[fi];
        for (int v : f.verts)
            if (std::abs(m.signed_distance(static_cast<int>(fi), m.vertices[v])) > tol)
                throw ConfigError("face " + std::to_string(fi) + " is not planar");
        for (std::size_t vi = 0; vi < m.vertices.size(); ++vi)
            if (m.signed_distance(static_cast<int>(fi), m.vertices[vi]) > tol)
                throw ConfigError("mesh is not convex: vertex " + std::to_string(vi) + " lies outside face " +
                                  std::to_string(fi));
        // edge normals of a convex CCW loop keep every vertex on the inner side
        for (std::size_t e = 0; e < f.edge_normals.size(); ++e)
            for (int v : f.verts)
                if (dot(f.edge_normals[e], m.vertices[v]) - f.edge_offsets[e] < -tol)
                    throw ConfigError("face " + std::to_string(fi) + " is not a convex polygon");
    }
}

int select_target_face(const Vec3& point, const ConvexMesh& mesh) {
    int f;
    const double d = mesh.max_signed_distance(point, f);
    if (!(d > 0.0)) throw DomainError("select_target_face: point is not outside the mesh");
    return f;
}

bool point_in_face(const Vec3& p, const Face& face, double tol) {
    for (std::size_t e = 0; e < face.edge_normals.size(); ++e)
        if (dot(face.edge_normals[e], p) - face.edge_offsets[e] < -tol) return false;
    return true;
}

double inscribed_hemisphere_radius(const Vec3& p, const Face& face) {
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < face.edge_normals.size(); ++e)
        r = std::min(r, dot(face.edge_normals[e], p) - face.edge_offsets[e]);
    return std::max(r, kDistanceFloor);
}

double absorbing_area_fraction(const ConvexMesh& mesh) {
    double total = 0.0, absorbing = 0.0;
    for (const auto& f : mesh.faces) {
        total += f.area;
        if (f.absorbing) absorbing += f.area;
    }
    return total > 0.0 ? absorbing / total : 0.0;
}

}  // namespace kmc
