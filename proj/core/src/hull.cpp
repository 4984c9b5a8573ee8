#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "kmc/errors.hpp"
#include "kmc/mesh_gen.hpp"

namespace kmc {

namespace {

struct HullFace {
    int a, b, c;
    Vec3 n;
    double off;
    bool alive = true;
};

inline std::uint64_t edge_key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

// Incremental hull. Points coplanar with a face are not counted as visible
// from it, so coplanar clusters end up as several coplanar triangles.
std::vector<std::array<int, 3>> convex_hull(const std::vector<Vec3>& pts) {
    const int n = static_cast<int>(pts.size());
    if (n < 4) throw DomainError("convex_hull: need at least 4 points");

    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, norm(p));
    const double eps = 1e-12 * std::max(scale, 1.0);

    // initial tetrahedron from extreme points
    int i0 = 0;
    for (int i = 1; i < n; ++i)
        if (pts[i].x < pts[i0].x) i0 = i;
    int i1 = -1;
    double best = -1;
    for (int i = 0; i < n; ++i) {
        const double d = norm(pts[i] - pts[i0]);
        if (d > best) best = d, i1 = i;
    }
    int i2 = -1;
    best = -1;
    const Vec3 dir = normalized(pts[i1] - pts[i0]);
    for (int i = 0; i < n; ++i) {
        const double d = norm(cross(pts[i] - pts[i0], dir));
        if (d > best) best = d, i2 = i;
    }
    int i3 = -1;
    best = -1;
    const Vec3 pn = normalized(cross(pts[i1] - pts[i0], pts[i2] - pts[i0]));
    for (int i = 0; i < n; ++i) {
        const double d = std::abs(dot(pts[i] - pts[i0], pn));
        if (d > best) best = d, i3 = i;
    }
    if (best <= eps) throw DomainError("convex_hull: points are coplanar");

    std::vector<HullFace> faces;
    std::unordered_map<std::uint64_t, int> edge_face;
    const Vec3 inside = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) * 0.25;

    auto add_face = [&](int a, int b, int c) {
        Vec3 nn = cross(pts[b] - pts[a], pts[c] - pts[a]);
        const double len = norm(nn);
        nn = nn / len;
        HullFace f{a, b, c, nn, dot(nn, pts[a])};
        const int id = static_cast<int>(faces.size());
        faces.push_back(f);
        edge_face[edge_key(a, b)] = id;
        edge_face[edge_key(b, c)] = id;
        edge_face[edge_key(c, a)] = id;
    };
    auto add_oriented = [&](int a, int b, int c) {
        const Vec3 nn = cross(pts[b] - pts[a], pts[c] - pts[a]);
        if (dot(nn, pts[a] - inside) < 0.0) std::swap(b, c);
        add_face(a, b, c);
    };
    add_oriented(i0, i1, i2);
    add_oriented(i0, i1, i3);
    add_oriented(i0, i2, i3);
    add_oriented(i1, i2, i3);

    std::vector<int> visible;
    std::vector<std::pair<int, int>> horizon;
    for (int p = 0; p < n; ++p) {
        if (p == i0 || p == i1 || p == i2 || p == i3) continue;
        visible.clear();
        for (int f = 0; f < static_cast<int>(faces.size()); ++f)
            if (faces[f].alive && dot(faces[f].n, pts[p]) - faces[f].off > eps) visible.push_back(f);
        if (visible.empty()) continue;

        for (int f : visible) faces[f].alive = false;
        horizon.clear();
        for (int f : visible) {
            const int v[3] = {faces[f].a, faces[f].b, faces[f].c};
            for (int e = 0; e < 3; ++e) {
                const int a = v[e], b = v[(e + 1) % 3];
                auto it = edge_face.find(edge_key(b, a));
                if (it == edge_face.end()) throw NumericalError("convex_hull: broken adjacency");
                if (faces[it->second].alive) horizon.emplace_back(a, b);
            }
        }
        for (int f : visible) {
            edge_face.erase(edge_key(faces[f].a, faces[f].b));
            edge_face.erase(edge_key(faces[f].b, faces[f].c));
            edge_face.erase(edge_key(faces[f].c, faces[f].a));
        }
        for (auto [a, b] : horizon) add_face(a, b, p);
    }

    std::vector<std::array<int, 3>> out;
    for (const auto& f : faces)
        if (f.alive) out.push_back({f.a, f.b, f.c});
    return out;
}

}  // namespace kmc
