#pragma once

#include <limits>
#include <string>
#include <vector>

#include "kmc/vec.hpp"

namespace kmc {

inline constexpr double kDistanceFloor = 10.0 * std::numeric_limits<double>::epsilon();

// ------------------------------------------------------------- planar

struct PlanarPore {
    Vec2 center;
    double radius = 1.0;
    std::string label;

    double capacitance() const;
};

struct PlanarScene {
    std::vector<PlanarPore> pores;
    Vec2 disc_center;
    // Radius of a disc containing every pore.
    double disc_radius = 0.0;
    double reinsertion_ratio = 3.0;

    // Radius of the disc inside which hemisphere steps are used.
    double inner_radius() const { return reinsertion_ratio * disc_radius; }
};

// Validates radii and pairwise separation; computes the enclosing disc.
PlanarScene make_planar_scene(std::vector<PlanarPore> pores, double reinsertion_ratio = 3.0);

struct PoreDistance {
    double distance;
    // Index of the pore containing the point, or -1.
    int pore;
};

PoreDistance nearest_pore_distance(const Vec2& point, const PlanarScene& scene);

// --------------------------------------------------------------- mesh

struct FaceSpec {
    std::vector<int> verts;
    bool absorbing = false;
    std::string label;
};

struct Face {
    std::vector<int> verts;
    Vec3 normal;
    double offset = 0.0;  // plane: dot(normal, x) = offset
    bool absorbing = false;
    std::string label;
    int target = -1;  // index into ConvexMesh::targets, -1 when reflecting
    Vec3 centroid;
    double area = 0.0;
    // In-plane orthonormal basis with cross(u, v) = normal.
    Vec3 u, v;
    // In-plane unit normals pointing into the polygon, one per edge, with
    // dot(edge_normal, x) = edge_offset on the edge line.
    std::vector<Vec3> edge_normals;
    std::vector<double> edge_offsets;
};

struct ConvexMesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::vector<std::string> targets;
    Vec3 bounding_center;
    double bounding_radius = 0.0;
    double reinsertion_ratio = 3.0;

    // Face planes as separate arrays for the hot max-distance scan.
    std::vector<double> nx, ny, nz, off;

    double diameter() const { return 2.0 * bounding_radius; }
    double signed_distance(int face, const Vec3& p) const {
        return nx[face] * p.x + ny[face] * p.y + nz[face] * p.z - off[face];
    }
    // Largest signed distance over all faces and the face attaining it
    // (lowest index on ties).
    double max_signed_distance(const Vec3& p, int& face) const;
    bool contains(const Vec3& p) const;
};

// Builds planes and edge data, orients loops counter-clockwise about the
// outward normal, and runs validate_mesh.
ConvexMesh make_mesh(std::vector<Vec3> vertices, const std::vector<FaceSpec>& faces,
                     double reinsertion_ratio = 3.0);

// Throws ConfigError if faces are non-planar or the mesh is not convex.
void validate_mesh(const ConvexMesh& mesh);

int select_target_face(const Vec3& point, const ConvexMesh& mesh);
bool point_in_face(const Vec3& point, const Face& face, double tol = 1e-12);
double inscribed_hemisphere_radius(const Vec3& point, const Face& face);

double absorbing_area_fraction(const ConvexMesh& mesh);

}  // namespace kmc
