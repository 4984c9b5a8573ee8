#pragma once

#include <array>
#include <vector>

#include "kmc/geometry.hpp"

namespace kmc {

ConvexMesh make_cube(double side);

// Pore centres z_i = 1 - (2i+1)/N, longitude i times the golden angle.
std::vector<Vec3> fibonacci_sphere_points(int n);

struct SphereMeshOptions {
    int ring_points = 10;
    int max_relax_iterations = 400;
    double relax_tolerance = 1e-6;
};

// Unit sphere with n_pores flat circular windows of radius a = 2 sqrt(sigma/N).
// refinement is the number of free mesh points seeded before cap exclusion.
ConvexMesh make_fibonacci_sphere(int n_pores, double sigma, int refinement,
                                 const SphereMeshOptions& opts = {});

double fibonacci_pore_radius(int n_pores, double sigma);

// Triangulated unit sphere with every face absorbing under one label.
ConvexMesh make_absorbing_sphere(int n_points);

// Two flat unit discs at z = +-1 joined by an ellipsoidal skirt of
// equatorial radius r_eq; refinement is the azimuthal vertex count.
ConvexMesh make_ellipsoid_skirt(double r_eq, int refinement = 48);

// Outward-oriented triangles of the convex hull of pts.
std::vector<std::array<int, 3>> convex_hull(const std::vector<Vec3>& pts);

}  // namespace kmc
