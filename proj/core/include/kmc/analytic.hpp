#pragma once

#include <string>
#include <vector>

#include "kmc/vec.hpp"

namespace kmc::analytic {

inline constexpr double kCubeCapacitance = 0.66067815409957;

// Pore on the plane z = 0 with its (already scaled) capacitance.
struct PoreSpec {
    Vec3 center;
    double capacitance;
};

// Circular pore of radius a: capacitance 2a/pi.
PoreSpec circular_pore(double x, double y, double radius);

struct PerPore {
    std::vector<double> per_pore;
    double total = 0.0;
};

// Two-term small-pore flux density into each pore.
PerPore planar_flux(double t, const std::vector<PoreSpec>& pores, const Vec3& x0, double D);
PerPore planar_cdf(double t, const std::vector<PoreSpec>& pores, const Vec3& x0, double D);
std::vector<double> splitting_planar(const std::vector<PoreSpec>& pores, const Vec3& x0);

// Surface Green's function exterior to the unit sphere, |xi| = 1.
double sphere_green(const Vec3& x, const Vec3& xi);
std::vector<double> splitting_sphere(const std::vector<Vec3>& centers, double a, const Vec3& x);

// Two unit discs with centre separation d.
double strieder_capacitance(double d);

double robin_kappa(double sigma, double a, double D);

struct PdfCdf {
    double pdf;
    double cdf;
};

PdfCdf homog_sphere(double t, double R, double kappa, double D);
PdfCdf sphere_arrival(double t, double R, double D);
double cube_equiv_cdf(double t, double x0_norm, double D);

struct DifferentialFlux {
    std::vector<double> edges;
    std::vector<double> xi;
    std::vector<bool> empty;
};

// Normalised difference (top - bottom)/(top + bottom) of capture counts on
// a shared log10-uniform grid.
DifferentialFlux differential_flux(const std::vector<double>& top, const std::vector<double>& bottom,
                                   double t_min, double t_max, int n_bins);

}  // namespace kmc::analytic
