#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kmc/random.hpp"
#include "kmc/vec.hpp"

namespace kmc {

// ---------------------------------------------------------------- plane

struct PlaneImpact {
    double t;
    double dx;
    double dy;
};

// Transit time to the plane z = 0 for a given uniform variate nu in (0, 1).
double plane_impact_time(double z0, double D, double nu);
PlaneImpact plane_impact(double z0, double D, RandomStream& rng);

// ------------------------------------------------------------ hemisphere

class HemisphereCdfTable {
public:
    explicit HemisphereCdfTable(int points_per_branch = 4096);

    // Process-wide default table, built on first use.
    static const HemisphereCdfTable& instance();

    // Dimensionless tau with F_T(tau) = xi.
    double invert(double xi) const;

    double tail_threshold() const { return tail_threshold_; }
    int size() const { return n_; }

private:
    struct Branch {
        double x0 = 0.0, dx = 0.0;
        std::vector<double> tau, dtau;
        double eval(double x) const;
    };

    int n_;
    double tail_threshold_ = 0.99;
    Branch head_;  // x = log(xi), xi in [1e-18, 0.5]
    Branch body_;  // x = log(1 - xi), xi in [0.5, tail_threshold]
};

struct HemisphereExit {
    double t;
    // Exit point relative to the base centre, in the frame where the
    // hemisphere occupies z >= 0.
    Vec3 offset;
};

HemisphereExit hemisphere_exit(double radius, double D, const HemisphereCdfTable& table,
                               RandomStream& rng);

// ------------------------------------------------------ exterior sphere

// Inverse Laplace transform of k_n(alpha R)/k_n(alpha), alpha = sqrt(s/D).
double chi_n(int n, double t, double R, double D);
// [chi_1, ..., chi_{n_max}] sharing one contour.
std::vector<double> chi_sequence(int n_max, double t, double R, double D, int node_count = 24);
// Same quantity via the real-line integral of spherical Bessel functions.
double chi_n_hairpin(int n, double t, double R, double D);
// Large-t leading behaviour.
double chi_n_asymptotic(int n, double t, double R, double D);

// Density of first arrival at the unit sphere from radius R.
double sphere_arrival_density(double t, double R, double D);

struct AngularSeries {
    double t = 0.0;
    // coeff[n-1] = chi_n(t) / J(t)
    std::vector<double> coeff;
    bool converged = true;
};

AngularSeries angular_series(double t, double R, double D, int n_cap = 256, double tol = 1e-8);
double polar_angle_cdf(double theta, const AngularSeries& series);
// Convenience form. n_max < 0 selects the adaptive truncation.
double polar_angle_cdf(double theta, double t, double R, double D, int n_max = -1,
                       bool* converged = nullptr);

class ReinsertionTable {
public:
    ReinsertionTable() = default;

    static ReinsertionTable build(double R, int n_mu = 400, int n_nu = 400, double D = 1.0);
    static ReinsertionTable load(const std::string& path);
    void save(const std::string& path) const;

    double ratio() const { return R_; }
    int n_mu() const { return n_mu_; }
    int n_nu() const { return n_nu_; }
    double diffusivity() const { return D_; }
    // Grid rows that hit the series cap without converging.
    int unconverged_rows() const { return unconverged_; }

    double mu(int i) const { return (i + 0.5) / (n_mu_ * R_); }
    double nu(int j) const { return (j + 0.5) / n_nu_; }
    double time(int i) const { return times_[i]; }
    double angle(int i, int j) const { return angles_[static_cast<std::size_t>(i) * n_nu_ + j]; }

    // Table time and polar angle for variates mu in (0, 1/R), nu in (0, 1).
    void lookup(double mu, double nu, bool interpolate, double& t, double& theta) const;

private:
    double R_ = 0.0, D_ = 1.0;
    int n_mu_ = 0, n_nu_ = 0;
    int unconverged_ = 0;
    std::vector<double> times_;
    std::vector<double> angles_;
};

// Cached, shared tables keyed by (R, n_mu, n_nu). Thread-safe.
std::shared_ptr<const ReinsertionTable> shared_reinsertion_table(double R, int n_mu = 400,
                                                                 int n_nu = 400);

struct Reinsertion {
    bool escaped;
    double t;
    // Landing point relative to the sphere centre.
    Vec3 landing;
};

// offset: launch point relative to the sphere centre, |offset| = R * landing_radius.
// half_space reflects landings with z < 0 into the upper half.
Reinsertion reinsert_or_escape(const Vec3& offset, double landing_radius, double D,
                               const ReinsertionTable& table, RandomStream& rng,
                               bool half_space = false, bool interpolate = false);

}  // namespace kmc
