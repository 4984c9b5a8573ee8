#include "kmc/propagators.hpp"

#include <cmath>
#include <numbers>

#include "kmc/errors.hpp"
#include "kmc/specfun.hpp"

namespace kmc {

double plane_impact_time(double z0, double D, double nu) {
    const double e = specfun::erfc_inv(nu);
    return z0 * z0 / (4.0 * D * e * e);
}

PlaneImpact plane_impact(double z0, double D, RandomStream& rng) {
    const double t = plane_impact_time(z0, D, rng.uniform());
    const double sigma = std::sqrt(2.0 * D * t);
    const double dx = sigma * rng.normal();
    const double dy = sigma * rng.normal();
    return {t, dx, dy};
}

namespace {

// tau with F_T(tau) = xi, by bisection on log F (xi small) or log(1 - F).
double solve_tau(double xi) {
    double lo = 1e-3, hi = 60.0;
    const bool upper = xi > 0.5;
    const double target = upper ? std::log1p(-xi) : std::log(xi);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double F = specfun::hemisphere_exit_cdf(mid);
        const double g = upper ? std::log1p(-F) : std::log(F);
        // log F increases with tau; log(1 - F) decreases
        if ((g < target) != upper) lo = mid;
        else hi = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double HemisphereCdfTable::Branch::eval(double x) const {
    const int n = static_cast<int>(tau.size());
    double u = (x - x0) / dx;
    int i = static_cast<int>(std::floor(u));
    if (i < 0) i = 0;
    if (i > n - 2) i = n - 2;
    const double s = u - i;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * tau[i] + h10 * dx * dtau[i] + h01 * tau[i + 1] + h11 * dx * dtau[i + 1];
}

HemisphereCdfTable::HemisphereCdfTable(int points_per_branch) : n_(points_per_branch) {
    if (n_ < 16) throw DomainError("HemisphereCdfTable: too few points");

    auto fill = [&](Branch& b, double xa, double xb, bool upper) {
        b.x0 = xa;
        b.dx = (xb - xa) / (n_ - 1);
        b.tau.resize(n_);
        b.dtau.resize(n_);
        for (int i = 0; i < n_; ++i) {
            const double x = xa + i * b.dx;
            const double xi = upper ? -std::expm1(x) : std::exp(x);
            const double tau = solve_tau(xi);
            const double F = specfun::hemisphere_exit_cdf(tau);
            const double f = specfun::hemisphere_exit_pdf(tau);
            b.tau[i] = tau;
            b.dtau[i] = upper ? -(1.0 - F) / f : F / f;
        }
    };
    fill(head_, std::log(1e-18), std::log(0.5), false);
    fill(body_, std::log(1.0 - tail_threshold_), std::log(0.5), true);
}

const HemisphereCdfTable& HemisphereCdfTable::instance() {
    static const HemisphereCdfTable table;
    return table;
}

double HemisphereCdfTable::invert(double xi) const {
    if (!(xi > 0.0 && xi < 1.0)) throw DomainError("HemisphereCdfTable::invert: xi outside (0, 1)");
    if (xi > tail_threshold_) return std::log(2.0 / (1.0 - xi));
    if (xi >= 0.5) return body_.eval(std::log1p(-xi));
    if (xi >= 1e-18) return head_.eval(std::log(xi));
    return solve_tau(xi);
}

HemisphereExit hemisphere_exit(double radius, double D, const HemisphereCdfTable& table,
                               RandomStream& rng) {
    const double tau = table.invert(rng.uniform());
    const double t = radius * radius * tau / (D * std::numbers::pi * std::numbers::pi);
    const double zeta = rng.uniform();
    const double eta = 2.0 * std::numbers::pi * rng.uniform();
    const double rho = radius * std::sqrt(1.0 - zeta * zeta);
    return {t, {rho * std::cos(eta), rho * std::sin(eta), radius * zeta}};
}

}  // namespace kmc
