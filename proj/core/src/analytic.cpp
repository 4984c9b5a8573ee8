#include "kmc/analytic.hpp"

#include <cmath>
#include <numbers>

#include "kmc/errors.hpp"
#include "kmc/specfun.hpp"
#include "kmc/stats.hpp"

namespace kmc::analytic {

namespace {
constexpr double kPi = std::numbers::pi;

void check_time(double t, double D) {
    if (!(t > 0.0)) throw DomainError("time must be positive");
    if (!(D > 0.0)) throw DomainError("D must be positive");
}
}  // namespace

PoreSpec circular_pore(double x, double y, double radius) {
    return {{x, y, 0.0}, 2.0 * radius / kPi};
}

PerPore planar_flux(double t, const std::vector<PoreSpec>& pores, const Vec3& x0, double D) {
    check_time(t, D);
    const std::size_t n = pores.size();
    PerPore out;
    out.per_pore.assign(n, 0.0);
    const double pref = 1.0 / (2.0 * std::sqrt(kPi * D) * std::pow(t, 1.5));
    for (std::size_t j = 0; j < n; ++j) {
        const double cj = pores[j].capacitance;
        const double Rj = norm(x0 - pores[j].center);
        double v = cj * std::exp(-Rj * Rj / (4.0 * D * t)) * pref * (1.0 - cj / Rj + cj * Rj / (2.0 * D * t));
        for (std::size_t k = 0; k < n; ++k) {
            if (k == j) continue;
            const double ck = pores[k].capacitance;
            const double Rk = norm(x0 - pores[k].center);
            const double djk = norm(pores[j].center - pores[k].center);
            const double s = Rk + djk;
            v -= cj * ck * (1.0 / Rk + 1.0 / djk) * std::exp(-s * s / (4.0 * D * t)) * pref;
        }
        out.per_pore[j] = v;
        out.total += v;
    }
    return out;
}

PerPore planar_cdf(double t, const std::vector<PoreSpec>& pores, const Vec3& x0, double D) {
    check_time(t, D);
    const std::size_t n = pores.size();
    PerPore out;
    out.per_pore.assign(n, 0.0);
    const double sq = 2.0 * std::sqrt(D * t);
    for (std::size_t j = 0; j < n; ++j) {
        const double cj = pores[j].capacitance;
        const double Rj = norm(x0 - pores[j].center);
        double v = cj / Rj * std::erfc(Rj / sq) +
                   cj * cj / Rj * std::exp(-Rj * Rj / (4.0 * D * t)) / std::sqrt(kPi * D * t);
        for (std::size_t k = 0; k < n; ++k) {
            if (k == j) continue;
            const double ck = pores[k].capacitance;
            const double Rk = norm(x0 - pores[k].center);
            const double djk = norm(pores[j].center - pores[k].center);
            v -= cj * ck / (djk * Rk) * std::erfc((Rk + djk) / sq);
        }
        out.per_pore[j] = v;
        out.total += v;
    }
    return out;
}

std::vector<double> splitting_planar(const std::vector<PoreSpec>& pores, const Vec3& x0) {
    const std::size_t n = pores.size();
    std::vector<double> q(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ck = pores[k].capacitance;
        double v = ck / norm(x0 - pores[k].center);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k) continue;
            v -= pores[j].capacitance * ck /
                 (norm(pores[j].center - pores[k].center) * norm(x0 - pores[j].center));
        }
        q[k] = v;
    }
    return q;
}

double sphere_green(const Vec3& x, const Vec3& xi) {
    const double r = norm(x - xi);
    const double xn = norm(x);
    const double c = dot(x, xi);
    const double ratio = c > 0.0 ? (xn + c) / (r - 1.0 + c) : (1.0 - c + r) / (xn - c);
    return (1.0 / (2.0 * kPi)) * (1.0 / r - 0.5 * std::log(ratio));
}

std::vector<double> splitting_sphere(const std::vector<Vec3>& centers, double a, const Vec3& x) {
    if (!(norm(x) > 1.0)) throw DomainError("splitting_sphere: point must lie outside the unit sphere");
    if (!(a > 0.0)) throw DomainError("splitting_sphere: pore radius must be positive");
    for (const auto& c : centers)
        if (std::abs(norm(c) - 1.0) > 1e-9) throw DomainError("splitting_sphere: pore centres must be unit vectors");

    const std::size_t n = centers.size();
    std::vector<double> q(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double g = sphere_green(x, centers[k]);
        double cross_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != k) cross_sum += sphere_green(centers[j], centers[k]) * sphere_green(x, centers[j]);
        q[k] = 4.0 * a * g + 4.0 * a * a / kPi * ((1.5 - std::log(2.0 * a)) * g - 4.0 * kPi * cross_sum);
    }
    return q;
}

double strieder_capacitance(double d) {
    if (!(d > 2.0)) throw DomainError("strieder_capacitance: separation must exceed 2");
    const double p = kPi, p2 = p * p, p4 = p2 * p2;
    const double s = 1.0 - 2.0 / (p * d) + 4.0 / (p2 * d * d) - 2.0 * (12.0 + p2) / (3.0 * p2 * std::pow(d, 3)) +
                     16.0 * (3.0 + p2) / (3.0 * p4 * std::pow(d, 4)) -
                     4.0 * (120.0 + 70.0 * p2 + 3.0 * p4) / (15.0 * p4 * p * std::pow(d, 5));
    return 4.0 / p * s;
}

double robin_kappa(double sigma, double a, double D) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("robin_kappa: sigma must lie in (0, 1)");
    if (!(a > 0.0) || !(D > 0.0)) throw DomainError("robin_kappa: a and D must be positive");
    const double rs = std::sqrt(sigma);
    const double bracket = 1.0 - 4.0 / kPi * rs + a / kPi * std::log(4.0 * std::exp(-0.5) * rs);
    return 4.0 * D * sigma / (kPi * a) / bracket;
}

PdfCdf homog_sphere(double t, double R, double kappa, double D) {
    check_time(t, D);
    if (!(R > 1.0)) throw DomainError("homog_sphere: R must exceed 1");
    if (!(kappa > 0.0)) throw DomainError("homog_sphere: kappa must be positive");
    const double sdt = std::sqrt(D * t);
    const double g = std::exp(-(R - 1.0) * (R - 1.0) / (4.0 * D * t));
    const double beta = (R - 1.0) / (2.0 * sdt) + (kappa / D + 1.0) * sdt;
    const double ex = specfun::erfcx(beta);
    PdfCdf r;
    r.pdf = kappa / R * g * (1.0 / std::sqrt(kPi * D * t) - ex * (kappa / D + 1.0));
    r.cdf = (std::erfc((R - 1.0) / (2.0 * sdt)) - ex * g) / ((1.0 + D / kappa) * R);
    return r;
}

PdfCdf sphere_arrival(double t, double R, double D) {
    check_time(t, D);
    if (!(R > 1.0)) throw DomainError("sphere_arrival: R must exceed 1");
    const double a = R - 1.0;
    PdfCdf r;
    r.pdf = a / (2.0 * R * std::sqrt(kPi * D)) * std::pow(t, -1.5) * std::exp(-a * a / (4.0 * D * t));
    r.cdf = std::erfc(a / (2.0 * std::sqrt(D * t))) / R;
    return r;
}

double cube_equiv_cdf(double t, double x0_norm, double D) {
    check_time(t, D);
    if (!(x0_norm > kCubeCapacitance)) throw DomainError("cube_equiv_cdf: release point inside the equivalent sphere");
    return kCubeCapacitance / x0_norm * std::erfc((x0_norm - kCubeCapacitance) / (2.0 * std::sqrt(D * t)));
}

DifferentialFlux differential_flux(const std::vector<double>& top, const std::vector<double>& bottom,
                                   double t_min, double t_max, int n_bins) {
    const auto ht = stats::log_histogram(top, t_min, t_max, n_bins);
    const auto hb = stats::log_histogram(bottom, t_min, t_max, n_bins);
    DifferentialFlux out;
    out.edges = ht.edges;
    out.xi.assign(n_bins, 0.0);
    out.empty.assign(n_bins, false);
    for (int i = 0; i < n_bins; ++i) {
        const double a = static_cast<double>(ht.counts[i]), b = static_cast<double>(hb.counts[i]);
        if (a + b == 0.0) out.empty[i] = true;
        else out.xi[i] = (a - b) / (a + b);
    }
    return out;
}

}  // namespace kmc::analytic
