#include "kmc/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "kmc/errors.hpp"
#include "kmc/specfun.hpp"

namespace kmc {

using specfun::cplx;

namespace {

void check_args(double t, double R, double D) {
    if (!(t > 0.0)) throw DomainError("chi_n: t must be positive");
    if (!(R > 1.0)) throw DomainError("chi_n: R must exceed 1");
    if (!(D > 0.0)) throw DomainError("chi_n: D must be positive");
}

}  // namespace

double sphere_arrival_density(double t, double R, double D) {
    const double a = R - 1.0;
    return a / (2.0 * R * std::sqrt(std::numbers::pi * D)) * std::pow(t, -1.5) *
           std::exp(-a * a / (4.0 * D * t));
}

double chi_n(int n, double t, double R, double D) {
    check_args(t, R, D);
    if (n < 0) throw DomainError("chi_n: negative order");
    return specfun::talbot_invert([&](cplx s) { return specfun::kn_ratio(n, std::sqrt(s / D), R); }, t);
}

std::vector<double> chi_sequence(int n_max, double t, double R, double D, int node_count) {
    check_args(t, R, D);
    const auto tc = specfun::make_talbot_contour(t, node_count);
    std::vector<cplx> alpha(tc.nodes.size());
    for (std::size_t k = 0; k < alpha.size(); ++k) alpha[k] = std::sqrt(tc.nodes[k] / D);

    std::vector<double> out(static_cast<std::size_t>(std::max(n_max, 0)));
    for (int n = 1; n <= n_max; ++n) {
        cplx acc = 0.0;
        for (std::size_t k = 0; k < alpha.size(); ++k) acc += tc.weights[k] * specfun::kn_ratio(n, alpha[k], R);
        const double v = 2.0 * acc.real();
        if (!std::isfinite(v)) throw NumericalError("chi_sequence: non-finite Talbot sum");
        out[n - 1] = v;
    }
    return out;
}

double chi_n_hairpin(int n, double t, double R, double D) {
    check_args(t, R, D);
    if (n < 0) throw DomainError("chi_n_hairpin: negative order");
    const double w_max = std::sqrt(36.85 / (D * t));

    auto integrand = [&](double w) -> double {
        if (w <= 0.0) return 0.0;
        const auto [j, y] = specfun::sph_bessel_jy(n, w);
        const auto [jR, yR] = specfun::sph_bessel_jy(n, w * R);
        // Divide through by y_n(w)^2, which dominates near w = 0.
        const double q = j / y;
        const double v = w * std::exp(-w * w * D * t) * (q * yR / y - jR / y) / (q * q + 1.0);
        return std::isfinite(v) ? v : 0.0;
    };

    double err = 0.0;
    const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, w_max, 20, 1e-13, &err);
    if (!std::isfinite(I)) throw NumericalError("chi_n_hairpin: quadrature failed");
    return 2.0 * D / std::numbers::pi * I;
}

double chi_n_asymptotic(int n, double t, double R, double D) {
    check_args(t, R, D);
    return D * std::pow(R, n) * (1.0 - std::pow(R, -1.0 - 2.0 * n)) /
           (std::pow(2.0, 2.0 * n + 1.0) * boost::math::tgamma(n + 0.5)) *
           std::pow(D * t, -n - 1.5);
}

AngularSeries angular_series(double t, double R, double D, int n_cap, double tol) {
    AngularSeries s;
    s.t = t;
    const double J = sphere_arrival_density(t, R, D);
    if (!(J > 0.0)) throw NumericalError("angular_series: arrival density vanishes");

    int block = std::min(32, n_cap);
    for (;;) {
        const auto chi = chi_sequence(block, t, R, D);
        int below = 0, stop = -1;
        for (int n = 1; n <= block; ++n) {
            below = std::abs(chi[n - 1] / J) < tol ? below + 1 : 0;
            if (below == 2) {
                stop = n;
                break;
            }
        }
        if (stop > 0 || block >= n_cap) {
            const int keep = stop > 0 ? stop : block;
            s.coeff.resize(keep);
            for (int n = 1; n <= keep; ++n) s.coeff[n - 1] = chi[n - 1] / J;
            s.converged = stop > 0;
            return s;
        }
        block = std::min(2 * block, n_cap);
    }
}

double polar_angle_cdf(double theta, const AngularSeries& series) {
    const double x = std::cos(theta);
    const int n_max = static_cast<int>(series.coeff.size());
    double acc = 0.5 * (1.0 - x);
    // Legendre recurrence inline, P_{n-1} and P_{n+1} needed at step n.
    double pm = 1.0, p = x;  // P_0, P_1
    for (int n = 1; n <= n_max; ++n) {
        const double pn1 = ((2.0 * n + 1.0) * x * p - n * pm) / (n + 1.0);
        acc += 0.5 * series.coeff[n - 1] * (pm - pn1);
        pm = p;
        p = pn1;
    }
    return acc;
}

double polar_angle_cdf(double theta, double t, double R, double D, int n_max, bool* converged) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw DomainError("polar_angle_cdf: theta outside [0, pi]");
    AngularSeries s;
    if (n_max < 0) {
        s = angular_series(t, R, D);
    } else {
        check_args(t, R, D);
        s.t = t;
        const double J = sphere_arrival_density(t, R, D);
        s.coeff = chi_sequence(n_max, t, R, D);
        for (auto& c : s.coeff) c /= J;
    }
    if (converged) *converged = s.converged;
    return polar_angle_cdf(theta, s);
}

ReinsertionTable ReinsertionTable::build(double R, int n_mu, int n_nu, double D) {
    if (!(R > 1.0)) throw DomainError("build_reinsertion_table: R must exceed 1");
    if (n_mu < 16 || n_nu < 16) throw DomainError("build_reinsertion_table: grid too small");
    if (!(D > 0.0)) throw DomainError("build_reinsertion_table: D must be positive");

    ReinsertionTable tab;
    tab.R_ = R;
    tab.D_ = D;
    tab.n_mu_ = n_mu;
    tab.n_nu_ = n_nu;
    tab.times_.resize(n_mu);
    tab.angles_.resize(static_cast<std::size_t>(n_mu) * n_nu);

    for (int i = 0; i < n_mu; ++i) {
        const double e = specfun::erfc_inv(R * tab.mu(i));
        const double t = (R - 1.0) * (R - 1.0) / (4.0 * D * e * e);
        tab.times_[i] = t;
        const AngularSeries series = angular_series(t, R, D);
        if (!series.converged) ++tab.unconverged_;

        double lo_prev = 0.0;
        for (int j = 0; j < n_nu; ++j) {
            const double target = tab.nu(j);
            double lo = lo_prev, hi = std::numbers::pi;
            while (hi - lo > 1e-10) {
                const double mid = 0.5 * (lo + hi);
                if (polar_angle_cdf(mid, series) < target) lo = mid;
                else hi = mid;
            }
            const double th = 0.5 * (lo + hi);
            tab.angles_[static_cast<std::size_t>(i) * n_nu + j] = th;
            lo_prev = lo;
        }
    }
    return tab;
}

namespace {
constexpr char kMagic[8] = {'K', 'M', 'C', 'R', 'T', 'A', 'B', '1'};
}

void ReinsertionTable::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write table file: " + path);
    out.write(kMagic, sizeof kMagic);
    auto put = [&](const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
    put(R_);
    put(D_);
    put(n_mu_);
    put(n_nu_);
    put(unconverged_);
    out.write(reinterpret_cast<const char*>(times_.data()), times_.size() * sizeof(double));
    out.write(reinterpret_cast<const char*>(angles_.data()), angles_.size() * sizeof(double));
    if (!out) throw ConfigError("failed writing table file: " + path);
}

ReinsertionTable ReinsertionTable::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read table file: " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw ConfigError("not a reinsertion table: " + path);
    ReinsertionTable tab;
    auto get = [&](auto& v) { in.read(reinterpret_cast<char*>(&v), sizeof v); };
    get(tab.R_);
    get(tab.D_);
    get(tab.n_mu_);
    get(tab.n_nu_);
    get(tab.unconverged_);
    if (!in || !(tab.R_ > 1.0) || tab.n_mu_ < 1 || tab.n_nu_ < 1 || tab.n_mu_ > 100000 || tab.n_nu_ > 100000)
        throw ConfigError("corrupt table header: " + path);
    tab.times_.resize(tab.n_mu_);
    tab.angles_.resize(static_cast<std::size_t>(tab.n_mu_) * tab.n_nu_);
    in.read(reinterpret_cast<char*>(tab.times_.data()), tab.times_.size() * sizeof(double));
    in.read(reinterpret_cast<char*>(tab.angles_.data()), tab.angles_.size() * sizeof(double));
    if (!in) throw ConfigError("truncated table file: " + path);
    return tab;
}

void ReinsertionTable::lookup(double mu, double nu, bool interpolate, double& t, double& theta) const {
    const double um = mu * R_ * n_mu_;
    const double un = nu * n_nu_;
    if (!interpolate) {
        const int i = std::min(static_cast<int>(um), n_mu_ - 1);
        const int j = std::min(static_cast<int>(un), n_nu_ - 1);
        t = times_[i];
        theta = angle(i, j);
        return;
    }
    const double e = specfun::erfc_inv(R_ * mu);
    t = (R_ - 1.0) * (R_ - 1.0) / (4.0 * D_ * e * e);

    // Bilinear in cell-centred coordinates, clamped at the borders.
    auto split = [](double u, int n, int& k, double& f) {
        double c = u - 0.5;
        if (c < 0.0) c = 0.0;
        if (c > n - 1) c = n - 1;
        k = std::min(static_cast<int>(c), n - 2);
        f = c - k;
    };
    int i, j;
    double fi, fj;
    split(um, n_mu_, i, fi);
    split(un, n_nu_, j, fj);
    const double a = angle(i, j) * (1 - fj) + angle(i, j + 1) * fj;
    const double b = angle(i + 1, j) * (1 - fj) + angle(i + 1, j + 1) * fj;
    theta = a * (1 - fi) + b * fi;
}

std::shared_ptr<const ReinsertionTable> shared_reinsertion_table(double R, int n_mu, int n_nu) {
    static std::mutex mtx;
    static std::map<std::tuple<double, int, int>, std::shared_ptr<const ReinsertionTable>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(R, n_mu, n_nu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto tab = std::make_shared<const ReinsertionTable>(ReinsertionTable::build(R, n_mu, n_nu, 1.0));
    cache.emplace(key, tab);
    return tab;
}

Reinsertion reinsert_or_escape(const Vec3& offset, double landing_radius, double D,
                               const ReinsertionTable& table, RandomStream& rng,
                               bool half_space, bool interpolate) {
    const double mu = rng.uniform();
    if (mu * table.ratio() >= 1.0) return {true, INFINITY, {}};

    double t, theta;
    table.lookup(mu, rng.uniform(), interpolate, t, theta);
    const double phi = 2.0 * std::numbers::pi * rng.uniform();

    const Vec3 w = normalized(offset);
    Vec3 u, v;
    orthonormal_frame(w, u, v);
    const double st = std::sin(theta);
    Vec3 p = (u * (st * std::cos(phi)) + v * (st * std::sin(phi)) + w * std::cos(theta)) * landing_radius;
    if (half_space && p.z < 0.0) p.z = -p.z;

    const double elapsed = t * landing_radius * landing_radius * table.diffusivity() / D;
    return {false, elapsed, p};
}

}  // namespace kmc
