#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "kmc/propagators.hpp"
#include "kmc/specfun.hpp"
#include "kmc/stats.hpp"

using namespace kmc;
using std::numbers::pi;

namespace {
constexpr int kSamples = 1'000'000;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double arrival_density(double t, double R, double D) {
    return (R - 1) / (2 * R * std::sqrt(pi * D) * std::pow(t, 1.5)) * std::exp(-(R - 1) * (R - 1) / (4 * D * t));
}
}  // namespace

TEST_SUITE("propagators") {

TEST_CASE("plane impact time at the median") {
    const double z0 = 1.7, D = 0.6;
    const double e = 0.47693627620446987338;
    CHECK(plane_impact_time(z0, D, 0.5) == doctest::Approx(z0 * z0 / (4 * D * e * e)).epsilon(1e-14));
}

TEST_CASE("plane impact marginals") {
    const double z0 = 0.8, D = 2.0;
    RandomStream rng(17, 0);
    std::vector<double> t(kSamples);
    double m = 0, v = 0;
    for (int i = 0; i < kSamples; ++i) {
        const PlaneImpact h = plane_impact(z0, D, rng);
        REQUIRE(h.t > 0.0);
        REQUIRE(std::isfinite(h.t));
        t[i] = h.t;
        const double zx = h.dx / std::sqrt(2 * D * h.t);
        m += zx;
        v += zx * zx;
    }
    const double ks = stats::ks_statistic(t, [&](double s) { return std::erfc(z0 / (2 * std::sqrt(D * s))); });
    CHECK(ks < 0.002);
    CHECK(std::abs(m / kSamples) < 3 / std::sqrt(double(kSamples)));
    CHECK(std::abs(v / kSamples - 1) < 3 * std::sqrt(2.0 / kSamples));
}

TEST_CASE("hemisphere table inverts the exit CDF") {
    const auto& tab = HemisphereCdfTable::instance();
    CHECK(tab.invert(specfun::hemisphere_exit_cdf(1.0)) == doctest::Approx(1.0).epsilon(1e-6));
    for (double tau : {0.05, 0.2, 0.5, 2.0, 4.0, 6.0})
        CHECK(rel(tab.invert(specfun::hemisphere_exit_cdf(tau)), tau) < 1e-6);
}

TEST_CASE("hemisphere exit marginals") {
    const double radius = 0.3, D = 1.5;
    const auto& tab = HemisphereCdfTable::instance();
    RandomStream rng(23, 4);
    std::vector<double> tau(kSamples), z(kSamples);
    double mean_tau = 0;
    for (int i = 0; i < kSamples; ++i) {
        const HemisphereExit e = hemisphere_exit(radius, D, tab, rng);
        REQUIRE(e.t > 0.0);
        REQUIRE(std::isfinite(e.t));
        REQUIRE(norm(e.offset) == doctest::Approx(radius).epsilon(1e-12));
        REQUIRE(e.offset.z >= 0.0);
        tau[i] = pi * pi * D * e.t / (radius * radius);
        z[i] = e.offset.z / radius;
        mean_tau += tau[i];
    }
    CHECK(stats::ks_statistic(tau, specfun::hemisphere_exit_cdf) < 0.002);
    CHECK(stats::ks_statistic(z, [](double s) { return s; }) < 0.002);
    // Integral of tau dF_T, evaluated independently with 40-digit arithmetic.
    CHECK(mean_tau / kSamples == doctest::Approx(1.6449340668482264365).epsilon(0.01));
}

TEST_CASE("chi_n against frozen high-precision values") {
    CHECK(chi_n(0, 1.0, 3.0, 1.0) == doctest::Approx(0.069184582903451392).epsilon(1e-10));
    CHECK(chi_n(1, 1.0, 3.0, 1.0) == doctest::Approx(0.043940376229753213).epsilon(1e-9));
    CHECK(chi_n(2, 1.0, 3.0, 1.0) == doctest::Approx(0.018299980898153621).epsilon(1e-9));
    CHECK(chi_n(3, 10.0, 3.0, 1.0) == doctest::Approx(1.5333912168138647e-6).epsilon(1e-8));
    CHECK(chi_n(1, 100.0, 3.0, 1.0) == doctest::Approx(3.9190638173215522e-6).epsilon(1e-8));
}

TEST_CASE("chi_0 equals the sphere arrival density") {
    for (double R : {1.5, 3.0, 6.0})
        for (double t : {0.05, 0.1, 0.3, 1.0, 10.0, 300.0}) {
            const double exact = arrival_density(t, R, 1.0);
            CHECK(rel(sphere_arrival_density(t, R, 1.0), exact) < 1e-12);
            if ((R - 1) * (R - 1) / (4 * t) <= 10) {
                CHECK(rel(chi_n(0, t, R, 1.0), exact) < 1e-10);
                CHECK(rel(chi_n_hairpin(0, t, R, 1.0), exact) < 1e-8);
            } else {
                CHECK(std::abs(chi_n(0, t, R, 1.0) - exact) < 1e-12);
                CHECK(std::abs(chi_n_hairpin(0, t, R, 1.0) - exact) < 1e-12);
            }
        }
    CHECK(rel(chi_n(0, 2.0, 3.0, 0.5), arrival_density(2.0, 3.0, 0.5)) < 1e-10);
}

TEST_CASE("Talbot and hairpin routes agree") {
    CHECK(std::abs(chi_n(2, 1.0, 3.0, 1.0) - chi_n_hairpin(2, 1.0, 3.0, 1.0)) < 1e-8);
    for (int n = 1; n <= 6; ++n)
        for (double t : {0.1, 1.0, 10.0}) CHECK(std::abs(chi_n(n, t, 3.0, 1.0) - chi_n_hairpin(n, t, 3.0, 1.0)) < 1e-7);
    const auto seq = chi_sequence(6, 1.0, 3.0, 1.0);
    REQUIRE(seq.size() == 6);
    for (int n = 1; n <= 6; ++n) CHECK(seq[n - 1] == doctest::Approx(chi_n(n, 1.0, 3.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("chi_n large-time asymptote") {
    const double R = 3.0, D = 1.0, t = 100.0;
    const double want = D * R * (1 - std::pow(R, -3.0)) / (8 * std::tgamma(1.5)) * std::pow(D * t, -2.5);
    CHECK(chi_n_asymptotic(1, t, R, D) == doctest::Approx(want).epsilon(1e-12));
    CHECK(rel(chi_n(1, t, R, D), chi_n_asymptotic(1, t, R, D)) < 0.05);
}

TEST_CASE("polar angle CDF") {
    for (double t : {0.05, 0.5, 5.0, 50.0}) {
        const auto s = angular_series(t, 3.0, 1.0);
        CHECK(s.converged);
        CHECK(std::abs(polar_angle_cdf(0.0, s)) < 1e-12);
        CHECK(polar_angle_cdf(pi, s) == doctest::Approx(1.0).epsilon(1e-12));
        double prev = 0;
        for (int i = 0; i <= 400; ++i) {
            const double f = polar_angle_cdf(pi * i / 400, s);
            CHECK(f >= prev - 1e-7);
            prev = f;
        }
    }
    const auto late = angular_series(1e5, 3.0, 1.0);
    for (double th : {0.3, 1.0, 2.0}) CHECK(polar_angle_cdf(th, late) == doctest::Approx(0.5 * (1 - std::cos(th))).epsilon(1e-4));
    const auto early = angular_series(0.05, 3.0, 1.0);
    AngularSeries hp = early;
    const double J = arrival_density(0.05, 3.0, 1.0);
    for (std::size_t n = 1; n <= hp.coeff.size(); ++n) hp.coeff[n - 1] = chi_n_hairpin(int(n), 0.05, 3.0, 1.0) / J;
    for (double th : {0.1, 0.2, 0.5, 1.0}) CHECK(polar_angle_cdf(th, early) == doctest::Approx(polar_angle_cdf(th, hp)).epsilon(1e-6));
    CHECK(polar_angle_cdf(0.5, early) > 0.95);
}

TEST_CASE("reinsertion table structure") {
    const double R = 3.0;
    const auto tab = ReinsertionTable::build(R, 64, 64);
    CHECK(tab.unconverged_rows() == 0);
    for (int i = 0; i < tab.n_mu(); ++i) {
        if (i > 0) CHECK(tab.time(i) > tab.time(i - 1));
        for (int j = 1; j < tab.n_nu(); ++j) CHECK(tab.angle(i, j) >= tab.angle(i, j - 1));
    }
    CHECK(tab.time(0) < 0.5);
    CHECK(tab.angle(0, tab.n_nu() / 2) < 0.5);
    // Near mu = 1/R the sojourn is long and the angle is uniform on the sphere.
    const auto last = ReinsertionTable::build(R, 4000, 32);
    const int i = last.n_mu() - 1;
    CHECK(last.time(i) > 1e3);
    for (int j = 0; j < last.n_nu(); ++j)
        CHECK(last.angle(i, j) == doctest::Approx(std::acos(1 - 2 * last.nu(j))).epsilon(1e-3));
    // Time entries solve the sphere arrival CDF erfc((R-1)/(2 sqrt(Dt)))/R = mu.
    for (int k = 0; k < tab.n_mu(); k += 7)
        CHECK(std::erfc((R - 1) / (2 * std::sqrt(tab.time(k)))) / R == doctest::Approx(tab.mu(k)).epsilon(1e-10));
}

TEST_CASE("reinsertion table save and load round trip") {
    const auto tab = ReinsertionTable::build(2.0, 20, 24);
    const std::string path = "reinsertion_roundtrip.bin";
    tab.save(path);
    const auto back = ReinsertionTable::load(path);
    CHECK(back.ratio() == tab.ratio());
    CHECK(back.n_mu() == 20);
    CHECK(back.n_nu() == 24);
    for (int i = 0; i < 20; ++i) {
        CHECK(back.time(i) == tab.time(i));
        for (int j = 0; j < 24; ++j) CHECK(back.angle(i, j) == tab.angle(i, j));
    }
    std::remove(path.c_str());
}

TEST_CASE("reinsertion escape probability and landing") {
    const double R = 3.0, landing = 0.7, D = 1.3;
    const auto tab = shared_reinsertion_table(R);
    RandomStream rng(31, 2);
    int escapes = 0;
    for (int i = 0; i < kSamples; ++i) {
        const Vec3 offset{0.2 * landing * R, -0.3 * landing * R, std::sqrt(1 - 0.13) * landing * R};
        const Reinsertion r = reinsert_or_escape(offset, landing, D, *tab, rng, i % 2 == 0);
        if (r.escaped) {
            ++escapes;
            continue;
        }
        REQUIRE(r.t > 0.0);
        REQUIRE(std::isfinite(r.t));
        REQUIRE(norm(r.landing) == doctest::Approx(landing).epsilon(1e-12));
        if (i % 2 == 0) REQUIRE(r.landing.z >= 0.0);
    }
    const double p = 1 - 1 / R;
    CHECK(std::abs(double(escapes) / kSamples - p) < 3 * std::sqrt(p * (1 - p) / kSamples));
}

TEST_CASE("reinsertion time follows the sphere arrival CDF") {
    const double R = 3.0, D = 1.0;
    const auto tab = shared_reinsertion_table(R);
    RandomStream rng(8, 8);
    std::vector<double> t;
    for (int i = 0; i < 300000; ++i) {
        const Reinsertion r = reinsert_or_escape({0, 0, R}, 1.0, D, *tab, rng, false, true);
        if (!r.escaped) t.push_back(r.t);
    }
    const double ks = stats::ks_statistic(t, [&](double s) { return std::erfc((R - 1) / (2 * std::sqrt(D * s))); });
    CHECK(ks < 4.0 / std::sqrt(double(t.size())));
}

}
