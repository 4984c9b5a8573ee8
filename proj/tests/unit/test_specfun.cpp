#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "kmc/errors.hpp"
#include "kmc/specfun.hpp"

using namespace kmc::specfun;
using std::numbers::pi;

namespace {

// k_n(x) = (pi/2) e^{-x} sum_k (n+k)!/(k!(n-k)!) (2x)^{-k}, via k_{n+1} = k_{n-1} + (2n+1)/x k_n.
cplx kn_recurrence(int n, cplx x) {
    cplx km = (pi / 2.0) * std::exp(-x) / x;
    if (n == 0) return km;
    cplx k = (pi / 2.0) * std::exp(-x) * (1.0 / x + 1.0 / (x * x));
    for (int m = 1; m < n; ++m) {
        const cplx next = km + (2.0 * m + 1.0) / x * k;
        km = k;
        k = next;
    }
    return k;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_SUITE("specfun") {

TEST_CASE("erfc_inv reference values") {
    CHECK(erfc_inv(1.0) == 0.0);
    CHECK(erfc_inv(0.5) == doctest::Approx(0.47693627620446987338).epsilon(1e-15));
    CHECK(erfc_inv(1.5) == doctest::Approx(-0.47693627620446987338).epsilon(1e-15));
    const std::vector<std::pair<double, double>> ref = {
        {1e-300, 26.209469960516123886}, {1e-20, 6.6015806223551425615}, {1e-6, 3.4589107372795000222},
        {0.01, 1.821386367718449673},    {0.3, 0.73286907795921685222},  {1.2, -0.17914345462129167649},
        {1.999, -2.3267537655135246706}};
    for (auto [y, x] : ref) CHECK(rel(erfc_inv(y), x) < 1e-14);
}

TEST_CASE("erfc_inv round trip") {
    for (double e = -6; e <= 0; e += 0.05) {
        const double y = std::pow(10.0, e);
        CHECK(std::abs(std::erfc(erfc_inv(y)) - y) <= 1e-13 * y + 1e-300);
        const double y2 = 2.0 - y * (1.0 - 1e-9);
        CHECK(std::abs(std::erfc(erfc_inv(y2)) - y2) <= 1e-13);
    }
}

TEST_CASE("erfc_inv rejects arguments outside (0, 2)") {
    CHECK_THROWS_AS(erfc_inv(0.0), kmc::DomainError);
    CHECK_THROWS_AS(erfc_inv(2.0), kmc::DomainError);
    CHECK_THROWS_AS(erfc_inv(std::nan("")), kmc::DomainError);
}

TEST_CASE("erfcx reference values") {
    const std::vector<std::pair<double, double>> ref = {{-3.0, 16205.988853999586625},
                                                        {0.5, 0.61569034419292587487},
                                                        {5.0, 0.11070463773306862637},
                                                        {30.0, 0.018795888861416751497},
                                                        {100.0, 0.0056416137829894329036}};
    for (auto [x, v] : ref) CHECK(rel(erfcx(x), v) < 1e-13);
}

TEST_CASE("hemisphere exit CDF reference values") {
    const std::vector<std::pair<double, double>> ref = {{0.1, 2.1568408835298164863e-10},
                                                        {0.5, 0.036054756335124905614},
                                                        {1.0, 0.30062580086898437299},
                                                        {2.0, 0.7300003283226454788},
                                                        {5.0, 0.98652411012413631063}};
    for (auto [tau, v] : ref) CHECK(rel(hemisphere_exit_cdf(tau), v) < 1e-12);
    CHECK(std::abs(hemisphere_exit_cdf(50.0) - (1.0 - 2.0 * std::exp(-50.0))) < 1e-15);
    CHECK(hemisphere_exit_cdf(1e-3) == 0.0);
}

TEST_CASE("hemisphere exit CDF branches agree on [0.25, 4]") {
    CHECK(std::abs(hemisphere_exit_cdf_large_tau(1.0) - hemisphere_exit_cdf_small_tau(1.0)) < 1e-12);
    for (double tau = 0.25; tau <= 4.0; tau += 0.01)
        CHECK(std::abs(hemisphere_exit_cdf_large_tau(tau) - hemisphere_exit_cdf_small_tau(tau)) < 1e-12);
}

TEST_CASE("hemisphere exit CDF is monotone and its pdf is its derivative") {
    double prev = 0.0;
    for (double lt = -3.0; lt <= 2.0; lt += 0.001) {
        const double f = hemisphere_exit_cdf(std::pow(10.0, lt));
        CHECK(f >= prev);
        prev = f;
    }
    for (double tau : {0.2, 0.7, 1.0, 3.0}) {
        const double h = 1e-5 * tau;
        const double fd = (hemisphere_exit_cdf(tau + h) - hemisphere_exit_cdf(tau - h)) / (2 * h);
        CHECK(rel(hemisphere_exit_pdf(tau), fd) < 1e-6);
    }
}

TEST_CASE("legendre sequence") {
    for (double v : legendre_sequence(1.0, 5)) CHECK(v == 1.0);
    const auto p0 = legendre_sequence(0.0, 2);
    CHECK(p0[0] == 1.0);
    CHECK(p0[1] == 0.0);
    CHECK(p0[2] == doctest::Approx(-0.5).epsilon(1e-15));
    const double x = 0.5;
    CHECK(legendre_sequence(x, 3)[3] == doctest::Approx((5 * x * x * x - 3 * x) / 2).epsilon(1e-15));
}

TEST_CASE("kn_ratio closed forms and recurrence oracle") {
    for (cplx a : {cplx(1.0, 0.0), cplx(0.3, 2.0), cplx(7.0, -1.0)})
        CHECK(std::abs(kn_ratio(0, a, 2.0) - std::exp(-a) / 2.0) <= 1e-15 * std::abs(std::exp(-a)));
    CHECK(std::abs(kn_ratio(1, 1.0, 2.0) - 0.75 * std::exp(-1.0) / 2.0) < 1e-15);
    const cplx a(10.0, 5.0);
    const cplx want = kn_recurrence(3, a * 3.0) / kn_recurrence(3, a);
    CHECK(std::abs(kn_ratio(3, a, 3.0) - want) <= 1e-12 * std::abs(want));
    CHECK(std::abs(kn_ratio(3, a, 3.0) - cplx(-4.5881123304805491554e-10, 2.1241646473839536037e-10)) <=
          1e-12 * std::abs(want));
    CHECK(std::abs(kn_ratio(5, 0.3, 3.0) - 0.0013183232411758190488) < 1e-15);
    const cplx w8(0.030917341750990832808, -0.000055519880845515889155);
    CHECK(std::abs(kn_ratio(8, cplx(0.01, 2.0), 1.5) - w8) <= 1e-12 * std::abs(w8));
}

TEST_CASE("spherical Bessel functions") {
    auto [j0, y0] = sph_bessel_jy(0, pi);
    CHECK(std::abs(j0) < 1e-15);
    CHECK(y0 == doctest::Approx(1.0 / pi).epsilon(1e-14));
    auto [j1, y1] = sph_bessel_jy(1, 1.0);
    CHECK(j1 == doctest::Approx(std::sin(1.0) - std::cos(1.0)).epsilon(1e-14));
    CHECK(j1 == doctest::Approx(0.30116867893975678925).epsilon(1e-14));
    CHECK(y1 == doctest::Approx(-1.3817732906760362241).epsilon(1e-14));
    const struct { int n; double w, j, y; } ref[] = {
        {5, 0.1, 9.6163102329164460441e-10, -945525187.56252606769},
        {10, 3.0, 3.5260038931752563332e-6, -4699.8591888113912008},
        {20, 50.0, -0.015785029898269297655, 0.013759531302541216098},
        {3, 7.5, -0.061713285074059748004, 0.12704667901360376358}};
    for (const auto& r : ref) {
        auto [j, y] = sph_bessel_jy(r.n, r.w);
        CHECK(rel(j, r.j) < 1e-12);
        CHECK(rel(y, r.y) < 1e-12);
    }
    // Wronskian j_n y_n' - j_n' y_n = 1/w^2 with f_n' = f_{n-1} - (n+1)/w f_n.
    for (double w : {0.1, 1.0, 12.0}) {
        const int n = 5;
        auto [jn, yn] = sph_bessel_jy(n, w);
        auto [jm, ym] = sph_bessel_jy(n - 1, w);
        const double jd = jm - (n + 1) / w * jn, yd = ym - (n + 1) / w * yn;
        CHECK((jn * yd - jd * yn) * w * w == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("Talbot inversion of known transforms") {
    for (double t : {0.1, 1.0, 10.0}) {
        CHECK(rel(talbot_invert([](cplx s) { return 1.0 / s; }, t), 1.0) < 1e-10);
        CHECK(rel(talbot_invert([](cplx s) { return 1.0 / (s * s); }, t), t) < 1e-10);
        const double want = std::exp(-1.0 / (4 * t)) / (2 * std::sqrt(pi) * std::pow(t, 1.5));
        CHECK(rel(talbot_invert([](cplx s) { return std::exp(-std::sqrt(s)); }, t), want) < 1e-10);
    }
    CHECK(std::abs(talbot_invert([](cplx s) { return 1.0 / s; }, 1.0) - 1.0) < 1e-12);
    // The default 24 nodes leave about 5e-12 on the double pole.
    CHECK(std::abs(talbot_invert([](cplx s) { return 1.0 / (s * s); }, 2.0) - 2.0) < 1e-11);
    CHECK(std::abs(talbot_invert([](cplx s) { return 1.0 / (s * s); }, 2.0, 32) - 2.0) < 1e-12);
    CHECK(talbot_invert([](cplx s) { return std::exp(-std::sqrt(s)); }, 1.0) ==
          doctest::Approx(0.21969564473386119852).epsilon(1e-12));
    CHECK_THROWS_AS(make_talbot_contour(1.0, 7), kmc::DomainError);
}

}
