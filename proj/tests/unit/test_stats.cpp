#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "kmc/random.hpp"
#include "kmc/stats.hpp"

using namespace kmc;
using namespace kmc::stats;

TEST_SUITE("stats") {

TEST_CASE("log histogram binning") {
    const auto h = log_histogram({1.0}, 0.1, 10.0, 2);
    CHECK(h.counts[0] == 0);
    CHECK(h.counts[1] == 1);
    const auto e = log_histogram({}, 1e-3, 1e3, 12);
    for (auto c : e.counts) CHECK(c == 0);
    CHECK(e.edges.size() == 13);
    CHECK(e.edges[6] == doctest::Approx(1.0));
    const auto o = log_histogram({1e-5, 1e5, 10.0}, 1e-3, 1e3, 6);
    CHECK(o.underflow == 1);
    CHECK(o.overflow == 1);
    CHECK(o.in_range() == 1);
}

TEST_CASE("histogram counts are permutation invariant and merge") {
    RandomStream rng(2, 0);
    std::vector<double> t(5000);
    for (auto& x : t) x = std::exp(8 * rng.normal());
    const auto a = log_histogram(t, 1e-4, 1e4, 40);
    std::shuffle(t.begin(), t.end(), rng);
    const auto b = log_histogram(t, 1e-4, 1e4, 40);
    CHECK(a.counts == b.counts);
    auto lo = log_histogram(std::vector<double>(t.begin(), t.begin() + 1234), 1e-4, 1e4, 40);
    const auto hi = log_histogram(std::vector<double>(t.begin() + 1234, t.end()), 1e-4, 1e4, 40);
    lo.merge(hi);
    CHECK(lo.counts == a.counts);
    CHECK(lo.underflow == a.underflow);
    CHECK(lo.overflow == a.overflow);
}

TEST_CASE("bootstrap") {
    CHECK(bootstrap(std::vector<double>(100, 1.0), 200, 1).stderr_ == 0.0);
    std::vector<double> v(10000);
    for (int i = 0; i < 10000; ++i) v[i] = i < 5000 ? 1.0 : 0.0;
    const auto b = bootstrap(v, 400, 3);
    CHECK(b.mean == doctest::Approx(0.5));
    CHECK(b.stderr_ == doctest::Approx(0.005).epsilon(0.2));
    const auto bb = bootstrap_binary(5000, 10000, 400, 3);
    CHECK(bb.stderr_ == doctest::Approx(0.005).epsilon(0.2));
    CHECK(bootstrap_binary(7, 7, 50, 1).stderr_ == 0.0);
}

TEST_CASE("bootstrap error scales as M^-1/2") {
    std::vector<double> m, se;
    for (std::uint64_t M : {10000ull, 100000ull, 1000000ull, 10000000ull}) {
        m.push_back(double(M));
        se.push_back(bootstrap_binary(M / 7, M, 400, M).stderr_);
    }
    CHECK(loglog_slope(m, se) == doctest::Approx(-0.5).epsilon(0.2));
}

TEST_CASE("coefficient of variation") {
    CHECK(coefficient_of_variation(0.5, 2) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(coefficient_of_variation(0.5, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(coefficient_of_variation(1.0, 100) == 0.0);
    CHECK(coefficient_of_variation(2.0 / (5 * std::numbers::pi), 1000000) == doctest::Approx(2.56e-3).epsilon(2e-3));
}

TEST_CASE("empirical cdf") {
    const std::vector<double> t = {3.0, 1.0, 2.0, 5.0};
    const auto F = empirical_cdf(t, {0.0, 1.0, 2.5, 100.0}, 10);
    CHECK(F[0] == 0.0);
    CHECK(F[1] == doctest::Approx(0.1));
    CHECK(F[2] == doctest::Approx(0.2));
    CHECK(F[3] == doctest::Approx(0.4));
    RandomStream rng(4, 4);
    std::vector<double> s(1000), g;
    for (auto& x : s) x = rng.uniform();
    for (int i = 0; i <= 50; ++i) g.push_back(i / 40.0);
    const auto G = empirical_cdf(s, g, 1000);
    for (std::size_t i = 1; i < G.size(); ++i) CHECK(G[i] >= G[i - 1]);
    CHECK(G.back() <= 1.0);
}

TEST_CASE("ks statistic and log-log slope") {
    CHECK(ks_statistic({0.5}, [](double x) { return x; }) == doctest::Approx(0.5));
    CHECK(loglog_slope({1, 10, 100}, {5, 0.5, 0.05}) == doctest::Approx(-1.0));
}

}
