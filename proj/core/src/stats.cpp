#include "kmc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "kmc/errors.hpp"
#include "kmc/random.hpp"

namespace kmc::stats {

LogHistogram make_log_histogram(double t_min, double t_max, int n_bins) {
    if (!(t_min > 0.0) || !(t_max > t_min)) throw DomainError("log_histogram: need 0 < t_min < t_max");
    if (n_bins < 1) throw DomainError("log_histogram: need at least one bin");
    LogHistogram h;
    const double l0 = std::log10(t_min), l1 = std::log10(t_max);
    h.edges.resize(n_bins + 1);
    for (int i = 0; i <= n_bins; ++i) h.edges[i] = std::pow(10.0, l0 + (l1 - l0) * i / n_bins);
    h.edges.front() = t_min;
    h.edges.back() = t_max;
    h.counts.assign(n_bins, 0);
    return h;
}

int LogHistogram::bin_of(double t) const {
    const int n = n_bins();
    if (!(t >= edges.front())) return -1;
    if (t >= edges.back()) return n;
    const double l0 = std::log10(edges.front()), l1 = std::log10(edges.back());
    int i = static_cast<int>((std::log10(t) - l0) / (l1 - l0) * n);
    i = std::clamp(i, 0, n - 1);
    while (i > 0 && t < edges[i]) --i;
    while (i < n - 1 && t >= edges[i + 1]) ++i;
    return i;
}

void LogHistogram::add(double t) {
    const int i = bin_of(t);
    if (i < 0) ++underflow;
    else if (i >= n_bins()) ++overflow;
    else ++counts[i];
}

void LogHistogram::merge(const LogHistogram& o) {
    if (o.edges != edges) throw DomainError("LogHistogram::merge: edges differ");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    underflow += o.underflow;
    overflow += o.overflow;
}

std::uint64_t LogHistogram::in_range() const {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
}

LogHistogram log_histogram(const std::vector<double>& times, double t_min, double t_max, int n_bins) {
    LogHistogram h = make_log_histogram(t_min, t_max, n_bins);
    for (double t : times) h.add(t);
    return h;
}

namespace {
Estimate summarize(const std::vector<double>& reps, double mean) {
    double m = 0.0;
    for (double r : reps) m += r;
    m /= reps.size();
    double v = 0.0;
    for (double r : reps) v += (r - m) * (r - m);
    v /= (reps.size() - 1);
    return {mean, std::sqrt(v)};
}
}  // namespace

Estimate bootstrap(const std::vector<double>& values, int replications, std::uint64_t seed) {
    if (values.empty()) throw DomainError("bootstrap: empty sample");
    if (replications < 2) throw DomainError("bootstrap: need at least 2 replications");
    const std::size_t n = values.size();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;

    std::vector<double> reps(replications);
    for (int r = 0; r < replications; ++r) {
        RandomStream rng(seed, static_cast<std::uint64_t>(r));
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += values[static_cast<std::size_t>(rng.uniform() * n)];
        reps[r] = s / n;
    }
    return summarize(reps, mean);
}

Estimate bootstrap_binary(std::uint64_t ones, std::uint64_t M, int replications, std::uint64_t seed) {
    if (M == 0) throw DomainError("bootstrap: empty sample");
    if (ones > M) throw DomainError("bootstrap: more ones than samples");
    if (replications < 2) throw DomainError("bootstrap: need at least 2 replications");
    const double p = static_cast<double>(ones) / M;
    std::vector<double> reps(replications);
    for (int r = 0; r < replications; ++r) {
        RandomStream rng(seed, static_cast<std::uint64_t>(r));
        std::binomial_distribution<std::uint64_t> bin(M, p);
        reps[r] = static_cast<double>(bin(rng)) / M;
    }
    return summarize(reps, p);
}

double coefficient_of_variation(double p, std::uint64_t M) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("coefficient_of_variation: p must lie in (0, 1]");
    if (M == 0) throw DomainError("coefficient_of_variation: M must be positive");
    return std::sqrt((1.0 - p) / (p * static_cast<double>(M)));
}

std::vector<double> empirical_cdf(std::vector<double> times, const std::vector<double>& grid, std::uint64_t M) {
    if (M == 0) throw DomainError("empirical_cdf: M must be positive");
    std::sort(times.begin(), times.end());
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto c = std::upper_bound(times.begin(), times.end(), grid[i]) - times.begin();
        out[i] = static_cast<double>(c) / static_cast<double>(M);
    }
    return out;
}

double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
    if (x.empty()) throw DomainError("ks_statistic: empty sample");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double F = cdf(x[i]);
        d = std::max({d, F - i / n, (i + 1) / n - F});
    }
    return d;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_slope: need matching samples");
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log10(x[i]), ly = std::log10(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace kmc::stats
