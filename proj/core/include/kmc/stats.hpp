#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace kmc::stats {

struct LogHistogram {
    std::vector<double> edges;  // n_bins + 1, uniform in log10
    std::vector<std::uint64_t> counts;
    std::uint64_t underflow = 0;
    std::uint64_t overflow = 0;

    int n_bins() const { return static_cast<int>(counts.size()); }
    // Bin index of t, -1 below range, n_bins() at or above the top edge.
    int bin_of(double t) const;
    void add(double t);
    void merge(const LogHistogram& other);
    std::uint64_t in_range() const;
};

LogHistogram make_log_histogram(double t_min, double t_max, int n_bins);
LogHistogram log_histogram(const std::vector<double>& times, double t_min, double t_max, int n_bins);

struct Estimate {
    double mean;
    double stderr_;
};

// Resampling with replacement; the standard error is the standard deviation
// of the replicate means.
Estimate bootstrap(const std::vector<double>& values, int replications, std::uint64_t seed);
// Same resampling for 0/1 indicators given only the count of ones: the
// number of ones in a resample is Binomial(M, ones/M).
Estimate bootstrap_binary(std::uint64_t ones, std::uint64_t M, int replications, std::uint64_t seed);

double coefficient_of_variation(double p, std::uint64_t M);

// Fraction of M with time <= grid[i].
std::vector<double> empirical_cdf(std::vector<double> times, const std::vector<double>& grid, std::uint64_t M);

// sup |F_n - F| for samples against a continuous CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Least-squares slope of log10(y) against log10(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kmc::stats
