#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "perfstop/series.hpp"

namespace perfstop {

// Interval for one percentile at one confidence level. `lower`/`upper` are
// only meaningful when `computable` is true.
struct ConfidenceInterval {
    double percentile = 0.5;
    double level = 0.95;
    double lower = 0.0;
    double upper = 0.0;
    bool computable = false;

    static ConfidenceInterval none(double p, double level) { return {p, level, 0.0, 0.0, false}; }
    static ConfidenceInterval of(double p, double level, double lo, double hi) { return {p, level, lo, hi, true}; }

    bool contains(double v) const noexcept { return computable && lower <= v && v <= upper; }
    bool operator==(const ConfidenceInterval&) const = default;
};

// Linear-interpolation percentile: with sorted v[1..n], h = (n-1)p + 1,
// result = v[floor h] + (h - floor h)(v[floor h + 1] - v[floor h]).
double percentile(const SampleSeries& series, double p);
// Same, on data already sorted ascending.
double percentile_sorted(std::span<const double> sorted, double p);

// Standard-normal quantile at (1 + level) / 2.
double two_sided_z(double level);

// 1-based order-statistic indices (l, u) for the distribution-free percentile CI:
//   l = floor(np - z sqrt(np(1-p))),  u = ceil(np + z sqrt(np(1-p))).
// Empty when 1 <= l < u <= n does not hold.
struct OrderIndices {
    long lower;
    long upper;
};
std::optional<OrderIndices> order_statistic_indices(std::size_t n, double p, double level);

// True when every value equals the first (includes n == 1).
bool is_constant(std::span<const double> values);

// Distribution-free CI [v[l], v[u]] from the sorted sample. A constant series
// yields the degenerate interval [c, c] at any n, since every order statistic
// equals c whichever indices are chosen.
ConfidenceInterval ci_order_statistic(const SampleSeries& series, double p, double level);
ConfidenceInterval ci_order_statistic_sorted(std::span<const double> sorted, double p, double level);

// Block length for the moving-block bootstrap:
//   clamp(ceil(n^(1/3) (1 + 2|rho1| / (1 - |rho1|))), 1, floor(n/2)),
// rho1 the lag-1 sample autocorrelation. Constant series give 1.
// Requires at least 4 observations.
std::size_t auto_block_length(const SampleSeries& series);
double lag1_autocorrelation(std::span<const double> values);

// Shared-grid histogram overlap, 100 * sum_i min(p_i, q_i), in [0, 100].
// Bins span min..max of both series; bin count from histogram_bin_count.
double distribution_similarity(const SampleSeries& a, const SampleSeries& b);
// ceil(sqrt(max(na, nb))) clamped to [10, 100].
std::size_t histogram_bin_count(std::size_t na, std::size_t nb);

// Fraction of values outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR].
double iqr_outlier_fraction(const SampleSeries& series);

}  // namespace perfstop
