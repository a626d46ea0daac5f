#include "perfstop/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "perfstop/error.hpp"
#include "perfstop/kernels.hpp"

namespace perfstop {
namespace {

void require_fraction(double v, const char* what) {
    if (!(v > 0.0 && v < 1.0)) {
        throw PreconditionError(std::string(what) + " must lie in (0, 1), got " + std::to_string(v));
    }
}

void require_non_empty(std::span<const double> v) {
    if (v.empty()) throw PreconditionError("empty series");
}

}  // namespace

double percentile_sorted(std::span<const double> sorted, double p) {
    require_non_empty(sorted);
    if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("percentile must lie in [0, 1]");
    const std::size_t n = sorted.size();
    const double h = static_cast<double>(n - 1) * p + 1.0;
    const double fl = std::floor(h);
    const auto k = static_cast<std::size_t>(fl);  // 1-based
    if (k >= n) return sorted[n - 1];
    const double lo = sorted[k - 1];
    return lo + (h - fl) * (sorted[k] - lo);
}

double percentile(const SampleSeries& series, double p) {
    require_non_empty(series.values());
    return percentile_sorted(series.sorted(), p);
}

double two_sided_z(double level) {
    require_fraction(level, "confidence level");
    static const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, (1.0 + level) / 2.0);
}

std::optional<OrderIndices> order_statistic_indices(std::size_t n, double p, double level) {
    require_fraction(p, "percentile");
    const double z = two_sided_z(level);
    const double np = static_cast<double>(n) * p;
    const double spread = z * std::sqrt(np * (1.0 - p));
    const auto l = static_cast<long>(std::floor(np - spread));
    const auto u = static_cast<long>(std::ceil(np + spread));
    if (1 <= l && l < u && u <= static_cast<long>(n)) return OrderIndices{l, u};
    return std::nullopt;
}

bool is_constant(std::span<const double> values) {
    if (values.empty()) return false;
    const auto mm = kernels::active().minmax(values);
    return mm.min == mm.max;
}

ConfidenceInterval ci_order_statistic_sorted(std::span<const double> sorted, double p, double level) {
    require_non_empty(sorted);
    require_fraction(p, "percentile");
    require_fraction(level, "confidence level");
    if (sorted.front() == sorted.back()) return ConfidenceInterval::of(p, level, sorted.front(), sorted.front());
    const auto idx = order_statistic_indices(sorted.size(), p, level);
    if (!idx) return ConfidenceInterval::none(p, level);
    return ConfidenceInterval::of(p, level, sorted[static_cast<std::size_t>(idx->lower - 1)],
                                  sorted[static_cast<std::size_t>(idx->upper - 1)]);
}

ConfidenceInterval ci_order_statistic(const SampleSeries& series, double p, double level) {
    require_non_empty(series.values());
    const auto sorted = series.sorted();
    return ci_order_statistic_sorted(sorted, p, level);
}

double lag1_autocorrelation(std::span<const double> values) {
    const auto& k = kernels::active();
    const double mean = k.sum(values) / static_cast<double>(values.size());
    const auto m = k.lag1_moments(values, mean);
    if (m.sum_sq == 0.0) return 0.0;
    return m.sum_cross / m.sum_sq;
}

std::size_t auto_block_length(const SampleSeries& series) {
    const std::size_t n = series.size();
    if (n < 4) throw PreconditionError("series too short for block selection");
    if (is_constant(series.values())) return 1;
    const double rho = std::min(std::abs(lag1_autocorrelation(series.values())), 1.0);
    const auto cap = n / 2;
    if (rho >= 1.0) return cap;
    const double raw = std::ceil(std::cbrt(static_cast<double>(n)) * (1.0 + 2.0 * rho / (1.0 - rho)));
    if (!(raw < static_cast<double>(cap))) return cap;
    return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

std::size_t histogram_bin_count(std::size_t na, std::size_t nb) {
    const auto bins = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(std::max(na, nb)))));
    return std::clamp<std::size_t>(bins, 10, 100);
}

double distribution_similarity(const SampleSeries& a, const SampleSeries& b) {
    if (a.empty() || b.empty()) throw PreconditionError("empty series");
    const auto& k = kernels::active();
    const auto ma = k.minmax(a.values());
    const auto mb = k.minmax(b.values());
    const double lo = std::min(ma.min, mb.min);
    const double hi = std::max(ma.max, mb.max);
    if (lo == hi) return 100.0;

    const std::size_t bins = histogram_bin_count(a.size(), b.size());
    const double scale = static_cast<double>(bins) / (hi - lo);
    std::vector<std::uint32_t> ca(bins, 0);
    std::vector<std::uint32_t> cb(bins, 0);
    k.histogram(a.values(), lo, scale, ca);
    k.histogram(b.values(), lo, scale, cb);

    // sum_i min(ca_i / na, cb_i / nb) scaled by na * nb stays integral, so the
    // result is exact and symmetric, and identical multisets give exactly 100.
    const auto na = static_cast<std::uint64_t>(a.size());
    const auto nb = static_cast<std::uint64_t>(b.size());
    std::uint64_t overlap = 0;
    for (std::size_t i = 0; i < bins; ++i) overlap += std::min(ca[i] * nb, cb[i] * na);
    return 100.0 * static_cast<double>(overlap) / (static_cast<double>(na) * static_cast<double>(nb));
}

double iqr_outlier_fraction(const SampleSeries& series) {
    require_non_empty(series.values());
    const auto sorted = series.sorted();
    const double q1 = percentile_sorted(sorted, 0.25);
    const double q3 = percentile_sorted(sorted, 0.75);
    const double iqr = q3 - q1;
    const std::size_t outside = kernels::active().count_outside(series.values(), q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    return static_cast<double>(outside) / static_cast<double>(series.size());
}

}  // namespace perfstop
