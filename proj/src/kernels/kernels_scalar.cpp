#include <algorithm>

#include "perfstop/kernels.hpp"

namespace perfstop::kernels::scalar {
namespace {

MinMax minmax(std::span<const double> x) {
    double lo = x[0];
    double hi = x[0];
    for (double v : x) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

double sum(std::span<const double> x) {
    const std::size_t n = x.size();
    const std::size_t body = n - n % 4;
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < body; i += 4) {
        for (std::size_t l = 0; l < 4; ++l) lane[l] += x[i + l];
    }
    double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = body; i < n; ++i) total += x[i];
    return total;
}

Lag1Moments lag1_moments(std::span<const double> x, double mean) {
    const std::size_t n = x.size();
    double sq[4] = {0.0, 0.0, 0.0, 0.0};
    double cross[4] = {0.0, 0.0, 0.0, 0.0};
    // Pairs (i, i+1) exist for i < n-1; squares for i < n.
    const std::size_t pairs = n == 0 ? 0 : n - 1;
    const std::size_t body = pairs - pairs % 4;
    for (std::size_t i = 0; i < body; i += 4) {
        for (std::size_t l = 0; l < 4; ++l) {
            const double a = x[i + l] - mean;
            const double b = x[i + l + 1] - mean;
            sq[l] += a * a;
            cross[l] += a * b;
        }
    }
    double s = (sq[0] + sq[1]) + (sq[2] + sq[3]);
    double c = (cross[0] + cross[1]) + (cross[2] + cross[3]);
    for (std::size_t i = body; i < pairs; ++i) {
        const double a = x[i] - mean;
        s += a * a;
        c += a * (x[i + 1] - mean);
    }
    if (n > 0) {
        const double last = x[n - 1] - mean;
        s += last * last;
    }
    return {s, c};
}

std::size_t count_outside(std::span<const double> x, double lo, double hi) {
    std::size_t count = 0;
    for (double v : x) count += (v < lo || v > hi) ? 1 : 0;
    return count;
}

void histogram(std::span<const double> x, double lo, double scale, std::span<std::uint32_t> counts) {
    const auto last = static_cast<std::int32_t>(counts.size()) - 1;
    for (double v : x) {
        if (v < lo) continue;
        auto idx = static_cast<std::int32_t>((v - lo) * scale);
        ++counts[static_cast<std::size_t>(std::min(idx, last))];
    }
}

std::size_t select_rank(std::span<const std::uint32_t> counts, std::uint64_t rank) {
    std::uint64_t running = 0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        running += counts[j];
        if (running >= rank) return j;
    }
    return counts.size();
}

}  // namespace

const KernelTable table{
    Backend::Scalar, minmax, sum, lag1_moments, count_outside, histogram, select_rank,
};

}  // namespace perfstop::kernels::scalar
