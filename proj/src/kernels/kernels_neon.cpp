// AArch64 Advanced SIMD variants. Two float64x2 registers stand in for the
// four-lane accumulator so the reduction order matches the scalar reference.

#include <arm_neon.h>

#include <algorithm>

#include "perfstop/kernels.hpp"

namespace perfstop::kernels::neon {
namespace {

inline double combine_lanes(float64x2_t a, float64x2_t b) {
    // a holds lanes 0,1 and b holds lanes 2,3.
    return (vgetq_lane_f64(a, 0) + vgetq_lane_f64(a, 1)) + (vgetq_lane_f64(b, 0) + vgetq_lane_f64(b, 1));
}

MinMax minmax(std::span<const double> x) {
    const std::size_t n = x.size();
    const double* p = x.data();
    float64x2_t lo = vdupq_n_f64(p[0]);
    float64x2_t hi = lo;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t v = vld1q_f64(p + i);
        lo = vminq_f64(lo, v);
        hi = vmaxq_f64(hi, v);
    }
    double rlo = std::min(vgetq_lane_f64(lo, 0), vgetq_lane_f64(lo, 1));
    double rhi = std::max(vgetq_lane_f64(hi, 0), vgetq_lane_f64(hi, 1));
    for (; i < n; ++i) {
        rlo = std::min(rlo, p[i]);
        rhi = std::max(rhi, p[i]);
    }
    return {rlo, rhi};
}

double sum(std::span<const double> x) {
    const std::size_t n = x.size();
    const std::size_t body = n - n % 4;
    const double* p = x.data();
    float64x2_t a = vdupq_n_f64(0.0);
    float64x2_t b = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < body; i += 4) {
        a = vaddq_f64(a, vld1q_f64(p + i));
        b = vaddq_f64(b, vld1q_f64(p + i + 2));
    }
    double total = combine_lanes(a, b);
    for (std::size_t i = body; i < n; ++i) total += p[i];
    return total;
}

Lag1Moments lag1_moments(std::span<const double> x, double mean) {
    const std::size_t n = x.size();
    const double* p = x.data();
    const std::size_t pairs = n == 0 ? 0 : n - 1;
    const std::size_t body = pairs - pairs % 4;
    const float64x2_t m = vdupq_n_f64(mean);
    float64x2_t sq_a = vdupq_n_f64(0.0);
    float64x2_t sq_b = vdupq_n_f64(0.0);
    float64x2_t cr_a = vdupq_n_f64(0.0);
    float64x2_t cr_b = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < body; i += 4) {
        const float64x2_t a0 = vsubq_f64(vld1q_f64(p + i), m);
        const float64x2_t a1 = vsubq_f64(vld1q_f64(p + i + 2), m);
        const float64x2_t b0 = vsubq_f64(vld1q_f64(p + i + 1), m);
        const float64x2_t b1 = vsubq_f64(vld1q_f64(p + i + 3), m);
        // vmulq + vaddq rather than vfmaq: fused rounding would diverge from scalar.
        sq_a = vaddq_f64(sq_a, vmulq_f64(a0, a0));
        sq_b = vaddq_f64(sq_b, vmulq_f64(a1, a1));
        cr_a = vaddq_f64(cr_a, vmulq_f64(a0, b0));
        cr_b = vaddq_f64(cr_b, vmulq_f64(a1, b1));
    }
    double s = combine_lanes(sq_a, sq_b);
    double c = combine_lanes(cr_a, cr_b);
    for (std::size_t i = body; i < pairs; ++i) {
        const double a = p[i] - mean;
        s += a * a;
        c += a * (p[i + 1] - mean);
    }
    if (n > 0) {
        const double last = p[n - 1] - mean;
        s += last * last;
    }
    return {s, c};
}

std::size_t count_outside(std::span<const double> x, double lo, double hi) {
    const std::size_t n = x.size();
    const double* p = x.data();
    const float64x2_t vlo = vdupq_n_f64(lo);
    const float64x2_t vhi = vdupq_n_f64(hi);
    uint64x2_t acc = vdupq_n_u64(0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t v = vld1q_f64(p + i);
        const uint64x2_t out = vorrq_u64(vcltq_f64(v, vlo), vcgtq_f64(v, vhi));
        acc = vsubq_u64(acc, vreinterpretq_u64_s64(vshrq_n_s64(vreinterpretq_s64_u64(out), 63)));
    }
    std::size_t count = static_cast<std::size_t>(vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1));
    for (; i < n; ++i) count += (p[i] < lo || p[i] > hi) ? 1 : 0;
    return count;
}

void histogram(std::span<const double> x, double lo, double scale, std::span<std::uint32_t> counts) {
    const std::size_t n = x.size();
    const double* p = x.data();
    const auto last = static_cast<std::int64_t>(counts.size()) - 1;
    const float64x2_t vlo = vdupq_n_f64(lo);
    const float64x2_t vscale = vdupq_n_f64(scale);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t v = vld1q_f64(p + i);
        const uint64x2_t below = vcltq_f64(v, vlo);
        const int64x2_t idx = vcvtq_s64_f64(vmulq_f64(vsubq_f64(v, vlo), vscale));
        if (!vgetq_lane_u64(below, 0)) ++counts[static_cast<std::size_t>(std::min(vgetq_lane_s64(idx, 0), last))];
        if (!vgetq_lane_u64(below, 1)) ++counts[static_cast<std::size_t>(std::min(vgetq_lane_s64(idx, 1), last))];
    }
    for (; i < n; ++i) {
        if (p[i] < lo) continue;
        auto idx = static_cast<std::int64_t>((p[i] - lo) * scale);
        ++counts[static_cast<std::size_t>(std::min(idx, last))];
    }
}

std::size_t select_rank(std::span<const std::uint32_t> counts, std::uint64_t rank) {
    const std::size_t n = counts.size();
    const std::uint32_t* p = counts.data();
    std::uint64_t running = 0;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const std::uint64_t t = vaddlvq_u32(vld1q_u32(p + j));
        if (running + t >= rank) break;
        running += t;
    }
    for (; j < n; ++j) {
        running += p[j];
        if (running >= rank) return j;
    }
    return n;
}

}  // namespace

extern const KernelTable table{
    Backend::Neon, minmax, sum, lag1_moments, count_outside, histogram, select_rank,
};

}  // namespace perfstop::kernels::neon
