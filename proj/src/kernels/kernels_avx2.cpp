// Compiled with -mavx2 only (no FMA), so products and sums round exactly as in
// the scalar reference.

#include <immintrin.h>

#include <algorithm>
#include <bit>

#include "perfstop/kernels.hpp"

namespace perfstop::kernels::avx2 {
namespace {

inline double combine_lanes(__m256d v) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, v);
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

MinMax minmax(std::span<const double> x) {
    const std::size_t n = x.size();
    const double* p = x.data();
    __m256d lo = _mm256_set1_pd(p[0]);
    __m256d hi = lo;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(p + i);
        lo = _mm256_min_pd(lo, v);
        hi = _mm256_max_pd(hi, v);
    }
    alignas(32) double l[4];
    alignas(32) double h[4];
    _mm256_store_pd(l, lo);
    _mm256_store_pd(h, hi);
    double rlo = std::min({l[0], l[1], l[2], l[3]});
    double rhi = std::max({h[0], h[1], h[2], h[3]});
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
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < body; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(p + i));
    double total = combine_lanes(acc);
    for (std::size_t i = body; i < n; ++i) total += p[i];
    return total;
}

Lag1Moments lag1_moments(std::span<const double> x, double mean) {
    const std::size_t n = x.size();
    const double* p = x.data();
    const std::size_t pairs = n == 0 ? 0 : n - 1;
    const std::size_t body = pairs - pairs % 4;
    const __m256d m = _mm256_set1_pd(mean);
    __m256d sq = _mm256_setzero_pd();
    __m256d cross = _mm256_setzero_pd();
    for (std::size_t i = 0; i < body; i += 4) {
        const __m256d a = _mm256_sub_pd(_mm256_loadu_pd(p + i), m);
        const __m256d b = _mm256_sub_pd(_mm256_loadu_pd(p + i + 1), m);
        sq = _mm256_add_pd(sq, _mm256_mul_pd(a, a));
        cross = _mm256_add_pd(cross, _mm256_mul_pd(a, b));
    }
    double s = combine_lanes(sq);
    double c = combine_lanes(cross);
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
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vhi = _mm256_set1_pd(hi);
    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(p + i);
        const __m256d out = _mm256_or_pd(_mm256_cmp_pd(v, vlo, _CMP_LT_OQ), _mm256_cmp_pd(v, vhi, _CMP_GT_OQ));
        count += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(out))));
    }
    for (; i < n; ++i) count += (p[i] < lo || p[i] > hi) ? 1 : 0;
    return count;
}

void histogram(std::span<const double> x, double lo, double scale, std::span<std::uint32_t> counts) {
    const std::size_t n = x.size();
    const double* p = x.data();
    const auto last = static_cast<std::int32_t>(counts.size()) - 1;
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vscale = _mm256_set1_pd(scale);
    const __m128i vlast = _mm_set1_epi32(last);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(p + i);
        const int below = _mm256_movemask_pd(_mm256_cmp_pd(v, vlo, _CMP_LT_OQ));
        const __m128i idx = _mm_min_epi32(_mm256_cvttpd_epi32(_mm256_mul_pd(_mm256_sub_pd(v, vlo), vscale)), vlast);
        alignas(16) std::int32_t lane[4];
        _mm_store_si128(reinterpret_cast<__m128i*>(lane), idx);
        for (int l = 0; l < 4; ++l) {
            if (!(below & (1 << l))) ++counts[static_cast<std::size_t>(lane[l])];
        }
    }
    for (; i < n; ++i) {
        if (p[i] < lo) continue;
        auto idx = static_cast<std::int32_t>((p[i] - lo) * scale);
        ++counts[static_cast<std::size_t>(std::min(idx, last))];
    }
}

inline std::uint64_t block_total(const std::uint32_t* p) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
    const __m256i wide = _mm256_add_epi64(_mm256_cvtepu32_epi64(_mm256_castsi256_si128(v)),
                                          _mm256_cvtepu32_epi64(_mm256_extracti128_si256(v, 1)));
    const __m128i half = _mm_add_epi64(_mm256_castsi256_si128(wide), _mm256_extracti128_si256(wide, 1));
    return static_cast<std::uint64_t>(_mm_cvtsi128_si64(half)) +
           static_cast<std::uint64_t>(_mm_extract_epi64(half, 1));
}

std::size_t select_rank(std::span<const std::uint32_t> counts, std::uint64_t rank) {
    const std::size_t n = counts.size();
    const std::uint32_t* p = counts.data();
    std::uint64_t running = 0;
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        const std::uint64_t t = block_total(p + j);
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
    Backend::Avx2, minmax, sum, lag1_moments, count_outside, histogram, select_rank,
};

}  // namespace perfstop::kernels::avx2
