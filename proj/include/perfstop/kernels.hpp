#pragma once

// Data-parallel inner loops used by the statistics code.
//
// Every kernel has a scalar reference implementation and optional SIMD
// variants (AVX2 on x86-64, NEON on AArch64). The variant is picked once at
// startup from the CPU's capabilities; set PERFSTOP_KERNELS=scalar in the
// environment to force the reference path.
//
// All variants return bit-identical results. Integer-valued kernels are exact
// by construction. The floating-point reductions accumulate in four
// interleaved lanes (element i goes to lane i % 4) that are combined as
// (l0 + l1) + (l2 + l3), followed by the scalar tail; the scalar reference
// follows the same order so that results do not depend on the backend.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace perfstop::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b) noexcept;

struct MinMax {
    double min;
    double max;
};

struct Lag1Moments {
    double sum_sq;     // sum of (x_i - mean)^2
    double sum_cross;  // sum of (x_i - mean)(x_{i+1} - mean)
};

struct KernelTable {
    Backend backend;

    // Precondition: non-empty.
    MinMax (*minmax)(std::span<const double> x);
    double (*sum)(std::span<const double> x);
    Lag1Moments (*lag1_moments)(std::span<const double> x, double mean);
    // Number of values strictly below `lo` or strictly above `hi`.
    std::size_t (*count_outside)(std::span<const double> x, double lo, double hi);
    // counts[min(bins-1, trunc((x - lo) * scale))] += 1 for every x >= lo.
    void (*histogram)(std::span<const double> x, double lo, double scale, std::span<std::uint32_t> counts);
    // Smallest index j with counts[0] + ... + counts[j] >= rank (rank >= 1).
    // Returns counts.size() when the total is below rank.
    std::size_t (*select_rank)(std::span<const std::uint32_t> counts, std::uint64_t rank);
};

// The table selected for this process.
const KernelTable& active() noexcept;

// A specific backend, if compiled in and supported by the running CPU.
const KernelTable* table_for(Backend b) noexcept;

std::vector<Backend> available_backends();

namespace scalar {
extern const KernelTable table;
}

}  // namespace perfstop::kernels
