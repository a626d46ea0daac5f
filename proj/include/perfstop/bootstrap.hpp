#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "perfstop/series.hpp"
#include "perfstop/stats.hpp"

namespace perfstop {

struct BootstrapConfig {
    std::size_t resamples = 1000;
    std::uint64_t seed = 0;
    // Unset selects auto_block_length() for the block scheme.
    std::optional<std::size_t> block_length;

    void validate() const;
};

enum class ResampleScheme { Basic, Block };

// Percentile-bootstrap CI: c resamples of size n drawn with replacement, the
// p-percentile of each, then the values at ranks floor(c(1-level)/2) + 1 and
// ceil(c(1+level)/2) of the sorted c estimates (ranks clamped to [1, c]).
ConfidenceInterval ci_basic_bootstrap(const SampleSeries& series, double p, double level, const BootstrapConfig& cfg);

// Moving-block variant: each resample concatenates ceil(n/b) circularly wrapped
// blocks of length b with uniformly drawn starts, truncated to n.
ConfidenceInterval ci_block_bootstrap(const SampleSeries& series, double p, double level, const BootstrapConfig& cfg);

// Several percentiles from one set of resamples. Entry j equals the
// single-percentile call for ps[j] with the same arguments.
std::vector<ConfidenceInterval> bootstrap_cis(const SampleSeries& series, std::span<const double> ps, double level,
                                              const BootstrapConfig& cfg, ResampleScheme scheme);

// 1-based ranks into the sorted c estimates bounding the interval.
struct BootstrapRanks {
    std::size_t lower;
    std::size_t upper;
};
BootstrapRanks bootstrap_ranks(std::size_t resamples, double level);

// Positions (into the original series) making up resample `index`.
// Resample i draws from Rng(derive_seed(seed, i)) only, so any subset of
// resamples can be evaluated in any order with identical results.
void resample_positions(std::uint64_t seed, std::size_t index, std::size_t n, std::size_t block,
                        std::vector<std::size_t>& out);

}  // namespace perfstop
