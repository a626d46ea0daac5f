#include "perfstop/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "perfstop/error.hpp"
#include "perfstop/kernels.hpp"
#include "perfstop/rng.hpp"

namespace perfstop {
namespace {

// Snap products like 1000 * 0.975 that land a few ulps off an integer.
double snap(double x) {
    const double r = std::round(x);
    return std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)) ? r : x;
}

template <typename Emit>
void for_each_position(Rng& rng, std::size_t n, std::size_t block, Emit&& emit) {
    if (block <= 1) {
        for (std::size_t i = 0; i < n; ++i) emit(static_cast<std::size_t>(rng.below(n)));
        return;
    }
    std::size_t produced = 0;
    while (produced < n) {
        std::size_t pos = static_cast<std::size_t>(rng.below(n));
        for (std::size_t j = 0; j < block && produced < n; ++j, ++produced) {
            emit(pos);
            if (++pos == n) pos = 0;
        }
    }
}

}  // namespace

void BootstrapConfig::validate() const {
    if (resamples < 1) throw ConfigError("bootstrap.resamples", "must be >= 1");
    if (block_length && *block_length < 1) throw ConfigError("bootstrap.block_length", "must be >= 1");
}

BootstrapRanks bootstrap_ranks(std::size_t resamples, double level) {
    const auto c = static_cast<double>(resamples);
    auto lower = static_cast<std::size_t>(std::floor(snap(c * (1.0 - level) / 2.0))) + 1;
    auto upper = static_cast<std::size_t>(std::ceil(snap(c * (1.0 + level) / 2.0)));
    lower = std::clamp<std::size_t>(lower, 1, resamples);
    upper = std::clamp<std::size_t>(upper, 1, resamples);
    return {lower, upper};
}

void resample_positions(std::uint64_t seed, std::size_t index, std::size_t n, std::size_t block,
                        std::vector<std::size_t>& out) {
    out.clear();
    out.reserve(n);
    Rng rng(derive_seed(seed, index));
    for_each_position(rng, n, block, [&](std::size_t pos) { out.push_back(pos); });
}

std::vector<ConfidenceInterval> bootstrap_cis(const SampleSeries& series, std::span<const double> ps, double level,
                                              const BootstrapConfig& cfg, ResampleScheme scheme) {
    if (series.empty()) throw PreconditionError("empty series");
    cfg.validate();
    if (!(level > 0.0 && level < 1.0)) throw PreconditionError("confidence level must lie in (0, 1)");
    for (double p : ps) {
        if (!(p > 0.0 && p < 1.0)) throw PreconditionError("percentile must lie in (0, 1)");
    }

    std::size_t block = 1;
    if (scheme == ResampleScheme::Block) block = cfg.block_length ? *cfg.block_length : auto_block_length(series);
    const std::size_t n = series.size();
    block = std::min(block, n);

    // Resample percentiles come from per-rank counts over the sorted input,
    // which avoids sorting each resample.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto values = series.values();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> sorted(n);
    std::vector<std::uint32_t> rank_of(n);
    for (std::size_t r = 0; r < n; ++r) {
        sorted[r] = values[order[r]];
        rank_of[order[r]] = static_cast<std::uint32_t>(r);
    }

    struct Target {
        double h;
        double frac;
        std::uint64_t rank;  // 1-based floor(h)
    };
    std::vector<Target> targets;
    targets.reserve(ps.size());
    for (double p : ps) {
        const double h = static_cast<double>(n - 1) * p + 1.0;
        const double fl = std::floor(h);
        targets.push_back({h, h - fl, static_cast<std::uint64_t>(fl)});
    }

    const auto& k = kernels::active();
    std::vector<std::uint32_t> counts(n);
    std::vector<std::vector<double>> estimates(ps.size(), std::vector<double>(cfg.resamples));
    for (std::size_t i = 0; i < cfg.resamples; ++i) {
        std::fill(counts.begin(), counts.end(), 0U);
        Rng rng(derive_seed(cfg.seed, i));
        for_each_position(rng, n, block, [&](std::size_t pos) { ++counts[rank_of[pos]]; });
        for (std::size_t t = 0; t < targets.size(); ++t) {
            const auto& tg = targets[t];
            const std::size_t j1 = k.select_rank(counts, tg.rank);
            const double lo = sorted[j1];
            if (tg.rank >= n) {
                estimates[t][i] = lo;
                continue;
            }
            const std::size_t j2 = k.select_rank(counts, tg.rank + 1);
            estimates[t][i] = lo + tg.frac * (sorted[j2] - lo);
        }
    }

    const auto ranks = bootstrap_ranks(cfg.resamples, level);
    std::vector<ConfidenceInterval> out;
    out.reserve(ps.size());
    for (std::size_t t = 0; t < ps.size(); ++t) {
        auto& est = estimates[t];
        std::sort(est.begin(), est.end());
        out.push_back(ConfidenceInterval::of(ps[t], level, est[ranks.lower - 1], est[ranks.upper - 1]));
    }
    return out;
}

ConfidenceInterval ci_basic_bootstrap(const SampleSeries& series, double p, double level, const BootstrapConfig& cfg) {
    const double ps[] = {p};
    return bootstrap_cis(series, ps, level, cfg, ResampleScheme::Basic).front();
}

ConfidenceInterval ci_block_bootstrap(const SampleSeries& series, double p, double level, const BootstrapConfig& cfg) {
    if (!cfg.block_length && series.size() < 4) throw PreconditionError("series too short for block selection");
    const double ps[] = {p};
    return bootstrap_cis(series, ps, level, cfg, ResampleScheme::Block).front();
}

}  // namespace perfstop
