#include "perfstop/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "perfstop/error.hpp"
#include "perfstop/kernels.hpp"
#include "perfstop/rng.hpp"
#include "perfstop/stats.hpp"

namespace perfstop {
namespace {

void require_fraction(double v, const char* field) {
    if (!(v > 0.0 && v < 1.0)) throw ConfigError(field, "must lie in (0, 1)");
}

void require_interval(std::size_t run_interval, std::size_t max_samples) {
    if (run_interval < 1) throw ConfigError("run_interval", "must be >= 1");
    if (max_samples < run_interval) throw ConfigError("max_samples", "must be >= run_interval");
}

}  // namespace

void Pt4CloudConfig::validate() const {
    require_fraction(objective_probability, "objective_probability");
    require_interval(run_interval, max_samples);
}

void MetiorConfig::validate() const {
    // e0 = 0 is accepted: it is the degenerate "never stop unless constant" setting.
    if (!(max_error >= 0.0 && max_error < 1.0)) throw ConfigError("max_error", "must lie in [0, 1)");
    require_fraction(confidence_level, "confidence_level");
    require_interval(run_interval, max_samples);
    bootstrap.validate();
}

void ConfirmConfig::validate() const {
    if (!(max_error >= 0.0 && max_error < 1.0)) throw ConfigError("max_error", "must lie in [0, 1)");
    require_fraction(confidence_level, "confidence_level");
    if (subsample_rounds < 1) throw ConfigError("subsample_rounds", "must be >= 1");
    require_interval(run_interval, max_samples);
}

SimilarityStep pt4cloud_step(const SampleSeries& accumulated, const SampleSeries& previous_snapshot,
                             const Pt4CloudConfig& cfg) {
    SimilarityStep out;
    out.similarity = distribution_similarity(previous_snapshot, accumulated);
    out.verdict = out.similarity / 100.0 >= cfg.objective_probability ? Verdict::Stop : Verdict::Continue;
    return out;
}

ErrorStep metior_step(const SampleSeries& accumulated, const MetiorConfig& cfg) {
    ErrorStep out;
    if (accumulated.size() < 4) return out;
    const double median = percentile(accumulated, 0.5);
    const auto ci = ci_block_bootstrap(accumulated, 0.5, cfg.confidence_level, cfg.bootstrap);
    out.relative_error = std::max(median - ci.lower, ci.upper - median) / median;
    out.verdict = *out.relative_error <= cfg.max_error ? Verdict::Stop : Verdict::Continue;
    return out;
}

void confirm_subsample(std::uint64_t seed, std::size_t round, std::size_t n, std::vector<std::size_t>& out) {
    const std::size_t m = n / 2;
    out.resize(n);
    std::iota(out.begin(), out.end(), std::size_t{0});
    Rng rng(derive_seed(seed, round));
    for (std::size_t j = 0; j < m; ++j) {
        const auto pick = j + static_cast<std::size_t>(rng.below(n - j));
        std::swap(out[j], out[pick]);
    }
    out.resize(m);
}

ErrorStep confirm_step(const SampleSeries& accumulated, const ConfirmConfig& cfg) {
    ErrorStep out;
    const std::size_t n = accumulated.size();
    if (n < 10) return out;
    const std::size_t m = n / 2;
    const auto idx = order_statistic_indices(m, 0.5, cfg.confidence_level);

    const auto values = accumulated.values();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> sorted(n);
    std::vector<std::uint32_t> rank_of(n);
    for (std::size_t r = 0; r < n; ++r) {
        sorted[r] = values[order[r]];
        rank_of[order[r]] = static_cast<std::uint32_t>(r);
    }
    const bool constant = sorted.front() == sorted.back();
    if (!idx && !constant) return out;

    const auto& k = kernels::active();
    std::vector<std::uint32_t> members(n);
    std::vector<std::size_t> picks;
    double sum_lower = 0.0;
    double sum_upper = 0.0;
    for (std::size_t r = 0; r < cfg.subsample_rounds; ++r) {
        confirm_subsample(cfg.seed, r, n, picks);
        std::fill(members.begin(), members.end(), 0U);
        for (std::size_t pos : picks) members[rank_of[pos]] = 1;
        const double first = sorted[k.select_rank(members, 1)];
        const double last = sorted[k.select_rank(members, m)];
        if (first == last) {
            sum_lower += first;
            sum_upper += first;
            continue;
        }
        if (!idx) return out;
        sum_lower += sorted[k.select_rank(members, static_cast<std::uint64_t>(idx->lower))];
        sum_upper += sorted[k.select_rank(members, static_cast<std::uint64_t>(idx->upper))];
    }
    const auto rounds = static_cast<double>(cfg.subsample_rounds);
    const double lower = sum_lower / rounds;
    const double upper = sum_upper / rounds;
    const double median = percentile_sorted(sorted, 0.5);
    out.relative_error = std::max(median - lower, upper - median) / median;
    const bool inside = median * (1.0 - cfg.max_error) <= lower && upper <= median * (1.0 + cfg.max_error);
    out.verdict = inside ? Verdict::Stop : Verdict::Continue;
    return out;
}

IntervalTest::IntervalTest(std::size_t run_interval, std::size_t max_samples)
    : run_interval_(run_interval), max_samples_(max_samples) {}

Verdict IntervalTest::step(std::span<const double> batch) {
    if (terminated_) throw Error("session terminated");
    if (batch.empty() || batch.size() > run_interval_) {
        throw PreconditionError("batch must hold 1.." + std::to_string(run_interval_) + " samples");
    }
    const SampleSeries previous = samples_;
    samples_.append(batch);
    auto [verdict, metric] = evaluate(previous);
    metrics_.push_back(metric);
    if (verdict == Verdict::Continue && samples_.size() >= max_samples_) verdict = Verdict::CapReached;
    if (verdict != Verdict::Continue) terminated_ = true;
    return verdict;
}

void IntervalTest::finish(std::span<const double> tail) {
    if (terminated_) throw Error("session terminated");
    samples_.append(tail);
    terminated_ = true;
}

Pt4CloudTest::Pt4CloudTest(Pt4CloudConfig cfg)
    : IntervalTest(cfg.run_interval, cfg.max_samples), cfg_(cfg) {
    cfg_.validate();
}

std::pair<Verdict, std::optional<double>> Pt4CloudTest::evaluate(const SampleSeries& previous) {
    if (previous.empty()) return {Verdict::Continue, std::nullopt};
    const auto s = pt4cloud_step(samples(), previous, cfg_);
    return {s.verdict, s.similarity};
}

MetiorTest::MetiorTest(MetiorConfig cfg) : IntervalTest(cfg.run_interval, cfg.max_samples), cfg_(std::move(cfg)) {
    cfg_.validate();
}

std::pair<Verdict, std::optional<double>> MetiorTest::evaluate(const SampleSeries&) {
    const auto s = metior_step(samples(), cfg_);
    return {s.verdict, s.relative_error};
}

ConfirmTest::ConfirmTest(ConfirmConfig cfg) : IntervalTest(cfg.run_interval, cfg.max_samples), cfg_(cfg) {
    cfg_.validate();
}

std::pair<Verdict, std::optional<double>> ConfirmTest::evaluate(const SampleSeries&) {
    const auto s = confirm_step(samples(), cfg_);
    return {s.verdict, s.relative_error};
}

FixedTest::FixedTest(std::size_t repetitions, std::size_t run_interval)
    : repetitions_(repetitions), run_interval_(run_interval) {
    if (repetitions_ < 1) throw ConfigError("repetitions", "must be >= 1");
    if (run_interval_ < 1) throw ConfigError("run_interval", "must be >= 1");
}

std::size_t FixedTest::next_batch_size() const {
    return std::min(run_interval_, repetitions_ - samples_.size());
}

Verdict FixedTest::step(std::span<const double> batch) {
    if (terminated_) throw Error("session terminated");
    if (batch.empty() || batch.size() > next_batch_size()) throw PreconditionError("batch exceeds remaining budget");
    samples_.append(batch);
    if (samples_.size() >= repetitions_) {
        terminated_ = true;
        return Verdict::Stop;
    }
    return Verdict::Continue;
}

void FixedTest::finish(std::span<const double> tail) {
    if (terminated_) throw Error("session terminated");
    samples_.append(tail);
    terminated_ = true;
}

}  // namespace perfstop
