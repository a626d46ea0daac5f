#pragma once

// Comparison techniques, reconstructed from their published one-line stop
// rules. They share the SequentialTest shape with the main engine so the
// evaluation harness can drive all of them the same way.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perfstop/bootstrap.hpp"
#include "perfstop/sequential.hpp"
#include "perfstop/series.hpp"

namespace perfstop {

struct Pt4CloudConfig {
    double objective_probability = 0.90;  // p0
    std::size_t run_interval = 5;
    std::size_t max_samples = 1000;

    void validate() const;
};

struct MetiorConfig {
    double max_error = 0.03;  // e0
    double confidence_level = 0.95;
    std::size_t run_interval = 5;
    std::size_t max_samples = 1000;
    BootstrapConfig bootstrap;

    void validate() const;
};

struct ConfirmConfig {
    double max_error = 0.03;  // e0
    double confidence_level = 0.95;
    std::size_t subsample_rounds = 1000;
    std::size_t run_interval = 5;
    std::size_t max_samples = 1000;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SimilarityStep {
    Verdict verdict = Verdict::Continue;
    double similarity = 0.0;  // percent
};

struct ErrorStep {
    Verdict verdict = Verdict::Continue;
    std::optional<double> relative_error;  // unset when the series is too short
};

// Histogram similarity between the previous interval boundary's snapshot and
// the accumulated set; Stop once it reaches p0.
SimilarityStep pt4cloud_step(const SampleSeries& accumulated, const SampleSeries& previous_snapshot,
                             const Pt4CloudConfig& cfg);

// Block-bootstrap median CI; relative_error = max(median - lo, hi - median) / median.
ErrorStep metior_step(const SampleSeries& accumulated, const MetiorConfig& cfg);

// Averages order-statistic median CIs over subsamples of size floor(n/2)
// drawn without replacement; Stop when both averaged bounds sit within e0 of
// the full-set median.
ErrorStep confirm_step(const SampleSeries& accumulated, const ConfirmConfig& cfg);

// Indices (into the input) of subsample `round`, floor(n/2) of them, distinct.
void confirm_subsample(std::uint64_t seed, std::size_t round, std::size_t n, std::vector<std::size_t>& out);

// Shared bookkeeping for the interval-driven baselines.
class IntervalTest : public SequentialTest {
public:
    IntervalTest(std::size_t run_interval, std::size_t max_samples);

    std::size_t next_batch_size() const override { return run_interval_; }
    Verdict step(std::span<const double> batch) override;
    void finish(std::span<const double> tail) override;
    const SampleSeries& samples() const override { return samples_; }
    bool terminated() const override { return terminated_; }

    // Per-round metric (similarity or relative error), absent when undefined.
    const std::vector<std::optional<double>>& metric_trace() const noexcept { return metrics_; }

protected:
    virtual std::pair<Verdict, std::optional<double>> evaluate(const SampleSeries& previous) = 0;

private:
    std::size_t run_interval_;
    std::size_t max_samples_;
    SampleSeries samples_;
    std::vector<std::optional<double>> metrics_;
    bool terminated_ = false;
};

class Pt4CloudTest final : public IntervalTest {
public:
    explicit Pt4CloudTest(Pt4CloudConfig cfg);
    std::string name() const override { return "pt4cloud"; }

protected:
    std::pair<Verdict, std::optional<double>> evaluate(const SampleSeries& previous) override;

private:
    Pt4CloudConfig cfg_;
};

class MetiorTest final : public IntervalTest {
public:
    explicit MetiorTest(MetiorConfig cfg);
    std::string name() const override { return "metior"; }

protected:
    std::pair<Verdict, std::optional<double>> evaluate(const SampleSeries& previous) override;

private:
    MetiorConfig cfg_;
};

class ConfirmTest final : public IntervalTest {
public:
    explicit ConfirmTest(ConfirmConfig cfg);
    std::string name() const override { return "confirm"; }

protected:
    std::pair<Verdict, std::optional<double>> evaluate(const SampleSeries& previous) override;

private:
    ConfirmConfig cfg_;
};

// Blind fixed-repetition strategy: stops unconditionally after N samples.
class FixedTest final : public SequentialTest {
public:
    FixedTest(std::size_t repetitions, std::size_t run_interval);

    std::string name() const override { return "fixed:" + std::to_string(repetitions_); }
    std::size_t next_batch_size() const override;
    Verdict step(std::span<const double> batch) override;
    void finish(std::span<const double> tail) override;
    const SampleSeries& samples() const override { return samples_; }
    bool terminated() const override { return terminated_; }

private:
    std::size_t repetitions_;
    std::size_t run_interval_;
    SampleSeries samples_;
    bool terminated_ = false;
};

}  // namespace perfstop
