#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "perfstop/baselines.hpp"
#include "perfstop/sequential.hpp"
#include "perfstop/stats.hpp"
#include "perfstop/stopping.hpp"
#include "perfstop/workload.hpp"

namespace perfstop {

inline const std::vector<double> kReliabilityPercentiles{0.25, 0.50, 0.75, 0.90};

struct GroundTruth {
    SampleSeries series;
    // Reference 95% order-statistic CI per reliability percentile.
    std::vector<ConfidenceInterval> cis;

    const ConfidenceInterval* ci(double p) const;
};

GroundTruth build_ground_truth(SampleSeries series, const std::vector<double>& percentiles = kReliabilityPercentiles);

double evaluate_accuracy(const SampleSeries& stop_series, const GroundTruth& gt);
// Throws PreconditionError if gt holds no computable CI for p.
bool evaluate_reliability(const SampleSeries& stop_series, const GroundTruth& gt, double p);

// Parameters shared by every technique when built from a --method string.
struct MethodOptions {
    double confidence_level = 0.95;
    double error_margin = 0.01;
    std::size_t run_interval = 5;
    std::size_t max_samples = 1000;
    std::size_t resamples = 1000;
    std::optional<double> tail_margin;
    std::optional<double> outlier_max;
    double objective_probability = 0.90;
    double max_error = 0.03;
    std::size_t confirm_rounds = 1000;
};

enum class TechniqueKind { Scope, Pt4Cloud, Metior, Confirm, Fixed };

struct TechniqueSpec {
    TechniqueKind kind = TechniqueKind::Scope;
    std::string label;
    TestConfig scope;
    Pt4CloudConfig pt4cloud;
    MetiorConfig metior;
    ConfirmConfig confirm;
    std::size_t fixed_repetitions = 0;
    std::size_t fixed_interval = 5;

    // Fresh test instance; `seed` feeds any resampling the technique does.
    std::unique_ptr<SequentialTest> instantiate(std::uint64_t seed) const;
};

// method: scope1 | scope2 | scope3 | pt4cloud | metior | confirm | fixed:<N>
TechniqueSpec make_technique(std::string_view method, const MethodOptions& options = {});

struct ExperimentReport {
    std::string technique;
    std::string workload;
    std::uint64_t seed = 0;
    std::size_t stop_location = 0;
    Termination terminated_by = Termination::Criterion;
    double accuracy = 0.0;
    std::vector<std::pair<double, bool>> reliability;
    std::size_t total_repetitions = 0;

    std::optional<bool> reliable_at(double p) const;
    bool operator==(const ExperimentReport&) const = default;
};

struct ExperimentOptions {
    std::size_t ground_truth_size = 1000;
    std::vector<double> reliability_percentiles = kReliabilityPercentiles;
    // Grade against the session's own stream (self-comparison smoke test).
    bool share_stream = false;
};

// Ground truth and session stream both come from `workload`, with seeds
// derived from `seed` so the technique never sees its grading data.
ExperimentReport run_experiment(const TechniqueSpec& technique, const WorkloadSpec& workload, std::uint64_t seed,
                                const ExperimentOptions& options = {}, std::string workload_name = {});

struct NamedWorkload {
    std::string name;
    WorkloadSpec spec;
};

struct ComparisonCell {
    std::string workload;
    std::string technique;
    std::uint64_t seed = 0;  // base seed from the seeds list
    std::optional<ExperimentReport> report;
    std::string error;

    bool operator==(const ComparisonCell&) const = default;
};

struct TechniqueAggregate {
    std::string technique;
    std::size_t experiments = 0;
    std::size_t failures = 0;
    std::size_t cap_terminated = 0;
    double mean_accuracy = 0.0;
    std::vector<std::pair<double, double>> reliability_fraction;
    std::size_t total_repetitions = 0;

    bool operator==(const TechniqueAggregate&) const = default;
};

struct ComparisonReport {
    std::vector<ComparisonCell> cells;
    std::vector<TechniqueAggregate> aggregates;

    const TechniqueAggregate* aggregate_for(std::string_view technique) const;
    bool operator==(const ComparisonReport&) const = default;
};

// Per-technique reduction over successful cells, in first-appearance order.
std::vector<TechniqueAggregate> aggregate(const std::vector<ComparisonCell>& cells);

// Full workloads x techniques x seeds product. Cells run on `threads` workers;
// the result does not depend on the thread count.
ComparisonReport compare_strategies(const std::vector<NamedWorkload>& workloads,
                                    const std::vector<TechniqueSpec>& techniques, const std::vector<std::uint64_t>& seeds,
                                    const ExperimentOptions& options = {}, unsigned threads = 1);

// One technique per value of `param` (r, cl, interval, p0, e0), labelled
// like "scope1[r=0.05]".
std::vector<TechniqueSpec> sweep_techniques(std::string_view method, const MethodOptions& base, std::string_view param,
                                            const std::vector<double>& values);

// 30 synthetic workloads: 10 warm-like lognormal, 10 cold-like heavy-tailed
// mixtures, 10 AR(1) lognormal with phi = 0.8.
std::vector<NamedWorkload> desk_suite();

}  // namespace perfstop
