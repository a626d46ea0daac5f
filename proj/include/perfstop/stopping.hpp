#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "perfstop/bootstrap.hpp"
#include "perfstop/sequential.hpp"
#include "perfstop/series.hpp"
#include "perfstop/stats.hpp"

namespace perfstop {

enum class CiMethod { OrderStatistic, BasicBootstrap, BlockBootstrap };

std::string_view to_string(CiMethod m) noexcept;

struct TailCheck {
    double percentile = 0.95;
    double margin = 0.03;
};

struct OutlierCheck {
    double max_fraction = 0.10;
};

struct TestConfig {
    double confidence_level = 0.95;
    double error_margin = 0.01;
    std::size_t run_interval = 5;
    CiMethod ci_method = CiMethod::OrderStatistic;
    std::vector<double> checked_percentiles{0.25, 0.50, 0.75};
    std::optional<TailCheck> tail_check;
    std::optional<OutlierCheck> outlier_check;
    std::size_t max_samples = 1000;
    BootstrapConfig bootstrap;

    void validate() const;
};

// One dci evaluation: does the CI sit inside observed * [1 - margin, 1 + margin]?
struct PercentileCheck {
    double percentile = 0.0;
    double observed = 0.0;
    ConfidenceInterval ci;
    double margin_low = 0.0;
    double margin_high = 0.0;
    bool dci = false;
};

struct AccuracyDiagnostics {
    std::size_t sample_count = 0;
    std::vector<PercentileCheck> checks;
    std::optional<PercentileCheck> tail;
    std::optional<double> outlier_fraction;
    bool passed = false;
};

struct StopDecision {
    Verdict verdict = Verdict::Continue;
    AccuracyDiagnostics current;
    std::optional<AccuracyDiagnostics> previous;
    std::size_t samples_used = 0;
};

struct SessionResult {
    std::size_t stop_location = 0;
    SampleSeries final_series;
    std::vector<StopDecision> decision_trace;
    Termination terminated_by = Termination::SourceExhausted;
};

PercentileCheck desired_ci_exists(const SampleSeries& series, double p, const TestConfig& config, double margin);

// Conjunction of dci at every checked percentile, plus the tail and outlier
// extensions when configured.
AccuracyDiagnostics accuracy_check(const SampleSeries& series, const TestConfig& config);

// Stop iff accuracy_check passes on s_cur and on s_cur minus its last
// run_interval observations.
StopDecision consistency_check(const SampleSeries& s_cur, const TestConfig& config);

// Incremental driver for one test: feed batches of at most run_interval
// samples, get a decision per batch.
class Session final : public SequentialTest {
public:
    explicit Session(TestConfig config);

    std::string name() const override;
    std::size_t next_batch_size() const override { return config_.run_interval; }
    Verdict step(std::span<const double> batch) override;
    void finish(std::span<const double> tail) override;
    const SampleSeries& samples() const override { return samples_; }
    bool terminated() const override { return terminated_; }

    const StopDecision& step_decision(std::span<const double> batch);
    const std::vector<StopDecision>& trace() const noexcept { return trace_; }
    const TestConfig& config() const noexcept { return config_; }

private:
    TestConfig config_;
    SampleSeries samples_;
    std::vector<StopDecision> trace_;
    bool terminated_ = false;
};

// Source failure during run_session; carries the trace up to the failure.
class SessionFailure : public Error {
public:
    SessionFailure(const std::string& what, SessionResult partial) : Error(what), partial_(std::move(partial)) {}
    const SessionResult& partial() const noexcept { return partial_; }

private:
    SessionResult partial_;
};

SessionResult run_session(SampleSource& source, const TestConfig& config);

}  // namespace perfstop
