#include "perfstop/stopping.hpp"

#include <string>

#include "perfstop/error.hpp"

namespace perfstop {
namespace {

std::vector<ConfidenceInterval> compute_cis(const SampleSeries& series, std::span<const double> sorted,
                                            std::span<const double> ps, const TestConfig& config) {
    std::vector<ConfidenceInterval> out;
    switch (config.ci_method) {
        case CiMethod::OrderStatistic:
            out.reserve(ps.size());
            for (double p : ps) out.push_back(ci_order_statistic_sorted(sorted, p, config.confidence_level));
            return out;
        case CiMethod::BasicBootstrap:
            return bootstrap_cis(series, ps, config.confidence_level, config.bootstrap, ResampleScheme::Basic);
        case CiMethod::BlockBootstrap: {
            // Automatic block selection needs four points; below that the rule's
            // own upper clamp floor(n/2) is already 1.
            if (!config.bootstrap.block_length && series.size() < 4) {
                BootstrapConfig single = config.bootstrap;
                single.block_length = 1;
                return bootstrap_cis(series, ps, config.confidence_level, single, ResampleScheme::Block);
            }
            return bootstrap_cis(series, ps, config.confidence_level, config.bootstrap, ResampleScheme::Block);
        }
    }
    throw Error("unknown CI method");
}

PercentileCheck make_check(double p, double observed, const ConfidenceInterval& ci, double margin) {
    PercentileCheck c;
    c.percentile = p;
    c.observed = observed;
    c.ci = ci;
    c.margin_low = observed * (1.0 - margin);
    c.margin_high = observed * (1.0 + margin);
    c.dci = ci.computable && c.margin_low <= ci.lower && ci.upper <= c.margin_high;
    return c;
}

void require_fraction(double v, const char* field) {
    if (!(v > 0.0 && v < 1.0)) throw ConfigError(field, "must lie in (0, 1)");
}

}  // namespace

std::string_view to_string(CiMethod m) noexcept {
    switch (m) {
        case CiMethod::OrderStatistic: return "order_statistic";
        case CiMethod::BasicBootstrap: return "basic_bootstrap";
        case CiMethod::BlockBootstrap: return "block_bootstrap";
    }
    return "?";
}

void TestConfig::validate() const {
    require_fraction(confidence_level, "confidence_level");
    require_fraction(error_margin, "error_margin");
    if (run_interval < 1) throw ConfigError("run_interval", "must be >= 1");
    if (max_samples < 2 * run_interval) throw ConfigError("max_samples", "must be >= 2 * run_interval");
    if (checked_percentiles.empty()) throw ConfigError("checked_percentiles", "must not be empty");
    for (double p : checked_percentiles) require_fraction(p, "checked_percentiles");
    if (tail_check) {
        require_fraction(tail_check->percentile, "tail_check.percentile");
        require_fraction(tail_check->margin, "tail_check.margin");
    }
    if (outlier_check && !(outlier_check->max_fraction >= 0.0 && outlier_check->max_fraction <= 1.0)) {
        throw ConfigError("outlier_check.max_fraction", "must lie in [0, 1]");
    }
    bootstrap.validate();
}

PercentileCheck desired_ci_exists(const SampleSeries& series, double p, const TestConfig& config, double margin) {
    if (series.empty()) throw PreconditionError("empty series");
    const auto sorted = series.sorted();
    const double ps[] = {p};
    const auto cis = compute_cis(series, sorted, ps, config);
    return make_check(p, percentile_sorted(sorted, p), cis.front(), margin);
}

AccuracyDiagnostics accuracy_check(const SampleSeries& series, const TestConfig& config) {
    if (series.empty()) throw PreconditionError("empty series");
    const auto sorted = series.sorted();

    std::vector<double> ps = config.checked_percentiles;
    if (config.tail_check) ps.push_back(config.tail_check->percentile);
    const auto cis = compute_cis(series, sorted, ps, config);

    AccuracyDiagnostics d;
    d.sample_count = series.size();
    bool passed = true;
    for (std::size_t i = 0; i < config.checked_percentiles.size(); ++i) {
        const double p = config.checked_percentiles[i];
        d.checks.push_back(make_check(p, percentile_sorted(sorted, p), cis[i], config.error_margin));
        passed = passed && d.checks.back().dci;
    }
    if (config.tail_check) {
        const double p = config.tail_check->percentile;
        d.tail = make_check(p, percentile_sorted(sorted, p), cis.back(), config.tail_check->margin);
        passed = passed && d.tail->dci;
    }
    if (config.outlier_check) {
        d.outlier_fraction = iqr_outlier_fraction(series);
        passed = passed && *d.outlier_fraction <= config.outlier_check->max_fraction;
    }
    d.passed = passed;
    return d;
}

StopDecision consistency_check(const SampleSeries& s_cur, const TestConfig& config) {
    if (s_cur.empty()) throw PreconditionError("empty series");
    StopDecision out;
    out.samples_used = s_cur.size();
    out.current = accuracy_check(s_cur, config);
    const SampleSeries s_pre = s_cur.drop_last(config.run_interval);
    if (!s_pre.empty()) out.previous = accuracy_check(s_pre, config);
    out.verdict = (out.current.passed && out.previous && out.previous->passed) ? Verdict::Stop : Verdict::Continue;
    return out;
}

Session::Session(TestConfig config) : config_(std::move(config)) { config_.validate(); }

std::string Session::name() const {
    switch (config_.ci_method) {
        case CiMethod::OrderStatistic: return "scope1";
        case CiMethod::BasicBootstrap: return "scope2";
        case CiMethod::BlockBootstrap: return "scope3";
    }
    return "scope";
}

const StopDecision& Session::step_decision(std::span<const double> batch) {
    if (terminated_) throw Error("session terminated");
    if (batch.empty() || batch.size() > config_.run_interval) {
        throw PreconditionError("batch must hold 1.." + std::to_string(config_.run_interval) + " samples");
    }
    samples_.append(batch);

    StopDecision d;
    d.samples_used = samples_.size();
    d.current = accuracy_check(samples_, config_);
    const std::size_t pre_size = samples_.size() > config_.run_interval ? samples_.size() - config_.run_interval : 0;
    if (pre_size > 0) {
        // S_pre is a prefix of S_cur; the previous round already scored it when
        // the batches were full.
        if (!trace_.empty() && trace_.back().current.sample_count == pre_size) {
            d.previous = trace_.back().current;
        } else {
            d.previous = accuracy_check(samples_.prefix(pre_size), config_);
        }
    }
    d.verdict = (d.current.passed && d.previous && d.previous->passed) ? Verdict::Stop : Verdict::Continue;
    if (d.verdict == Verdict::Continue && samples_.size() >= config_.max_samples) d.verdict = Verdict::CapReached;
    if (d.verdict != Verdict::Continue) terminated_ = true;
    trace_.push_back(std::move(d));
    return trace_.back();
}

Verdict Session::step(std::span<const double> batch) { return step_decision(batch).verdict; }

void Session::finish(std::span<const double> tail) {
    if (terminated_) throw Error("session terminated");
    samples_.append(tail);
    terminated_ = true;
}

SessionResult run_session(SampleSource& source, const TestConfig& config) {
    Session session(config);
    SessionResult result;
    try {
        const RunOutcome outcome = drive(session, source);
        result.terminated_by = outcome.terminated_by;
    } catch (const SourceFailure& e) {
        result.stop_location = session.samples().size();
        result.final_series = session.samples();
        result.decision_trace = session.trace();
        throw SessionFailure(e.what(), std::move(result));
    }
    result.stop_location = session.samples().size();
    result.final_series = session.samples();
    result.decision_trace = session.trace();
    return result;
}

}  // namespace perfstop
