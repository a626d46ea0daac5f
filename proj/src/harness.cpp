#include "perfstop/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "perfstop/error.hpp"
#include "perfstop/rng.hpp"

namespace perfstop {
namespace {

// Stream identifiers for derive_seed(experiment_seed, id).
constexpr std::uint64_t kGroundTruthStream = 0x67;
constexpr std::uint64_t kSessionStream = 0x5e;
constexpr std::uint64_t kTechniqueStream = 0x7e;

std::string format_value(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

const ConfidenceInterval* GroundTruth::ci(double p) const {
    for (const auto& c : cis) {
        if (c.percentile == p) return &c;
    }
    return nullptr;
}

GroundTruth build_ground_truth(SampleSeries series, const std::vector<double>& percentiles) {
    if (series.empty()) throw PreconditionError("empty ground truth");
    GroundTruth gt;
    const auto sorted = series.sorted();
    for (double p : percentiles) gt.cis.push_back(ci_order_statistic_sorted(sorted, p, 0.95));
    gt.series = std::move(series);
    return gt;
}

double evaluate_accuracy(const SampleSeries& stop_series, const GroundTruth& gt) {
    return distribution_similarity(stop_series, gt.series);
}

bool evaluate_reliability(const SampleSeries& stop_series, const GroundTruth& gt, double p) {
    const ConfidenceInterval* ci = gt.ci(p);
    if (ci == nullptr || !ci->computable) {
        throw PreconditionError("ground truth has no reference CI at p=" + format_value(p));
    }
    return ci->contains(percentile(stop_series, p));
}

std::unique_ptr<SequentialTest> TechniqueSpec::instantiate(std::uint64_t seed) const {
    switch (kind) {
        case TechniqueKind::Scope: {
            TestConfig cfg = scope;
            cfg.bootstrap.seed = seed;
            return std::make_unique<Session>(std::move(cfg));
        }
        case TechniqueKind::Pt4Cloud: return std::make_unique<Pt4CloudTest>(pt4cloud);
        case TechniqueKind::Metior: {
            MetiorConfig cfg = metior;
            cfg.bootstrap.seed = seed;
            return std::make_unique<MetiorTest>(std::move(cfg));
        }
        case TechniqueKind::Confirm: {
            ConfirmConfig cfg = confirm;
            cfg.seed = seed;
            return std::make_unique<ConfirmTest>(cfg);
        }
        case TechniqueKind::Fixed: return std::make_unique<FixedTest>(fixed_repetitions, fixed_interval);
    }
    throw Error("unknown technique kind");
}

TechniqueSpec make_technique(std::string_view method, const MethodOptions& o) {
    TechniqueSpec t;
    t.label = std::string(method);
    if (method == "scope1" || method == "scope2" || method == "scope3") {
        t.kind = TechniqueKind::Scope;
        TestConfig& c = t.scope;
        c.ci_method = method == "scope1"   ? CiMethod::OrderStatistic
                      : method == "scope2" ? CiMethod::BasicBootstrap
                                           : CiMethod::BlockBootstrap;
        c.confidence_level = o.confidence_level;
        c.error_margin = o.error_margin;
        c.run_interval = o.run_interval;
        c.max_samples = o.max_samples;
        c.bootstrap.resamples = o.resamples;
        if (o.tail_margin) c.tail_check = TailCheck{0.95, *o.tail_margin};
        if (o.outlier_max) c.outlier_check = OutlierCheck{*o.outlier_max};
        c.validate();
    } else if (method == "pt4cloud") {
        t.kind = TechniqueKind::Pt4Cloud;
        t.pt4cloud = {o.objective_probability, o.run_interval, o.max_samples};
        t.pt4cloud.validate();
    } else if (method == "metior") {
        t.kind = TechniqueKind::Metior;
        t.metior.max_error = o.max_error;
        t.metior.confidence_level = o.confidence_level;
        t.metior.run_interval = o.run_interval;
        t.metior.max_samples = o.max_samples;
        t.metior.bootstrap.resamples = o.resamples;
        t.metior.validate();
    } else if (method == "confirm") {
        t.kind = TechniqueKind::Confirm;
        t.confirm.max_error = o.max_error;
        t.confirm.confidence_level = o.confidence_level;
        t.confirm.subsample_rounds = o.confirm_rounds;
        t.confirm.run_interval = o.run_interval;
        t.confirm.max_samples = o.max_samples;
        t.confirm.validate();
    } else if (method.starts_with("fixed:")) {
        t.kind = TechniqueKind::Fixed;
        const auto digits = method.substr(6);
        std::size_t n = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || n == 0) {
            throw ConfigError("method", "fixed:<N> needs a positive integer, got '" + std::string(method) + "'");
        }
        t.fixed_repetitions = n;
        t.fixed_interval = o.run_interval;
    } else {
        throw ConfigError("method", "unknown method '" + std::string(method) + "'");
    }
    return t;
}

std::optional<bool> ExperimentReport::reliable_at(double p) const {
    for (const auto& [q, ok] : reliability) {
        if (q == p) return ok;
    }
    return std::nullopt;
}

ExperimentReport run_experiment(const TechniqueSpec& technique, const WorkloadSpec& workload, std::uint64_t seed,
                                const ExperimentOptions& options, std::string workload_name) {
    WorkloadSpec gt_spec = workload;
    gt_spec.seed = derive_seed(seed, kGroundTruthStream);
    WorkloadSpec stream_spec = workload;
    stream_spec.seed = options.share_stream ? gt_spec.seed : derive_seed(seed, kSessionStream);

    const GroundTruth gt =
        build_ground_truth(generate(gt_spec, options.ground_truth_size), options.reliability_percentiles);

    auto test = technique.instantiate(derive_seed(seed, kTechniqueStream));
    WorkloadSource source(stream_spec);
    const RunOutcome outcome = drive(*test, source);

    ExperimentReport r;
    r.technique = technique.label;
    r.workload = std::move(workload_name);
    r.seed = seed;
    r.stop_location = outcome.stop_location;
    r.terminated_by = outcome.terminated_by;
    r.total_repetitions = outcome.stop_location;
    r.accuracy = evaluate_accuracy(test->samples(), gt);
    for (double p : options.reliability_percentiles) r.reliability.emplace_back(p, evaluate_reliability(test->samples(), gt, p));
    return r;
}

const TechniqueAggregate* ComparisonReport::aggregate_for(std::string_view technique) const {
    for (const auto& a : aggregates) {
        if (a.technique == technique) return &a;
    }
    return nullptr;
}

std::vector<TechniqueAggregate> aggregate(const std::vector<ComparisonCell>& cells) {
    std::vector<TechniqueAggregate> out;
    std::vector<double> accuracy_sums;
    std::vector<std::vector<std::size_t>> reliable_counts;
    auto slot = [&](const std::string& technique) -> std::size_t {
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (out[i].technique == technique) return i;
        }
        out.push_back({});
        out.back().technique = technique;
        accuracy_sums.push_back(0.0);
        reliable_counts.emplace_back();
        return out.size() - 1;
    };
    for (const auto& cell : cells) {
        const std::size_t i = slot(cell.technique);
        auto& a = out[i];
        if (!cell.report) {
            ++a.failures;
            continue;
        }
        const auto& r = *cell.report;
        ++a.experiments;
        accuracy_sums[i] += r.accuracy;
        a.total_repetitions += r.total_repetitions;
        if (r.terminated_by == Termination::Cap) ++a.cap_terminated;
        if (a.reliability_fraction.empty()) {
            for (const auto& [p, ok] : r.reliability) a.reliability_fraction.emplace_back(p, 0.0);
            reliable_counts[i].assign(r.reliability.size(), 0);
        }
        for (std::size_t j = 0; j < r.reliability.size() && j < reliable_counts[i].size(); ++j) {
            if (r.reliability[j].second) ++reliable_counts[i][j];
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto& a = out[i];
        if (a.experiments == 0) continue;
        const auto n = static_cast<double>(a.experiments);
        a.mean_accuracy = accuracy_sums[i] / n;
        for (std::size_t j = 0; j < a.reliability_fraction.size(); ++j) {
            a.reliability_fraction[j].second = static_cast<double>(reliable_counts[i][j]) / n;
        }
    }
    return out;
}

ComparisonReport compare_strategies(const std::vector<NamedWorkload>& workloads,
                                    const std::vector<TechniqueSpec>& techniques, const std::vector<std::uint64_t>& seeds,
                                    const ExperimentOptions& options, unsigned threads) {
    if (workloads.empty() || techniques.empty() || seeds.empty()) {
        throw PreconditionError("compare_strategies needs non-empty workloads, techniques and seeds");
    }
    struct Job {
        std::size_t workload;
        std::size_t technique;
        std::size_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t w = 0; w < workloads.size(); ++w) {
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            for (std::size_t t = 0; t < techniques.size(); ++t) jobs.push_back({w, t, s});
        }
    }

    ComparisonReport report;
    report.cells.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Job& job = jobs[i];
            ComparisonCell& cell = report.cells[i];
            cell.workload = workloads[job.workload].name;
            cell.technique = techniques[job.technique].label;
            cell.seed = seeds[job.seed];
            try {
                // Every technique sees the same streams for a (workload, seed) pair.
                const std::uint64_t experiment_seed = derive_seed(seeds[job.seed], job.workload);
                cell.report = run_experiment(techniques[job.technique], workloads[job.workload].spec, experiment_seed,
                                             options, workloads[job.workload].name);
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
        }
    };
    const unsigned count = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned i = 1; i < count; ++i) pool.emplace_back(worker);
        worker();
    }
    report.aggregates = aggregate(report.cells);
    return report;
}

std::vector<TechniqueSpec> sweep_techniques(std::string_view method, const MethodOptions& base, std::string_view param,
                                            const std::vector<double>& values) {
    std::vector<TechniqueSpec> out;
    for (double v : values) {
        MethodOptions o = base;
        if (param == "r") {
            o.error_margin = v;
        } else if (param == "cl") {
            o.confidence_level = v;
        } else if (param == "interval") {
            if (!(v >= 1.0 && v == std::floor(v))) throw ConfigError("sweep.values", "interval values must be integers >= 1");
            o.run_interval = static_cast<std::size_t>(v);
        } else if (param == "p0") {
            o.objective_probability = v;
        } else if (param == "e0") {
            o.max_error = v;
        } else {
            throw ConfigError("sweep.param", "unknown parameter '" + std::string(param) + "'");
        }
        TechniqueSpec t = make_technique(method, o);
        t.label = std::string(method) + "[" + std::string(param) + "=" + format_value(v) + "]";
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<NamedWorkload> desk_suite() {
    std::vector<NamedWorkload> out;
    for (int i = 0; i < 10; ++i) {
        const double median = 40.0 + 20.0 * i;
        const double sigma = 0.04 + 0.005 * i;
        out.push_back({"warm-" + std::to_string(i), {Lognormal{std::log(median), sigma}, 0}});
    }
    for (int i = 0; i < 10; ++i) {
        const double median = 400.0 + 100.0 * i;
        const double sigma = 0.04 + 0.004 * i;
        out.push_back({"cold-" + std::to_string(i),
                       {BimodalMixture{Lognormal{std::log(median), sigma}, Lognormal{std::log(2.0 * median), 0.35}, 0.10},
                        0}});
    }
    for (int i = 0; i < 10; ++i) {
        const double median = 60.0 + 15.0 * i;
        const double sigma = 0.04 + 0.004 * i;
        out.push_back({"ar1-" + std::to_string(i), {AR1Lognormal{std::log(median), sigma, 0.8}, 0}});
    }
    return out;
}

}  // namespace perfstop
