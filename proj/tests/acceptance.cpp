// Acceptance checks 1-9. One PASS/FAIL line each; exit status 1 if any fail.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "perfstop/harness.hpp"
#include "perfstop/rng.hpp"
#include "perfstop/serialize.hpp"
#include "perfstop/stopping.hpp"
#include "perfstop/workload.hpp"

using namespace perfstop;

namespace {

constexpr std::uint64_t kSeed = 1;
constexpr double kZ95 = 1.959963984540054;

int failures = 0;

void report(int id, bool pass, const std::string& detail, std::chrono::steady_clock::time_point start) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, detail.c_str(), secs);
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Straight re-derivation of the accuracy check from raw values, sharing no
// code with the library: linear-interpolation percentile, normal-approximation
// order statistics, constant series collapse to [c, c].
bool oracle_accuracy(std::vector<double> v, double r, double level_z) {
    std::sort(v.begin(), v.end());
    const auto n = static_cast<double>(v.size());
    for (double p : {0.25, 0.5, 0.75}) {
        const double h = (n - 1) * p + 1;
        const auto fl = static_cast<std::size_t>(std::floor(h));
        const double obs = fl >= v.size() ? v.back() : v[fl - 1] + (h - fl) * (v[fl] - v[fl - 1]);
        double lo = 0, hi = 0;
        if (v.front() == v.back()) {
            lo = hi = v.front();
        } else {
            const double half = level_z * std::sqrt(n * p * (1 - p));
            const long l = static_cast<long>(std::floor(n * p - half));
            const long u = static_cast<long>(std::ceil(n * p + half));
            if (!(l >= 1 && l < u && u <= static_cast<long>(v.size()))) return false;
            lo = v[l - 1];
            hi = v[u - 1];
        }
        if (!(obs * (1 - r) <= lo && hi <= obs * (1 + r))) return false;
    }
    return true;
}

void criterion1() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(derive_seed(kSeed, 1));
    std::size_t rounds = 0, stops = 0, violations = 0;
    for (int i = 0; i < 200; ++i) {
        const double sigma = std::exp(std::log(1e-4) + rng.unit() * (std::log(0.3) - std::log(1e-4)));
        const std::size_t k = 1 + rng.below(20);
        const double r = std::array{0.005, 0.01, 0.02, 0.05}[rng.below(4)];
        const std::size_t len = 2 * k + rng.below(600);
        const auto series = generate(WorkloadSpec{Lognormal{std::log(50.0), sigma}, rng()}, len);

        TestConfig c;
        c.run_interval = k;
        c.error_margin = r;
        c.max_samples = std::max<std::size_t>(len, 2 * k);
        Session s(c);
        std::vector<double> seen;
        for (std::size_t at = 0; at + k <= len && !s.terminated(); at += k) {
            const std::span<const double> batch(series.values().subspan(at, k));
            const auto& d = s.step_decision(batch);
            seen.insert(seen.end(), batch.begin(), batch.end());
            const std::vector<double> pre(seen.begin(), seen.end() - static_cast<long>(k));
            const bool expect = oracle_accuracy(seen, r, kZ95) && !pre.empty() && oracle_accuracy(pre, r, kZ95);
            ++rounds;
            if (d.verdict == Verdict::Stop) ++stops;
            if (d.verdict != Verdict::CapReached && (d.verdict == Verdict::Stop) != expect) ++violations;
        }
    }
    report(1, violations == 0 && stops > 0,
           fmt("%zu violations over %zu rounds in 200 series (%zu stops)", violations, rounds, stops), start);
}

void criterion2() {
    const auto start = std::chrono::steady_clock::now();
    std::size_t bad = 0, runs = 0;
    std::string detail;
    for (CiMethod m : {CiMethod::OrderStatistic, CiMethod::BasicBootstrap, CiMethod::BlockBootstrap}) {
        for (std::size_t k : {3, 4, 5, 10, 20}) {
            TestConfig c;
            c.ci_method = m;
            c.run_interval = k;
            c.bootstrap.seed = kSeed;
            SeriesSource src(SampleSeries(std::vector<double>(1000, 42.0)));
            const auto r = run_session(src, c);
            ++runs;
            if (r.stop_location != 2 * k || r.terminated_by != Termination::Criterion) {
                ++bad;
                detail += fmt(" %s k=%zu stopped at %zu;", std::string(to_string(m)).c_str(), k, r.stop_location);
            }
        }
    }
    report(2, bad == 0, fmt("%zu/%zu configs stop at 2k", runs - bad, runs) + detail, start);
}

void criterion3() {
    const auto start = std::chrono::steady_clock::now();
    std::size_t covered = 0;
    for (std::uint64_t t = 0; t < 2000; ++t) {
        const auto s = generate(WorkloadSpec{Lognormal{0.0, 0.5}, derive_seed(kSeed, 3000 + t)}, 200);
        covered += ci_order_statistic(s, 0.5, 0.95).contains(1.0);
    }
    const double cov = covered / 2000.0;
    report(3, cov >= 0.93 && cov <= 0.99, fmt("median CI coverage %.4f, need [0.93, 0.99]", cov), start);
}

void criterion4() {
    const auto start = std::chrono::steady_clock::now();
    bool same = true;
    std::size_t checked = 0;
    for (const char* method : {"scope2", "scope3"}) {
        for (const auto& name : {"warm", "cold", "ar1"}) {
            const auto t = make_technique(method);
            for (std::uint64_t seed : {kSeed, kSeed + 1}) {
                auto trace_of = [&] {
                    TestConfig c = t.scope;
                    c.bootstrap.seed = derive_seed(seed, 4);
                    WorkloadSource src(preset(name, seed));
                    const auto r = run_session(src, c);
                    nlohmann::json j = r.decision_trace;
                    return std::make_pair(r.stop_location, j.dump());
                };
                same = same && trace_of() == trace_of();
                same = same && run_experiment(t, preset(name, 0), seed) == run_experiment(t, preset(name, 0), seed);
                ++checked;
            }
        }
    }
    report(4, same, fmt("%zu trace/report pairs %s", checked, same ? "bit-identical" : "differ"), start);
}

std::vector<TechniqueSpec> techniques(std::initializer_list<const char*> names) {
    std::vector<TechniqueSpec> out;
    for (const char* n : names) out.push_back(make_technique(n));
    return out;
}

double reliability_fraction(const TechniqueAggregate& a, double p) {
    for (const auto& [q, f] : a.reliability_fraction) {
        if (q == p) return f;
    }
    return 0.0;
}

// Shared by criteria 5 and 7.
const ComparisonReport& baseline_comparison() {
    static const ComparisonReport rep = compare_strategies(
        desk_suite(), techniques({"scope1", "pt4cloud", "metior", "confirm", "fixed:500"}), {kSeed});
    return rep;
}

void criterion5() {
    const auto start = std::chrono::steady_clock::now();
    const auto& rep = baseline_comparison();
    const auto& scope = *rep.aggregate_for("scope1");
    const double rel = reliability_fraction(scope, 0.5);
    bool beats = true;
    std::string base;
    for (const char* b : {"pt4cloud", "metior", "confirm"}) {
        const auto& a = *rep.aggregate_for(b);
        beats = beats && scope.mean_accuracy > a.mean_accuracy;
        base += fmt(" %s %.2f%%", b, a.mean_accuracy);
    }
    const bool ok5 = scope.failures == 0 && scope.mean_accuracy >= 90.0 && rel >= 0.80 && beats;
    report(5, ok5,
           fmt("scope1 mean accuracy %.2f%% (need >= 90), p50 reliable on %.0f%% of workloads (need >= 80), "
               "baselines:",
               scope.mean_accuracy, 100 * rel) +
               base,
           start);

    ExperimentOptions shared;
    shared.share_stream = true;
    const auto alt = compare_strategies(desk_suite(), techniques({"scope1"}), {kSeed}, shared);
    std::printf("info criterion 5: p50 reliable on %.0f%% of workloads when graded against the session's own stream\n",
                100 * reliability_fraction(alt.aggregates.front(), 0.5));
}

void criterion7() {
    const auto start = std::chrono::steady_clock::now();
    const auto& rep = baseline_comparison();
    const auto& scope = *rep.aggregate_for("scope1");
    const auto& fixed = *rep.aggregate_for("fixed:500");
    const bool ok7 = scope.total_repetitions < fixed.total_repetitions &&
                     std::abs(scope.mean_accuracy - fixed.mean_accuracy) <= 3.0;
    report(7, ok7,
           fmt("scope1 %zu repetitions at %.2f%%, fixed:500 %zu repetitions at %.2f%%", scope.total_repetitions,
               scope.mean_accuracy, fixed.total_repetitions, fixed.mean_accuracy),
           start);
}

void criterion6() {
    const auto start = std::chrono::steady_clock::now();
    const auto suite = desk_suite();
    const auto rs = sweep_techniques("scope1", {}, "r", {0.05, 0.04, 0.03, 0.02, 0.01});
    const auto ks = sweep_techniques("scope1", {}, "interval", {3, 4, 5, 10, 20});
    auto all = rs;
    all.insert(all.end(), ks.begin(), ks.end());
    const auto rep = compare_strategies(suite, all, {kSeed});

    bool monotone = true;
    double prev = -1.0;
    std::string detail = "r sweep";
    for (const auto& t : rs) {
        const double acc = rep.aggregate_for(t.label)->mean_accuracy;
        monotone = monotone && acc >= prev;
        prev = acc;
        detail += fmt(" %.2f", acc);
    }
    double lo = 100.0, hi = 0.0;
    detail += "; k sweep";
    for (const auto& t : ks) {
        const double acc = rep.aggregate_for(t.label)->mean_accuracy;
        lo = std::min(lo, acc);
        hi = std::max(hi, acc);
        detail += fmt(" %.2f", acc);
    }
    detail += fmt("; k range %.2fpp (need <= 3)", hi - lo);
    report(6, monotone && hi - lo <= 3.0, detail, start);
}

void criterion8() {
    const auto start = std::chrono::steady_clock::now();
    const auto suite = desk_suite();
    std::size_t checked = 0, bad = 0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        for (std::size_t w = 0; w < suite.size(); ++w) {
            auto spec = suite[w].spec;
            spec.seed = derive_seed(derive_seed(kSeed + s, w), 0x67);
            const auto gt = build_ground_truth(generate(spec, 1000));
            bool ok = evaluate_accuracy(gt.series, gt) == 100.0;
            for (double p : kReliabilityPercentiles) ok = ok && evaluate_reliability(gt.series, gt, p);
            bad += !ok;
            ++checked;
        }
    }
    report(8, bad == 0, fmt("%zu/%zu ground truths grade themselves at 100%% and reliable at p25/p50/p75/p90",
                            checked - bad, checked),
           start);
}

void criterion9() {
    const auto start = std::chrono::steady_clock::now();
    const auto suite = desk_suite();
    std::size_t earlier = 0, later = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        auto spec = suite[s % suite.size()].spec;
        spec.seed = derive_seed(kSeed, 9000 + s);
        TestConfig plain;
        TestConfig tail = plain;
        tail.tail_check = TailCheck{0.95, 0.03};
        WorkloadSource a(spec), b(spec);
        const auto ra = run_session(a, plain);
        const auto rb = run_session(b, tail);
        earlier += rb.stop_location < ra.stop_location;
        later += rb.stop_location > ra.stop_location;
    }
    report(9, earlier == 0, fmt("tail check stopped earlier in %zu of 50 runs, later in %zu", earlier, later), start);
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> checks{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                    criterion6, criterion7, criterion8, criterion9};
    for (const auto& c : checks) {
        try {
            c();
        } catch (const std::exception& e) {
            std::printf("FAIL error: %s\n", e.what());
            ++failures;
        }
    }
    std::printf("%d failing\n", failures);
    return failures == 0 ? 0 : 1;
}
