#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "perfstop/baselines.hpp"
#include "perfstop/error.hpp"
#include "perfstop/rng.hpp"
#include "perfstop/workload.hpp"

using namespace perfstop;

namespace {

SampleSeries iota_series(int from, int to) {
    std::vector<double> v;
    for (int i = from; i <= to; ++i) v.push_back(i);
    return SampleSeries(std::move(v));
}

// CONFIRM by materializing every subsample and asking the order-statistic CI.
std::optional<double> naive_confirm_error(const SampleSeries& s, const ConfirmConfig& cfg) {
    double lo = 0, hi = 0;
    std::vector<std::size_t> picks;
    for (std::size_t r = 0; r < cfg.subsample_rounds; ++r) {
        confirm_subsample(cfg.seed, r, s.size(), picks);
        std::vector<double> sub;
        for (auto i : picks) sub.push_back(s[i]);
        const auto ci = ci_order_statistic(SampleSeries(sub), 0.5, cfg.confidence_level);
        if (!ci.computable) return std::nullopt;
        lo += ci.lower;
        hi += ci.upper;
    }
    lo /= static_cast<double>(cfg.subsample_rounds);
    hi /= static_cast<double>(cfg.subsample_rounds);
    const double med = percentile(s, 0.5);
    return std::max(med - lo, hi - med) / med;
}

template <typename Test>
std::size_t stop_location(Test& test, const WorkloadSpec& spec) {
    WorkloadSource src(spec);
    return drive(test, src).stop_location;
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_NOTHROW(Pt4CloudConfig{}.validate());
    CHECK_THROWS_AS((Pt4CloudConfig{1.0, 5, 100}.validate()), ConfigError);
    CHECK_THROWS_AS((Pt4CloudConfig{0.0, 5, 100}.validate()), ConfigError);
    MetiorConfig m;
    m.max_error = 1.0;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    ConfirmConfig c;
    c.subsample_rounds = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(FixedTest(0, 5), ConfigError);
}

TEST_CASE("PT4Cloud step") {
    const Pt4CloudConfig cfg;
    const auto s = iota_series(1, 30);
    const auto same = pt4cloud_step(s, s, cfg);
    CHECK(same.similarity == 100.0);
    CHECK(same.verdict == Verdict::Stop);

    const auto apart = pt4cloud_step(iota_series(1000, 1010), iota_series(1, 10), cfg);
    CHECK(apart.similarity == 0.0);
    CHECK(apart.verdict == Verdict::Continue);
    CHECK_THROWS(pt4cloud_step(SampleSeries{}, s, cfg));
}

TEST_CASE("PT4Cloud similarity is symmetric in its snapshots") {
    Rng rng(2);
    for (int i = 0; i < 50; ++i) {
        const auto a = generate(WorkloadSpec{Lognormal{3.0, 0.3}, rng()}, 5 + rng.below(200));
        const auto b = generate(WorkloadSpec{Lognormal{3.1, 0.3}, rng()}, 5 + rng.below(200));
        CHECK(pt4cloud_step(a, b, {}).similarity == pt4cloud_step(b, a, {}).similarity);
    }
}

TEST_CASE("PT4Cloud test compares consecutive interval boundaries") {
    Pt4CloudTest t(Pt4CloudConfig{});
    CHECK(t.step(std::vector<double>{1, 2, 3, 4, 5}) == Verdict::Continue);
    REQUIRE(t.metric_trace().size() == 1);
    CHECK_FALSE(t.metric_trace()[0]);
    t.step(std::vector<double>{6, 7, 8, 9, 10});
    const auto expect = distribution_similarity(iota_series(1, 5), iota_series(1, 10));
    CHECK(*t.metric_trace()[1] == expect);
}

TEST_CASE("PT4Cloud threshold monotonicity on a fixed stream") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto spec = WorkloadSpec{Lognormal{std::log(100.0), 0.25}, seed};
        std::size_t prev = 0;
        for (double p0 : {0.80, 0.85, 0.90, 0.95, 0.98}) {
            Pt4CloudTest t(Pt4CloudConfig{p0, 5, 1000});
            const auto at = stop_location(t, spec);
            CHECK(at >= prev);
            prev = at;
        }
    }
    Pt4CloudTest t(Pt4CloudConfig{0.90, 5, 1000});
    CHECK(stop_location(t, WorkloadSpec{Lognormal{std::log(100.0), 0.25}, 7}) == 30);
}

TEST_CASE("Metior step") {
    MetiorConfig cfg;
    cfg.bootstrap.resamples = 500;
    const auto c = metior_step(SampleSeries(std::vector<double>(20, 3.0)), cfg);
    CHECK(c.verdict == Verdict::Stop);
    CHECK(*c.relative_error == 0.0);

    const auto s = generate(WorkloadSpec{Lognormal{2.0, 0.3}, 1}, 100);
    MetiorConfig strict = cfg;
    strict.max_error = 0.0;
    const auto z = metior_step(s, strict);
    CHECK(z.verdict == Verdict::Continue);
    CHECK(*z.relative_error > 0.0);

    const auto ci = ci_block_bootstrap(s, 0.5, 0.95, cfg.bootstrap);
    const double med = percentile(s, 0.5);
    CHECK(*metior_step(s, cfg).relative_error == std::max(med - ci.lower, ci.upper - med) / med);

    const auto short_series = metior_step(SampleSeries{1, 2, 3}, cfg);
    CHECK(short_series.verdict == Verdict::Continue);
    CHECK_FALSE(short_series.relative_error);
}

TEST_CASE("Metior threshold monotonicity") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto spec = WorkloadSpec{Lognormal{std::log(100.0), 0.25}, seed};
        MetiorConfig loose, tight;
        loose.bootstrap.seed = tight.bootstrap.seed = seed;
        tight.max_error = 0.01;
        MetiorTest a(loose), b(tight);
        CHECK(stop_location(b, spec) >= stop_location(a, spec));
    }
}

TEST_CASE("CONFIRM subsamples are distinct and half-size") {
    std::vector<std::size_t> picks;
    for (std::size_t n : {10u, 11u, 57u, 400u}) {
        confirm_subsample(4, 9, n, picks);
        CHECK(picks.size() == n / 2);
        CHECK(std::set<std::size_t>(picks.begin(), picks.end()).size() == picks.size());
        CHECK(*std::max_element(picks.begin(), picks.end()) < n);
    }
}

TEST_CASE("CONFIRM step") {
    ConfirmConfig cfg;
    const auto c = confirm_step(SampleSeries(std::vector<double>(30, 8.0)), cfg);
    CHECK(c.verdict == Verdict::Stop);
    CHECK(*c.relative_error == 0.0);

    cfg.max_error = 0.01;
    cfg.seed = 42;
    const auto r = confirm_step(iota_series(1, 20), cfg);
    CHECK(r.verdict == Verdict::Continue);
    REQUIRE(r.relative_error);
    CHECK(*r.relative_error > 0.01);
    CHECK(*r.relative_error == *confirm_step(iota_series(1, 20), cfg).relative_error);

    const auto small = confirm_step(SampleSeries{1, 2, 3, 4, 5, 6, 7, 8, 9}, cfg);
    CHECK(small.verdict == Verdict::Continue);
    CHECK_FALSE(small.relative_error);
}

TEST_CASE("CONFIRM matches the materialized-subsample oracle bit for bit") {
    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        ConfirmConfig cfg;
        cfg.seed = rng();
        cfg.subsample_rounds = 50 + rng.below(200);
        const auto s = generate(WorkloadSpec{Lognormal{4.0, 0.2}, rng()}, 10 + rng.below(300));
        const auto got = confirm_step(s, cfg);
        const auto expect = naive_confirm_error(s, cfg);
        REQUIRE(got.relative_error.has_value() == expect.has_value());
        if (expect) CHECK(*got.relative_error == *expect);
        CHECK(confirm_step(s, cfg).relative_error == got.relative_error);
    }
}

TEST_CASE("CONFIRM threshold monotonicity") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto spec = WorkloadSpec{Lognormal{std::log(100.0), 0.25}, seed};
        ConfirmConfig loose, tight;
        loose.seed = tight.seed = seed;
        tight.max_error = 0.01;
        ConfirmTest a(loose), b(tight);
        CHECK(stop_location(b, spec) >= stop_location(a, spec));
    }
}

TEST_CASE("Fixed(N) stops at N or at exhaustion") {
    FixedTest f(12, 5);
    SeriesSource src(iota_series(1, 100));
    const auto out = drive(f, src);
    CHECK(out.stop_location == 12);
    CHECK(out.terminated_by == Termination::Criterion);
    CHECK(f.name() == "fixed:12");

    FixedTest g(50, 5);
    SeriesSource few(iota_series(1, 23));
    const auto ex = drive(g, few);
    CHECK(ex.stop_location == 23);
    CHECK(ex.terminated_by == Termination::SourceExhausted);
}

TEST_CASE("baselines respect the sample cap") {
    Pt4CloudTest t(Pt4CloudConfig{0.999, 5, 40});
    WorkloadSource src(preset("noisy-bimodal", 3));
    const auto out = drive(t, src);
    CHECK(out.terminated_by == Termination::Cap);
    CHECK(out.stop_location == 40);
}
