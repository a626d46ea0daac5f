#include <catch_amalgamated.hpp>

#include <sstream>

#include "perfstop/error.hpp"
#include "perfstop/serialize.hpp"

using namespace perfstop;
using Catch::Matchers::ContainsSubstring;
using nlohmann::json;

namespace {

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

ComparisonReport two_by_two() {
    const std::vector<NamedWorkload> ws{{"warm", preset("warm", 0)}, {"ar1", preset("ar1", 0)}};
    return compare_strategies(ws, {make_technique("scope1"), make_technique("fixed:100")}, {3});
}

}  // namespace

TEST_CASE("experiment report json round trip") {
    const auto r = run_experiment(make_technique("scope2"), preset("cold", 0), 0xfedcba9876543210ULL, {}, "cold");
    const auto text = emit_report(r, ReportFormat::Json, json{{"method", "scope2"}});
    const auto doc = json::parse(text);
    CHECK(doc["schema_version"] == 1);
    CHECK(doc["kind"] == "experiment");
    CHECK(doc["config"]["method"] == "scope2");
    CHECK(parse_experiment_report(text) == r);
}

TEST_CASE("awkward doubles survive the round trip") {
    ExperimentReport r;
    r.technique = "x";
    r.accuracy = 0.1 + 0.2;
    r.reliability = {{0.25, true}, {1.0 / 3.0, false}};
    r.seed = ~0ULL;
    CHECK(parse_experiment_report(emit_report(r, ReportFormat::Json)) == r);
}

TEST_CASE("comparison report round trip and aggregate recomputation") {
    auto rep = two_by_two();
    rep.cells.push_back({"broken", "scope1", 3, std::nullopt, "boom, \"quoted\""});
    rep.aggregates = aggregate(rep.cells);
    const auto back = parse_comparison_report(emit_report(rep, ReportFormat::Json));
    CHECK(back == rep);
    CHECK(aggregate(back.cells) == rep.aggregates);
}

TEST_CASE("comparison csv has one row per cell") {
    const auto csv = emit_report(two_by_two(), ReportFormat::Csv);
    CHECK(count_lines(csv) == 5);
    CHECK(csv.rfind("workload,technique,seed,stop_location,terminated_by,accuracy,reliable_p25,reliable_p50,"
                    "reliable_p75,reliable_p90,total_repetitions,error\n",
                    0) == 0);
}

TEST_CASE("text output carries the stop location and all reliability flags") {
    ExperimentReport r;
    r.technique = "scope1";
    r.stop_location = 135;
    r.terminated_by = Termination::Criterion;
    r.accuracy = 91.5;
    r.reliability = {{0.25, true}, {0.5, false}, {0.75, true}, {0.9, true}};
    r.total_repetitions = 135;
    const auto text = emit_report(r, ReportFormat::Text);
    CHECK_THAT(text, ContainsSubstring("stop location:     135"));
    for (const char* label : {"reliable p25:", "reliable p50:", "reliable p75:", "reliable p90:"}) {
        CHECK_THAT(text, ContainsSubstring(label));
    }
    CHECK_THAT(text, ContainsSubstring("reliable p50:      no"));
}

TEST_CASE("test report formats") {
    WorkloadSource src(preset("narrow", 1));
    Session s(TestConfig{});
    const auto out = drive(s, src);
    TestReport r{"scope1", out.stop_location, out.terminated_by, {}, s.trace(), {}};
    r.samples.assign(s.samples().begin(), s.samples().end());

    const auto doc = json::parse(emit_test(r, ReportFormat::Json));
    CHECK(doc["kind"] == "test");
    CHECK(doc["report"]["verdict"] == "stop");
    CHECK(doc["report"]["decisions"].size() == s.trace().size());
    CHECK(doc["report"]["samples"].size() == out.stop_location);
    CHECK(count_lines(emit_test(r, ReportFormat::Csv)) == s.trace().size() + 1);
    const auto text = emit_test(r, ReportFormat::Text);
    CHECK_THAT(text, ContainsSubstring("stop location: " + std::to_string(out.stop_location)));
    CHECK_THAT(text, ContainsSubstring("verdict:       stop"));
}

TEST_CASE("parse rejects schema mismatches") {
    CHECK_THROWS_WITH(parse_experiment_report("{\"schema_version\": 2, \"kind\": \"experiment\", \"report\": {}}"),
                      ContainsSubstring("schema_version"));
    CHECK_THROWS_WITH(parse_experiment_report(emit_report(two_by_two(), ReportFormat::Json)),
                      ContainsSubstring("kind"));
    CHECK_THROWS_AS(parse_experiment_report("{\"schema_version\": 1, \"kind\": \"experiment\", \"report\": {}}"),
                    InputError);
    CHECK_THROWS_AS(parse_experiment_report("not json"), InputError);
}

TEST_CASE("workload specs round trip through json") {
    std::vector<WorkloadSpec> specs;
    for (const auto& n : preset_names()) specs.push_back(preset(n, 12));
    specs.push_back({Gamma{2.0, 3.0}, 1});
    for (const auto& s : specs) {
        const json j = s;
        const auto back = j.get<WorkloadSpec>();
        CHECK(json(back) == j);
        CHECK(generate(back, 50) == generate(s, 50));
    }
}

TEST_CASE("workload json errors name the key") {
    auto field_of = [](const char* text) {
        try {
            json::parse(text).get<WorkloadSpec>();
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string("none");
    };
    CHECK(field_of(R"({"model": "lognormal", "mu": 1})") == "workload.sigma");
    CHECK(field_of(R"({"model": "weibull"})") == "workload.model");
    CHECK(field_of(R"({"model": "bimodal", "first": {"model": "gamma", "shape": 1, "scale": 1}, "weight": 0.5})") ==
          "workload.second");
    CHECK(field_of(R"({"model": "ar1", "mu": 1, "sigma": 0.1, "phi": 1.5})") == "ar1.phi");
    CHECK(field_of(R"({"model": "lognormal", "mu": 1, "sigma": 1, "seed": -4})") == "workload.seed");
}

TEST_CASE("report format names") {
    CHECK(parse_report_format("json") == ReportFormat::Json);
    CHECK(parse_report_format("csv") == ReportFormat::Csv);
    CHECK(parse_report_format("text") == ReportFormat::Text);
    CHECK_THROWS_AS(parse_report_format("yaml"), ConfigError);
}
