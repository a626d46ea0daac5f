#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "perfstop/error.hpp"
#include "perfstop/io.hpp"
#include "perfstop/workload.hpp"

using namespace perfstop;
using Catch::Matchers::ContainsSubstring;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / ("perfstop_io_" + name);
    std::ofstream(path, std::ios::binary) << content;
    return path;
}

std::string error_of(std::string_view text, SampleFormat f) {
    try {
        parse_samples_text(text, f);
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("csv examples") {
    CHECK(parse_samples(write_temp("a.csv", "12.5\n13.0\n"), SampleFormat::Csv) == SampleSeries{12.5, 13.0});
    CHECK(parse_samples(write_temp("b.csv", "latency_ms\n12.5\n"), SampleFormat::Csv) == SampleSeries{12.5});
    const auto err = error_of("12.5\n-3\n", SampleFormat::Csv);
    CHECK_THAT(err, ContainsSubstring("line 2"));
    CHECK_THAT(err, ContainsSubstring("-3"));
}

TEST_CASE("csv grammar") {
    CHECK(parse_samples_text("index,latency_ms\n0,5\n1,6.25\n", SampleFormat::Csv) == SampleSeries{5, 6.25});
    CHECK(parse_samples_text("0,5\r\n1,6\r\n", SampleFormat::Csv) == SampleSeries{5, 6});
    CHECK(parse_samples_text("\n5\n\n  \n7\n", SampleFormat::Csv) == SampleSeries{5, 7});
    CHECK(parse_samples_text("1e2\n+3\n", SampleFormat::Csv) == SampleSeries{100, 3});
    CHECK_THAT(error_of("5\nabc\n", SampleFormat::Csv), ContainsSubstring("line 2"));
    CHECK_THAT(error_of("5\n0\n", SampleFormat::Csv), ContainsSubstring("non-positive"));
    CHECK_THAT(error_of("5\ninf\n", SampleFormat::Csv), ContainsSubstring("non-finite"));
    CHECK_THAT(error_of("5\nnan\n", SampleFormat::Csv), ContainsSubstring("line 2"));
    CHECK_THAT(error_of("1,2,3\n", SampleFormat::Csv), ContainsSubstring("line 1"));
    CHECK_THAT(error_of("header\nother\n", SampleFormat::Csv), ContainsSubstring("line 2"));
    CHECK_THAT(error_of("", SampleFormat::Csv), ContainsSubstring("no latency records"));
    CHECK_THAT(error_of("latency_ms\n", SampleFormat::Csv), ContainsSubstring("no latency records"));
}

TEST_CASE("jsonl grammar") {
    CHECK(parse_samples_text("{\"latency_ms\": 3.5}\n{\"latency_ms\": 4, \"extra\": 1}\n", SampleFormat::Jsonl) ==
          SampleSeries{3.5, 4});
    CHECK_THAT(error_of("{\"latency_ms\": 3}\n{\"latency\": 4}\n", SampleFormat::Jsonl), ContainsSubstring("line 2"));
    CHECK_THAT(error_of("{\"latency_ms\": 3}\nnot json\n", SampleFormat::Jsonl), ContainsSubstring("line 2"));
    CHECK_THAT(error_of("{\"latency_ms\": -1}\n", SampleFormat::Jsonl), ContainsSubstring("line 1"));
    CHECK_THAT(error_of("[1]\n", SampleFormat::Jsonl), ContainsSubstring("line 1"));
}

TEST_CASE("missing and empty files") {
    CHECK_THROWS_AS(parse_samples("/nonexistent/x.csv", SampleFormat::Csv), InputError);
    CHECK_THROWS_AS(parse_samples(write_temp("empty.csv", ""), SampleFormat::Csv), InputError);
}

TEST_CASE("format detection") {
    CHECK(sample_format_for("a.jsonl") == SampleFormat::Jsonl);
    CHECK(sample_format_for("a.ndjson") == SampleFormat::Jsonl);
    CHECK(sample_format_for("a.csv") == SampleFormat::Csv);
    CHECK(sample_format_for("a") == SampleFormat::Csv);
    CHECK(parse_sample_format("jsonl") == SampleFormat::Jsonl);
    CHECK_THROWS_AS(parse_sample_format("xml"), ConfigError);
}

TEST_CASE("format then parse preserves order and count exactly") {
    const auto s = generate(preset("bursty", 4), 777);
    for (auto f : {SampleFormat::Csv, SampleFormat::Jsonl}) {
        CHECK(parse_samples_text(format_samples(s, f), f) == s);
    }
}
