#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "perfstop/harness.hpp"
#include "perfstop/stopping.hpp"
#include "perfstop/workload.hpp"

namespace perfstop {

inline constexpr int kSchemaVersion = 1;

enum class ReportFormat { Json, Csv, Text };

ReportFormat parse_report_format(std::string_view name);

// JSON mappings. Field names are part of the report schema.
void to_json(nlohmann::json& j, const ConfidenceInterval& ci);
void to_json(nlohmann::json& j, const ExperimentReport& r);
void from_json(const nlohmann::json& j, ExperimentReport& r);
void to_json(nlohmann::json& j, const ComparisonCell& c);
void from_json(const nlohmann::json& j, ComparisonCell& c);
void to_json(nlohmann::json& j, const TechniqueAggregate& a);
void from_json(const nlohmann::json& j, TechniqueAggregate& a);
void to_json(nlohmann::json& j, const ComparisonReport& r);
void from_json(const nlohmann::json& j, ComparisonReport& r);
void to_json(nlohmann::json& j, const StopDecision& d);
void to_json(nlohmann::json& j, const WorkloadSpec& w);
// Throws ConfigError naming the offending key.
void from_json(const nlohmann::json& j, WorkloadSpec& w);

// Reports are wrapped as {"schema_version", "kind", "config", "report"}.
// `config` is the effective configuration and may be null.
std::string emit_report(const ExperimentReport& r, ReportFormat format, const nlohmann::json& config = nullptr);
std::string emit_report(const ComparisonReport& r, ReportFormat format, const nlohmann::json& config = nullptr);
// Outcome of one `test` run. `decisions` is filled by the main engine,
// `metric_trace` by the baselines (similarity or relative error per round).
struct TestReport {
    std::string technique;
    std::size_t stop_location = 0;
    Termination terminated_by = Termination::SourceExhausted;
    std::vector<double> samples;
    std::vector<StopDecision> decisions;
    std::vector<std::optional<double>> metric_trace;
};

// csv has one row per evaluated round.
std::string emit_test(const TestReport& r, ReportFormat format, const nlohmann::json& config = nullptr);

// Inverse of the json emitters. Throws InputError on a schema mismatch.
ExperimentReport parse_experiment_report(std::string_view json);
ComparisonReport parse_comparison_report(std::string_view json);

}  // namespace perfstop
