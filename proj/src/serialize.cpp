#include "perfstop/serialize.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "perfstop/error.hpp"

namespace perfstop {
namespace {

using nlohmann::json;

// Shortest round-trip form, same as the json emitter uses.
std::string num(double v) { return json(v).dump(); }

std::string percent_label(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "p%g", p * 100.0);
    return buf;
}

// CSV field quoting for free-form text (labels, error messages).
std::string quoted(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

json envelope(std::string_view kind, const json& report, const json& config) {
    return json{{"schema_version", kSchemaVersion}, {"kind", kind}, {"config", config}, {"report", report}};
}

const json& unwrap(const json& doc, std::string_view kind) {
    if (!doc.is_object()) throw InputError("report is not a JSON object");
    const auto v = doc.find("schema_version");
    if (v == doc.end() || !v->is_number_integer() || v->get<int>() != kSchemaVersion) {
        throw InputError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
    }
    const auto k = doc.find("kind");
    if (k == doc.end() || !k->is_string() || k->get<std::string>() != kind) {
        throw InputError("expected report kind '" + std::string(kind) + "'");
    }
    const auto r = doc.find("report");
    if (r == doc.end() || !r->is_object()) throw InputError("missing report object");
    return *r;
}

template <typename T>
T parse_wrapped(std::string_view text, std::string_view kind) {
    try {
        return unwrap(json::parse(text), kind).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed report: ") + e.what());
    }
}

std::vector<double> reliability_columns(const std::vector<const ExperimentReport*>& reports) {
    std::vector<double> ps;
    for (const auto* r : reports) {
        for (const auto& [p, ok] : r->reliability) {
            if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);
        }
    }
    if (ps.empty()) ps = kReliabilityPercentiles;
    return ps;
}

std::string csv_header(const std::vector<double>& ps) {
    std::string h = "workload,technique,seed,stop_location,terminated_by,accuracy";
    for (double p : ps) h += ",reliable_" + percent_label(p);
    return h + ",total_repetitions,error\n";
}

void csv_row(std::ostream& os, std::string_view workload, std::string_view technique, std::uint64_t seed,
             const ExperimentReport* r, const std::vector<double>& ps, std::string_view error) {
    os << quoted(workload) << ',' << quoted(technique) << ',' << seed << ',';
    if (r) {
        os << r->stop_location << ',' << to_string(r->terminated_by) << ',' << num(r->accuracy);
    } else {
        os << ",,";
    }
    for (double p : ps) {
        os << ',';
        if (r) {
            if (const auto ok = r->reliable_at(p)) os << (*ok ? "true" : "false");
        }
    }
    os << ',';
    if (r) os << r->total_repetitions;
    os << ',' << quoted(error) << '\n';
}

void text_experiment(std::ostream& os, const ExperimentReport& r) {
    os << "technique:         " << r.technique << '\n'
       << "workload:          " << r.workload << '\n'
       << "seed:              " << r.seed << '\n'
       << "stop location:     " << r.stop_location << '\n'
       << "terminated by:     " << to_string(r.terminated_by) << '\n'
       << "accuracy:          " << num(r.accuracy) << "%\n";
    for (const auto& [p, ok] : r.reliability) {
        const auto label = "reliable " + percent_label(p) + ":";
        os << label << std::string(label.size() < 19 ? 19 - label.size() : 1, ' ') << (ok ? "yes" : "no") << '\n';
    }
    os << "total repetitions: " << r.total_repetitions << '\n';
}

void text_checks(std::ostream& os, const AccuracyDiagnostics& d) {
    auto line = [&](const PercentileCheck& c) {
        os << "  " << percent_label(c.percentile) << " observed " << num(c.observed);
        if (c.ci.computable) {
            os << " ci [" << num(c.ci.lower) << ", " << num(c.ci.upper) << "]";
        } else {
            os << " ci not computable";
        }
        os << " window [" << num(c.margin_low) << ", " << num(c.margin_high) << "] " << (c.dci ? "ok" : "miss")
           << '\n';
    };
    for (const auto& c : d.checks) line(c);
    if (d.tail) line(*d.tail);
    if (d.outlier_fraction) os << "  outlier fraction " << num(*d.outlier_fraction) << '\n';
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
    if (name == "json") return ReportFormat::Json;
    if (name == "csv") return ReportFormat::Csv;
    if (name == "text") return ReportFormat::Text;
    throw ConfigError("format", "expected json, csv or text, got '" + std::string(name) + "'");
}

void to_json(json& j, const ConfidenceInterval& ci) {
    j = json{{"percentile", ci.percentile}, {"level", ci.level}, {"computable", ci.computable}};
    if (ci.computable) {
        j["lower"] = ci.lower;
        j["upper"] = ci.upper;
    }
}

void to_json(json& j, const ExperimentReport& r) {
    json rel = json::array();
    for (const auto& [p, ok] : r.reliability) rel.push_back({{"percentile", p}, {"reliable", ok}});
    j = json{{"technique", r.technique},
             {"workload", r.workload},
             {"seed", r.seed},
             {"stop_location", r.stop_location},
             {"terminated_by", to_string(r.terminated_by)},
             {"accuracy", r.accuracy},
             {"reliability", rel},
             {"total_repetitions", r.total_repetitions}};
}

void from_json(const json& j, ExperimentReport& r) {
    j.at("technique").get_to(r.technique);
    j.at("workload").get_to(r.workload);
    j.at("seed").get_to(r.seed);
    j.at("stop_location").get_to(r.stop_location);
    r.terminated_by = termination_from_string(j.at("terminated_by").get<std::string>());
    j.at("accuracy").get_to(r.accuracy);
    r.reliability.clear();
    for (const auto& e : j.at("reliability")) {
        r.reliability.emplace_back(e.at("percentile").get<double>(), e.at("reliable").get<bool>());
    }
    j.at("total_repetitions").get_to(r.total_repetitions);
}

void to_json(json& j, const ComparisonCell& c) {
    j = json{{"workload", c.workload}, {"technique", c.technique}, {"seed", c.seed}};
    j["report"] = c.report ? json(*c.report) : json(nullptr);
    j["error"] = c.error;
}

void from_json(const json& j, ComparisonCell& c) {
    j.at("workload").get_to(c.workload);
    j.at("technique").get_to(c.technique);
    j.at("seed").get_to(c.seed);
    const auto& rep = j.at("report");
    c.report = rep.is_null() ? std::nullopt : std::optional<ExperimentReport>(rep.get<ExperimentReport>());
    j.at("error").get_to(c.error);
}

void to_json(json& j, const TechniqueAggregate& a) {
    json rel = json::array();
    for (const auto& [p, f] : a.reliability_fraction) rel.push_back({{"percentile", p}, {"fraction", f}});
    j = json{{"technique", a.technique},
             {"experiments", a.experiments},
             {"failures", a.failures},
             {"cap_terminated", a.cap_terminated},
             {"mean_accuracy", a.mean_accuracy},
             {"reliability_fraction", rel},
             {"total_repetitions", a.total_repetitions}};
}

void from_json(const json& j, TechniqueAggregate& a) {
    j.at("technique").get_to(a.technique);
    j.at("experiments").get_to(a.experiments);
    j.at("failures").get_to(a.failures);
    j.at("cap_terminated").get_to(a.cap_terminated);
    j.at("mean_accuracy").get_to(a.mean_accuracy);
    a.reliability_fraction.clear();
    for (const auto& e : j.at("reliability_fraction")) {
        a.reliability_fraction.emplace_back(e.at("percentile").get<double>(), e.at("fraction").get<double>());
    }
    j.at("total_repetitions").get_to(a.total_repetitions);
}

void to_json(json& j, const ComparisonReport& r) { j = json{{"cells", r.cells}, {"aggregates", r.aggregates}}; }

void from_json(const json& j, ComparisonReport& r) {
    j.at("cells").get_to(r.cells);
    j.at("aggregates").get_to(r.aggregates);
}

namespace {

json check_json(const PercentileCheck& c) {
    return json{{"percentile", c.percentile}, {"observed", c.observed},     {"ci", c.ci},
                {"margin_low", c.margin_low}, {"margin_high", c.margin_high}, {"dci", c.dci}};
}

json diagnostics_json(const AccuracyDiagnostics& d) {
    json checks = json::array();
    for (const auto& c : d.checks) checks.push_back(check_json(c));
    json j{{"sample_count", d.sample_count}, {"checks", checks}, {"passed", d.passed}};
    if (d.tail) j["tail"] = check_json(*d.tail);
    if (d.outlier_fraction) j["outlier_fraction"] = *d.outlier_fraction;
    return j;
}

}  // namespace

void to_json(json& j, const StopDecision& d) {
    j = json{{"verdict", to_string(d.verdict)}, {"samples_used", d.samples_used}, {"current", diagnostics_json(d.current)}};
    j["previous"] = d.previous ? diagnostics_json(*d.previous) : json(nullptr);
}

namespace {

json component_json(const Component& c) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Lognormal>) {
                return {{"model", "lognormal"}, {"mu", m.mu}, {"sigma", m.sigma}};
            } else {
                return {{"model", "gamma"}, {"shape", m.shape}, {"scale", m.scale}};
            }
        },
        c);
}

double number_at(const json& j, const char* key, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number()) throw ConfigError(path + key, "expected a number");
    return it->get<double>();
}

std::string model_name(const json& j, const std::string& path) {
    const auto it = j.find("model");
    if (!j.is_object() || it == j.end() || !it->is_string()) throw ConfigError(path + "model", "expected a model name");
    return it->get<std::string>();
}

Component component_from(const json& j, const std::string& path) {
    const auto name = model_name(j, path);
    if (name == "lognormal") return Lognormal{number_at(j, "mu", path), number_at(j, "sigma", path)};
    if (name == "gamma") return Gamma{number_at(j, "shape", path), number_at(j, "scale", path)};
    throw ConfigError(path + "model", "expected lognormal or gamma, got '" + name + "'");
}

const json& object_at(const json& j, const char* key, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_object()) throw ConfigError(path + key, "expected an object");
    return *it;
}

}  // namespace

void to_json(json& j, const WorkloadSpec& w) {
    j = std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Lognormal> || std::is_same_v<T, Gamma>) {
                return component_json(m);
            } else if constexpr (std::is_same_v<T, BimodalMixture>) {
                return {{"model", "bimodal"},
                        {"first", component_json(m.first)},
                        {"second", component_json(m.second)},
                        {"weight", m.weight}};
            } else if constexpr (std::is_same_v<T, AR1Lognormal>) {
                return {{"model", "ar1"}, {"mu", m.mu}, {"sigma", m.sigma}, {"phi", m.phi}};
            } else {
                return {{"model", "cold_warm"},
                        {"cold", component_json(m.cold)},
                        {"warm", component_json(m.warm)},
                        {"cold_probability", m.cold_probability}};
            }
        },
        w.model);
    j["seed"] = w.seed;
}

void from_json(const json& j, WorkloadSpec& w) {
    const std::string path = "workload.";
    const auto name = model_name(j, path);
    if (name == "lognormal" || name == "gamma") {
        w.model = std::visit([](const auto& c) -> WorkloadModel { return c; }, component_from(j, path));
    } else if (name == "bimodal") {
        w.model = BimodalMixture{component_from(object_at(j, "first", path), path + "first."),
                                 component_from(object_at(j, "second", path), path + "second."),
                                 number_at(j, "weight", path)};
    } else if (name == "ar1") {
        w.model = AR1Lognormal{number_at(j, "mu", path), number_at(j, "sigma", path), number_at(j, "phi", path)};
    } else if (name == "cold_warm") {
        w.model = ColdWarmMix{component_from(object_at(j, "cold", path), path + "cold."),
                              component_from(object_at(j, "warm", path), path + "warm."),
                              number_at(j, "cold_probability", path)};
    } else {
        throw ConfigError(path + "model", "unknown model '" + name + "'");
    }
    if (const auto it = j.find("seed"); it != j.end()) {
        if (!it->is_number_unsigned()) throw ConfigError(path + "seed", "expected a non-negative integer");
        w.seed = it->get<std::uint64_t>();
    }
    w.validate();
}

std::string emit_report(const ExperimentReport& r, ReportFormat format, const json& config) {
    std::ostringstream os;
    switch (format) {
        case ReportFormat::Json:
            return envelope("experiment", r, config).dump(2) + "\n";
        case ReportFormat::Csv: {
            const auto ps = reliability_columns({&r});
            os << csv_header(ps);
            csv_row(os, r.workload, r.technique, r.seed, &r, ps, "");
            break;
        }
        case ReportFormat::Text:
            text_experiment(os, r);
            break;
    }
    return os.str();
}

std::string emit_report(const ComparisonReport& r, ReportFormat format, const json& config) {
    std::ostringstream os;
    switch (format) {
        case ReportFormat::Json:
            return envelope("comparison", r, config).dump(2) + "\n";
        case ReportFormat::Csv: {
            std::vector<const ExperimentReport*> reports;
            for (const auto& c : r.cells) {
                if (c.report) reports.push_back(&*c.report);
            }
            const auto ps = reliability_columns(reports);
            os << csv_header(ps);
            for (const auto& c : r.cells) {
                csv_row(os, c.workload, c.technique, c.seed, c.report ? &*c.report : nullptr, ps, c.error);
            }
            break;
        }
        case ReportFormat::Text: {
            os << "technique                 runs  fail  cap  mean_acc  total_reps  reliable";
            os << '\n';
            for (const auto& a : r.aggregates) {
                char line[160];
                std::snprintf(line, sizeof line, "%-24s %5zu %5zu %4zu  %8.3f  %10zu ", a.technique.c_str(),
                              a.experiments, a.failures, a.cap_terminated, a.mean_accuracy, a.total_repetitions);
                os << line;
                for (const auto& [p, f] : a.reliability_fraction) {
                    std::snprintf(line, sizeof line, " %s=%.2f", percent_label(p).c_str(), f);
                    os << line;
                }
                os << '\n';
            }
            std::size_t failed = 0;
            for (const auto& c : r.cells) {
                if (!c.report) {
                    if (failed++ == 0) os << "\nfailed cells:\n";
                    os << "  " << c.workload << " / " << c.technique << " / seed " << c.seed << ": " << c.error << '\n';
                }
            }
            break;
        }
    }
    return os.str();
}

std::string emit_test(const TestReport& r, ReportFormat format, const json& config) {
    const Verdict verdict = r.terminated_by == Termination::Criterion ? Verdict::Stop
                            : r.terminated_by == Termination::Cap     ? Verdict::CapReached
                                                                      : Verdict::Continue;
    std::ostringstream os;
    switch (format) {
        case ReportFormat::Json: {
            json metrics = json::array();
            for (const auto& m : r.metric_trace) metrics.push_back(m ? json(*m) : json(nullptr));
            json rep{{"technique", r.technique},       {"verdict", to_string(verdict)},
                     {"stop_location", r.stop_location}, {"terminated_by", to_string(r.terminated_by)},
                     {"samples", r.samples},           {"decisions", r.decisions},
                     {"metric_trace", metrics}};
            return envelope("test", rep, config).dump(2) + "\n";
        }
        case ReportFormat::Csv:
            os << "round,samples_used,verdict,passed,metric\n";
            if (!r.decisions.empty()) {
                for (std::size_t i = 0; i < r.decisions.size(); ++i) {
                    const auto& d = r.decisions[i];
                    os << i + 1 << ',' << d.samples_used << ',' << to_string(d.verdict) << ','
                       << (d.current.passed ? "true" : "false") << ",\n";
                }
            } else {
                for (std::size_t i = 0; i < r.metric_trace.size(); ++i) {
                    os << i + 1 << ",,,,";
                    if (r.metric_trace[i]) os << num(*r.metric_trace[i]);
                    os << '\n';
                }
            }
            break;
        case ReportFormat::Text: {
            os << "technique:     " << r.technique << '\n'
               << "verdict:       " << to_string(verdict) << '\n'
               << "stop location: " << r.stop_location << '\n'
               << "terminated by: " << to_string(r.terminated_by) << '\n';
            if (!r.samples.empty()) {
                const SampleSeries s(r.samples);
                os << "percentiles:  ";
                for (double p : kReliabilityPercentiles) os << ' ' << percent_label(p) << '=' << num(percentile(s, p));
                os << '\n';
            }
            if (!r.decisions.empty()) {
                const auto& last = r.decisions.back();
                os << "last round (" << last.current.sample_count << " samples):\n";
                text_checks(os, last.current);
                if (last.previous) {
                    os << "previous set (" << last.previous->sample_count << " samples):\n";
                    text_checks(os, *last.previous);
                }
            } else if (!r.metric_trace.empty() && r.metric_trace.back()) {
                os << "last metric:   " << num(*r.metric_trace.back()) << '\n';
            }
            break;
        }
    }
    return os.str();
}

ExperimentReport parse_experiment_report(std::string_view text) {
    return parse_wrapped<ExperimentReport>(text, "experiment");
}

ComparisonReport parse_comparison_report(std::string_view text) {
    return parse_wrapped<ComparisonReport>(text, "comparison");
}

}  // namespace perfstop
