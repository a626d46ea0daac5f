// perfstop: command-line front end for the stopping engine, the baselines and
// the evaluation harness.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "perfstop/error.hpp"
#include "perfstop/external.hpp"
#include "perfstop/harness.hpp"
#include "perfstop/io.hpp"
#include "perfstop/rng.hpp"
#include "perfstop/serialize.hpp"
#include "perfstop/workload.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace perfstop;

namespace {

struct Options {
    // technique
    std::vector<std::string> methods;
    double cl = 0.95;
    double r = 0.01;
    std::size_t interval = 5;
    std::size_t max_samples = 1000;
    std::size_t resamples = 1000;
    std::optional<double> tail_margin;
    std::optional<double> outlier_max;
    double p0 = 0.90;
    double e0 = 0.03;
    std::size_t confirm_rounds = 1000;
    std::optional<std::uint64_t> seed;

    // sources
    std::string input;
    std::string input_format;
    std::string exec;
    std::int64_t timeout_ms = 60000;
    std::vector<std::string> presets;
    std::string ground_truth;

    // harness
    std::vector<std::uint64_t> seeds;
    std::size_t gt_size = 1000;
    unsigned threads = 1;
    std::string param;
    std::vector<double> values;
    std::size_t count = 1000;

    // output
    std::string format;
    std::string out;
    std::string config_path;
    json config_file;  // parsed --config, or null
};

class Output {
public:
    // Opened before any computation so an unwritable path fails fast.
    explicit Output(const std::string& path) : path_(path) {
        if (path_.empty()) return;
        existed_ = fs::exists(path_);
        file_.open(path_, std::ios::binary | std::ios::app);
        if (!file_) throw InputError("cannot write output file '" + path_ + "'");
    }
    ~Output() {
        if (!committed_ && file_.is_open()) {
            file_.close();
            if (!existed_) fs::remove(path_);
        }
    }
    void write(const std::string& text) {
        if (path_.empty()) {
            std::cout << text;
            return;
        }
        file_.close();
        file_.open(path_, std::ios::binary | std::ios::trunc);
        file_ << text;
        file_.flush();
        if (!file_) throw InputError("failed writing '" + path_ + "'");
        committed_ = true;
    }

private:
    std::string path_;
    std::ofstream file_;
    bool existed_ = false;
    bool committed_ = false;
};

// Config keys are the long flag names. A flag given on the command line wins.
template <typename T>
void fill(const json& cfg, const CLI::App& app, const std::string& key, T& target) {
    if (!cfg.is_object()) return;
    const auto it = cfg.find(key);
    if (it == cfg.end()) return;
    const auto* opt = app.get_option_no_throw("--" + key);
    if (opt && opt->count() > 0) return;
    try {
        if constexpr (std::is_same_v<T, std::optional<double>> || std::is_same_v<T, std::optional<std::uint64_t>>) {
            target = it->get<typename T::value_type>();
        } else {
            target = it->get<T>();
        }
    } catch (const json::exception&) {
        throw ConfigError(key, "wrong type in config file");
    }
}

void apply_config(Options& o, const CLI::App& app) {
    if (o.config_path.empty()) return;
    std::ifstream in(o.config_path);
    if (!in) throw InputError("cannot open config file '" + o.config_path + "'");
    try {
        o.config_file = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw InputError(o.config_path + ": " + e.what());
    }
    if (!o.config_file.is_object()) throw InputError(o.config_path + ": expected a JSON object");
    const json& c = o.config_file;
    if (c.contains("method") && app.get_option("--method")->count() == 0) {
        const auto& m = c["method"];
        o.methods = m.is_array() ? m.get<std::vector<std::string>>() : std::vector<std::string>{m.get<std::string>()};
    }
    fill(c, app, "cl", o.cl);
    fill(c, app, "r", o.r);
    fill(c, app, "interval", o.interval);
    fill(c, app, "max-samples", o.max_samples);
    fill(c, app, "resamples", o.resamples);
    fill(c, app, "tail-margin", o.tail_margin);
    fill(c, app, "outlier-max", o.outlier_max);
    fill(c, app, "p0", o.p0);
    fill(c, app, "e0", o.e0);
    fill(c, app, "confirm-rounds", o.confirm_rounds);
    fill(c, app, "seed", o.seed);
    fill(c, app, "input", o.input);
    fill(c, app, "input-format", o.input_format);
    fill(c, app, "exec", o.exec);
    fill(c, app, "timeout", o.timeout_ms);
    fill(c, app, "preset", o.presets);
    fill(c, app, "ground-truth", o.ground_truth);
    fill(c, app, "seeds", o.seeds);
    fill(c, app, "gt-size", o.gt_size);
    fill(c, app, "threads", o.threads);
    fill(c, app, "param", o.param);
    fill(c, app, "values", o.values);
    fill(c, app, "count", o.count);
    fill(c, app, "format", o.format);
    fill(c, app, "out", o.out);
}

std::uint64_t resolve_seed(Options& o) {
    if (!o.seed) {
        o.seed = std::random_device{}() | (static_cast<std::uint64_t>(std::random_device{}()) << 32);
        std::cerr << "seed: " << *o.seed << '\n';
    }
    return *o.seed;
}

MethodOptions method_options(const Options& o) {
    MethodOptions m;
    m.confidence_level = o.cl;
    m.error_margin = o.r;
    m.run_interval = o.interval;
    m.max_samples = o.max_samples;
    m.resamples = o.resamples;
    m.tail_margin = o.tail_margin;
    m.outlier_max = o.outlier_max;
    m.objective_probability = o.p0;
    m.max_error = o.e0;
    m.confirm_rounds = o.confirm_rounds;
    return m;
}

json method_json(const Options& o) {
    json j{{"cl", o.cl},           {"r", o.r},   {"interval", o.interval}, {"max-samples", o.max_samples},
           {"resamples", o.resamples}, {"p0", o.p0}, {"e0", o.e0},             {"confirm-rounds", o.confirm_rounds}};
    j["tail-margin"] = o.tail_margin ? json(*o.tail_margin) : json(nullptr);
    j["outlier-max"] = o.outlier_max ? json(*o.outlier_max) : json(nullptr);
    return j;
}

ReportFormat report_format(const Options& o) { return parse_report_format(o.format.empty() ? "json" : o.format); }

SampleFormat input_format_for(const Options& o, const std::string& path) {
    return o.input_format.empty() ? sample_format_for(path) : parse_sample_format(o.input_format);
}

void require_readable(const std::string& path, const char* what) {
    if (!fs::is_regular_file(path)) throw InputError(std::string(what) + " '" + path + "' does not exist");
}

// Workload named by --preset, or "workload" in the config file.
std::optional<NamedWorkload> single_workload(const Options& o, std::uint64_t seed) {
    if (!o.presets.empty()) return NamedWorkload{o.presets.front(), preset(o.presets.front(), seed)};
    if (o.config_file.is_object() && o.config_file.contains("workload")) {
        auto spec = o.config_file["workload"].get<WorkloadSpec>();
        if (!o.config_file["workload"].contains("seed")) spec.seed = seed;
        return NamedWorkload{"config", spec};
    }
    return std::nullopt;
}

std::vector<NamedWorkload> workload_list(const Options& o) {
    if (!o.presets.empty()) {
        std::vector<NamedWorkload> out;
        for (const auto& name : o.presets) {
            if (name == "desk") {
                for (auto& w : desk_suite()) out.push_back(std::move(w));
            } else {
                out.push_back({name, preset(name, 0)});
            }
        }
        return out;
    }
    if (o.config_file.is_object() && o.config_file.contains("workloads")) {
        std::vector<NamedWorkload> out;
        for (const auto& w : o.config_file["workloads"]) {
            out.push_back({w.at("name").get<std::string>(), w.at("workload").get<WorkloadSpec>()});
        }
        return out;
    }
    return desk_suite();
}

json workloads_json(const std::vector<NamedWorkload>& ws) {
    json arr = json::array();
    for (const auto& w : ws) arr.push_back({{"name", w.name}, {"workload", w.spec}});
    return arr;
}

std::vector<std::uint64_t> seed_list(Options& o) {
    if (!o.seeds.empty()) return o.seeds;
    return {resolve_seed(o)};
}

int cmd_test(Options& o) {
    const bool config_workload = o.config_file.is_object() && o.config_file.contains("workload");
    const int sources = !o.input.empty() + !o.exec.empty() + (!o.presets.empty() || config_workload);
    if (sources != 1) throw ConfigError("input", "give exactly one of --input, --exec, --preset");
    if (o.methods.size() > 1) throw ConfigError("method", "test runs a single method");
    if (!o.input.empty()) require_readable(o.input, "input file");
    const auto format = report_format(o);
    Output out(o.out);

    const std::string method = o.methods.empty() ? "scope1" : o.methods.front();
    const auto technique = make_technique(method, method_options(o));
    const std::uint64_t seed = resolve_seed(o);

    json config = method_json(o);
    config["method"] = method;
    config["seed"] = seed;

    std::unique_ptr<SampleSource> source;
    if (!o.input.empty()) {
        source = std::make_unique<SeriesSource>(parse_samples(o.input, input_format_for(o, o.input)));
        config["input"] = o.input;
    } else if (!o.exec.empty()) {
        if (o.timeout_ms <= 0) throw ConfigError("timeout", "must be positive");
        source = std::make_unique<ExternalCommandSource>(o.exec, std::chrono::milliseconds(o.timeout_ms));
        config["exec"] = o.exec;
        config["timeout"] = o.timeout_ms;
    } else {
        const auto w = single_workload(o, derive_seed(seed, 0x5e));
        config["preset"] = w->name;
        config["workload"] = w->spec;
        source = as_source(w->spec);
    }

    auto test = technique.instantiate(derive_seed(seed, 0x7e));
    const auto outcome = drive(*test, *source);

    TestReport report;
    report.technique = technique.label;
    report.stop_location = outcome.stop_location;
    report.terminated_by = outcome.terminated_by;
    const auto values = test->samples().values();
    report.samples.assign(values.begin(), values.end());
    if (const auto* session = dynamic_cast<const Session*>(test.get())) report.decisions = session->trace();
    if (const auto* baseline = dynamic_cast<const IntervalTest*>(test.get())) report.metric_trace = baseline->metric_trace();
    out.write(emit_test(report, format, config));
    return 0;
}

int cmd_evaluate(Options& o) {
    if (o.input.empty()) throw ConfigError("input", "evaluate needs --input");
    if (o.ground_truth.empty()) throw ConfigError("ground-truth", "evaluate needs --ground-truth");
    require_readable(o.input, "input file");
    require_readable(o.ground_truth, "ground-truth file");
    if (o.methods.size() > 1) throw ConfigError("method", "evaluate takes at most one method");
    const auto format = report_format(o);
    Output out(o.out);

    const auto samples = parse_samples(o.input, input_format_for(o, o.input));
    const auto gt = build_ground_truth(parse_samples(o.ground_truth, input_format_for(o, o.ground_truth)));
    json config{{"input", o.input}, {"ground-truth", o.ground_truth}};

    ExperimentReport report;
    report.workload = o.input;
    SampleSeries graded = samples;
    if (o.methods.empty()) {
        report.technique = "input";
        report.stop_location = samples.size();
        report.terminated_by = Termination::SourceExhausted;
    } else {
        const auto technique = make_technique(o.methods.front(), method_options(o));
        report.seed = resolve_seed(o);
        config.update(method_json(o));
        config["method"] = technique.label;
        config["seed"] = report.seed;
        auto test = technique.instantiate(derive_seed(report.seed, 0x7e));
        SeriesSource source(samples);
        const auto outcome = drive(*test, source);
        report.technique = technique.label;
        report.stop_location = outcome.stop_location;
        report.terminated_by = outcome.terminated_by;
        graded = test->samples();
    }
    report.total_repetitions = report.stop_location;
    report.accuracy = evaluate_accuracy(graded, gt);
    for (double p : kReliabilityPercentiles) report.reliability.emplace_back(p, evaluate_reliability(graded, gt, p));
    out.write(emit_report(report, format, config));
    return 0;
}

int cmd_simulate(Options& o) {
    if (o.count < 1) throw ConfigError("count", "must be >= 1");
    const auto format = o.format.empty() ? SampleFormat::Csv : parse_sample_format(o.format);
    Output out(o.out);
    const std::uint64_t seed = resolve_seed(o);
    const auto w = single_workload(o, seed);
    if (!w) throw ConfigError("preset", "simulate needs --preset or a workload in --config");
    out.write(format_samples(generate(w->spec, o.count), format));
    return 0;
}

int run_comparison(Options& o, const std::vector<TechniqueSpec>& techniques, json config) {
    const auto format = report_format(o);
    Output out(o.out);
    const auto workloads = workload_list(o);
    const auto seeds = seed_list(o);
    ExperimentOptions eo;
    eo.ground_truth_size = o.gt_size;
    config.update(method_json(o));
    config["seeds"] = seeds;
    config["gt-size"] = o.gt_size;
    config["workloads"] = workloads_json(workloads);
    const auto report = compare_strategies(workloads, techniques, seeds, eo, std::max(1u, o.threads));
    out.write(emit_report(report, format, config));
    return 0;
}

int cmd_compare(Options& o) {
    if (o.methods.empty()) o.methods = {"scope1", "pt4cloud", "metior", "confirm", "fixed:500"};
    std::vector<TechniqueSpec> techniques;
    for (const auto& m : o.methods) techniques.push_back(make_technique(m, method_options(o)));
    return run_comparison(o, techniques, json{{"method", o.methods}});
}

int cmd_sweep(Options& o) {
    if (o.methods.size() > 1) throw ConfigError("method", "sweep takes a single method");
    const std::string method = o.methods.empty() ? "scope1" : o.methods.front();
    if (o.param.empty()) o.param = "r";
    if (o.values.empty()) {
        if (o.param == "r") o.values = {0.05, 0.04, 0.03, 0.02, 0.01};
        else if (o.param == "interval") o.values = {3, 4, 5, 10, 20};
        else throw ConfigError("values", "no default values for --param " + o.param);
    }
    const auto techniques = sweep_techniques(method, method_options(o), o.param, o.values);
    return run_comparison(o, techniques, json{{"method", method}, {"param", o.param}, {"values", o.values}});
}

void add_method_flags(CLI::App* sub, Options& o, bool many) {
    auto* m = sub->add_option("--method", o.methods,
                              many ? "Techniques to run (repeatable)"
                                   : "scope1|scope2|scope3|pt4cloud|metior|confirm|fixed:<N>");
    if (!many) m->expected(1);
    sub->add_option("--cl", o.cl, "Confidence level");
    sub->add_option("--r", o.r, "Error margin as a fraction");
    sub->add_option("--interval", o.interval, "Samples per round (k)");
    sub->add_option("--max-samples", o.max_samples, "Sample cap");
    sub->add_option("--resamples", o.resamples, "Bootstrap resamples");
    sub->add_option("--tail-margin", o.tail_margin, "Enable the p95 check with this margin");
    sub->add_option("--outlier-max", o.outlier_max, "Enable the IQR outlier check with this maximum fraction");
    sub->add_option("--p0", o.p0, "PT4Cloud objective probability");
    sub->add_option("--e0", o.e0, "Metior / CONFIRM maximum error");
    sub->add_option("--confirm-rounds", o.confirm_rounds, "CONFIRM subsample rounds");
}

void add_common_flags(CLI::App* sub, Options& o) {
    sub->add_option("--seed", o.seed, "Seed for all randomness; picked and printed when omitted");
    sub->add_option("--format", o.format, "Output format");
    sub->add_option("--out", o.out, "Output file (default stdout)");
    sub->add_option("--config", o.config_path, "JSON config file; flags override its values");
}

void add_harness_flags(CLI::App* sub, Options& o) {
    sub->add_option("--preset", o.presets, "Workload presets, or 'desk' for the 30-workload suite (repeatable)");
    sub->add_option("--seeds", o.seeds, "Experiment seeds");
    sub->add_option("--gt-size", o.gt_size, "Ground-truth sample count");
    sub->add_option("--threads", o.threads, "Worker threads");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential stopping for latency performance tests"};
    app.require_subcommand(1);
    Options o;

    auto* test = app.add_subcommand("test", "Run one stopping session on a file, command or preset");
    add_method_flags(test, o, false);
    add_common_flags(test, o);
    test->add_option("--input", o.input, "Sample file (csv or jsonl)");
    test->add_option("--input-format", o.input_format, "csv|jsonl (default from extension)");
    test->add_option("--exec", o.exec, "Command to time, run through /bin/sh");
    test->add_option("--timeout", o.timeout_ms, "Per-invocation timeout for --exec in ms");
    test->add_option("--preset", o.presets, "Workload preset")->expected(1);

    auto* evaluate = app.add_subcommand("evaluate", "Grade samples against a ground-truth file");
    add_method_flags(evaluate, o, false);
    add_common_flags(evaluate, o);
    evaluate->add_option("--input", o.input, "Samples to grade, or to feed --method");
    evaluate->add_option("--input-format", o.input_format, "csv|jsonl (default from extension)");
    evaluate->add_option("--ground-truth", o.ground_truth, "Ground-truth sample file");

    auto* simulate = app.add_subcommand("simulate", "Emit a synthetic latency trace");
    add_common_flags(simulate, o);
    simulate->add_option("--preset", o.presets, "Workload preset")->expected(1);
    simulate->add_option("-n,--count", o.count, "Number of samples");

    auto* compare = app.add_subcommand("compare", "Run techniques across workloads and seeds");
    add_method_flags(compare, o, true);
    add_common_flags(compare, o);
    add_harness_flags(compare, o);

    auto* sweep = app.add_subcommand("sweep", "Sweep one parameter of a technique");
    add_method_flags(sweep, o, false);
    add_common_flags(sweep, o);
    add_harness_flags(sweep, o);
    sweep->add_option("--param", o.param, "r|cl|interval|p0|e0");
    sweep->add_option("--values", o.values, "Parameter values");

    app.footer("Presets: " + [] {
        std::string s;
        for (const auto& n : preset_names()) s += (s.empty() ? "" : ", ") + n;
        return s;
    }());

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        apply_config(o, *sub);
        if (sub == test) return cmd_test(o);
        if (sub == evaluate) return cmd_evaluate(o);
        if (sub == simulate) return cmd_simulate(o);
        if (sub == compare) return cmd_compare(o);
        return cmd_sweep(o);
    } catch (const ConfigError& e) {
        std::cerr << "perfstop: invalid " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "perfstop: " << e.what() << '\n';
        return 1;
    }
}
