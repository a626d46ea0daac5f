#include "perfstop/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "perfstop/error.hpp"

namespace perfstop {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

[[noreturn]] void fail(std::size_t line_no, std::string_view line, const std::string& why) {
    throw InputError("line " + std::to_string(line_no) + ": " + why + " in '" + std::string(trim(line)) + "'");
}

double checked_latency(double v, std::size_t line_no, std::string_view line) {
    if (!std::isfinite(v)) fail(line_no, line, "non-finite latency");
    if (v <= 0.0) fail(line_no, line, "non-positive latency");
    return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

template <typename OnLine>
void for_each_line(std::string_view text, OnLine&& on_line) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++line_no;
        if (!trim(line).empty()) on_line(line_no, line);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
}

std::vector<double> parse_csv(std::string_view text) {
    std::vector<double> out;
    bool first_record = true;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const auto fields = split_fields(line);
        const bool is_first = first_record;
        first_record = false;
        if (fields.size() > 2) fail(line_no, line, "expected 1 or 2 fields");
        double value = 0.0;
        const bool numeric = parse_double(fields.back(), value);
        if (!numeric) {
            if (is_first) return;  // header
            fail(line_no, line, "unparseable latency");
        }
        if (fields.size() == 2) {
            double index = 0.0;
            if (!parse_double(fields.front(), index)) {
                if (is_first) return;
                fail(line_no, line, "unparseable index");
            }
        }
        out.push_back(checked_latency(value, line_no, line));
    });
    return out;
}

std::vector<double> parse_jsonl(std::string_view text) {
    std::vector<double> out;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            fail(line_no, line, "invalid JSON");
        }
        if (!obj.is_object()) fail(line_no, line, "expected a JSON object");
        const auto it = obj.find("latency_ms");
        if (it == obj.end() || !it->is_number()) fail(line_no, line, "missing numeric latency_ms");
        out.push_back(checked_latency(it->get<double>(), line_no, line));
    });
    return out;
}

}  // namespace

SampleFormat sample_format_for(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    return (ext == ".jsonl" || ext == ".ndjson") ? SampleFormat::Jsonl : SampleFormat::Csv;
}

SampleFormat parse_sample_format(std::string_view name) {
    if (name == "csv") return SampleFormat::Csv;
    if (name == "jsonl") return SampleFormat::Jsonl;
    throw ConfigError("format", "expected csv or jsonl, got '" + std::string(name) + "'");
}

SampleSeries parse_samples_text(std::string_view text, SampleFormat format) {
    std::vector<double> values = format == SampleFormat::Csv ? parse_csv(text) : parse_jsonl(text);
    if (values.empty()) throw InputError("no latency records found");
    return SampleSeries(std::move(values));
}

SampleSeries parse_samples(const std::filesystem::path& path, SampleFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open sample file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_samples_text(buf.str(), format);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

std::string format_samples(const SampleSeries& series, SampleFormat format) {
    std::ostringstream os;
    os << std::setprecision(17);
    if (format == SampleFormat::Csv) {
        os << "index,latency_ms\n";
        for (std::size_t i = 0; i < series.size(); ++i) os << i << ',' << series[i] << '\n';
    } else {
        for (double v : series) os << nlohmann::json{{"latency_ms", v}}.dump() << '\n';
    }
    return os.str();
}

}  // namespace perfstop
