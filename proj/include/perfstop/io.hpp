#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "perfstop/series.hpp"

namespace perfstop {

// csv:   one record per line, `latency_ms` or `index,latency_ms`; an optional
//        header on the first line is detected automatically.
// jsonl: one object per line carrying a numeric `latency_ms` field.
enum class SampleFormat { Csv, Jsonl };

// .jsonl / .ndjson select Jsonl, anything else Csv.
SampleFormat sample_format_for(const std::filesystem::path& path);
SampleFormat parse_sample_format(std::string_view name);

// File order is preserved. Blank lines are skipped. Throws InputError citing
// the 1-based line number and its content for malformed, non-finite or
// non-positive records, and for files without any record.
SampleSeries parse_samples(const std::filesystem::path& path, SampleFormat format);
SampleSeries parse_samples_text(std::string_view text, SampleFormat format);

std::string format_samples(const SampleSeries& series, SampleFormat format);

}  // namespace perfstop
