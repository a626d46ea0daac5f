#include "perfstop/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "perfstop/error.hpp"

namespace perfstop {

void validate_latency(double v) {
    if (!std::isfinite(v) || v <= 0.0) {
        throw PreconditionError("latency must be finite and > 0, got " + std::to_string(v));
    }
}

SampleSeries::SampleSeries(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) validate_latency(v);
}

SampleSeries::SampleSeries(std::initializer_list<double> values)
    : SampleSeries(std::vector<double>(values)) {}

void SampleSeries::append(double value) {
    validate_latency(value);
    values_.push_back(value);
}

void SampleSeries::append(std::span<const double> values) {
    for (double v : values) validate_latency(v);
    values_.insert(values_.end(), values.begin(), values.end());
}

SampleSeries SampleSeries::prefix(std::size_t count) const {
    SampleSeries out;
    out.values_.assign(values_.begin(),
                       values_.begin() + static_cast<std::ptrdiff_t>(std::min(count, values_.size())));
    return out;
}

SampleSeries SampleSeries::drop_last(std::size_t count) const {
    return prefix(count >= values_.size() ? 0 : values_.size() - count);
}

std::vector<double> SampleSeries::sorted() const {
    std::vector<double> out = values_;
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace perfstop
