#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace perfstop {

// Ordered latency observations in milliseconds. Insertion order is invocation
// order and is never changed; every value is finite and strictly positive.
class SampleSeries {
public:
    SampleSeries() = default;
    explicit SampleSeries(std::vector<double> values);
    SampleSeries(std::initializer_list<double> values);

    void append(double value);
    void append(std::span<const double> values);

    // First `count` observations (clamped to size()).
    SampleSeries prefix(std::size_t count) const;
    // Everything except the last `count` observations.
    SampleSeries drop_last(std::size_t count) const;

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    std::span<const double> values() const noexcept { return values_; }
    std::vector<double> sorted() const;

    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    bool operator==(const SampleSeries&) const = default;

private:
    std::vector<double> values_;
};

// Throws PreconditionError unless `v` is finite and > 0.
void validate_latency(double v);

}  // namespace perfstop
