#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "perfstop/error.hpp"
#include "perfstop/series.hpp"

namespace perfstop {

enum class Verdict { Stop, Continue, CapReached };
enum class Termination { Criterion, Cap, SourceExhausted };

std::string_view to_string(Verdict v) noexcept;
std::string_view to_string(Termination t) noexcept;
Verdict verdict_from_string(std::string_view s);
Termination termination_from_string(std::string_view s);

// Supplier of latency batches. Returning fewer than `max_count` values means
// the source is exhausted; the short batch is still valid data.
class SampleSource {
public:
    virtual ~SampleSource() = default;
    virtual std::vector<double> next_batch(std::size_t max_count) = 0;
};

// Serves a fixed, pre-collected series in order.
class SeriesSource final : public SampleSource {
public:
    explicit SeriesSource(SampleSeries series) : series_(std::move(series)) {}
    std::vector<double> next_batch(std::size_t max_count) override;

private:
    SampleSeries series_;
    std::size_t cursor_ = 0;
};

// Common shape of every stopping technique: append a batch, evaluate, and
// report Stop / Continue / CapReached. Single-owner; not thread-safe.
class SequentialTest {
public:
    virtual ~SequentialTest() = default;

    virtual std::string name() const = 0;
    // Samples to request for the next round.
    virtual std::size_t next_batch_size() const = 0;
    // Appends `batch` and evaluates. Throws Error once terminated().
    virtual Verdict step(std::span<const double> batch) = 0;
    // Appends a short final batch from an exhausted source without evaluating.
    virtual void finish(std::span<const double> tail) = 0;
    virtual const SampleSeries& samples() const = 0;
    virtual bool terminated() const = 0;
};

struct RunOutcome {
    std::size_t stop_location = 0;
    Termination terminated_by = Termination::SourceExhausted;
    std::size_t rounds = 0;
};

// Thrown when the source fails mid-run. Carries the samples gathered so far.
class SourceFailure : public Error {
public:
    SourceFailure(const std::string& what, SampleSeries partial) : Error(what), partial_(std::move(partial)) {}
    const SampleSeries& partial() const noexcept { return partial_; }

private:
    SampleSeries partial_;
};

// Loops test.step() until Stop, CapReached or exhaustion. Never draws past
// the stopping round.
RunOutcome drive(SequentialTest& test, SampleSource& source);

}  // namespace perfstop
