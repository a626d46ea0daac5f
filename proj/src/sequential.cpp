#include "perfstop/sequential.hpp"

#include <algorithm>
#include <exception>

namespace perfstop {

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Stop: return "stop";
        case Verdict::Continue: return "continue";
        case Verdict::CapReached: return "cap_reached";
    }
    return "?";
}

std::string_view to_string(Termination t) noexcept {
    switch (t) {
        case Termination::Criterion: return "criterion";
        case Termination::Cap: return "cap";
        case Termination::SourceExhausted: return "source_exhausted";
    }
    return "?";
}

Verdict verdict_from_string(std::string_view s) {
    for (Verdict v : {Verdict::Stop, Verdict::Continue, Verdict::CapReached}) {
        if (s == to_string(v)) return v;
    }
    throw Error("unknown verdict '" + std::string(s) + "'");
}

Termination termination_from_string(std::string_view s) {
    for (Termination t : {Termination::Criterion, Termination::Cap, Termination::SourceExhausted}) {
        if (s == to_string(t)) return t;
    }
    throw Error("unknown termination '" + std::string(s) + "'");
}

std::vector<double> SeriesSource::next_batch(std::size_t max_count) {
    const std::size_t take = std::min(max_count, series_.size() - cursor_);
    const auto values = series_.values();
    std::vector<double> out(values.begin() + static_cast<std::ptrdiff_t>(cursor_),
                            values.begin() + static_cast<std::ptrdiff_t>(cursor_ + take));
    cursor_ += take;
    return out;
}

RunOutcome drive(SequentialTest& test, SampleSource& source) {
    RunOutcome out;
    while (!test.terminated()) {
        const std::size_t want = test.next_batch_size();
        std::vector<double> batch;
        try {
            batch = source.next_batch(want);
        } catch (const std::exception& e) {
            throw SourceFailure(e.what(), test.samples());
        }
        if (batch.size() < want) {
            test.finish(batch);
            out.terminated_by = Termination::SourceExhausted;
            break;
        }
        ++out.rounds;
        const Verdict v = test.step(batch);
        if (v == Verdict::Stop) out.terminated_by = Termination::Criterion;
        if (v == Verdict::CapReached) out.terminated_by = Termination::Cap;
    }
    out.stop_location = test.samples().size();
    return out;
}

}  // namespace perfstop
