#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

#include "perfstop/sequential.hpp"
#include "perfstop/series.hpp"

namespace perfstop {

// Runs `command` through /bin/sh `batch` times in sequence and returns the
// wall-clock duration of each run in milliseconds. A spawn failure, timeout or
// non-zero exit discards the whole batch and throws InputError carrying the
// tail of the command's output.
SampleSeries invoke_external(const std::string& command, std::size_t batch, std::chrono::milliseconds timeout);

class ExternalCommandSource final : public SampleSource {
public:
    ExternalCommandSource(std::string command, std::chrono::milliseconds timeout)
        : command_(std::move(command)), timeout_(timeout) {}

    std::vector<double> next_batch(std::size_t max_count) override;

private:
    std::string command_;
    std::chrono::milliseconds timeout_;
};

}  // namespace perfstop
