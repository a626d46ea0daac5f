#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "perfstop/rng.hpp"
#include "perfstop/sequential.hpp"
#include "perfstop/series.hpp"

namespace perfstop {

// Latency models, all supported on the positive half-line. Units are ms.
struct Lognormal {
    double mu = 0.0;
    double sigma = 1.0;
};

struct Gamma {
    double shape = 1.0;
    double scale = 1.0;
};

using Component = std::variant<Lognormal, Gamma>;

// Draws from `second` with probability `weight`, else from `first`.
struct BimodalMixture {
    Component first;
    Component second;
    double weight = 0.5;
};

// exp(mu + x_t) with x_t = phi x_{t-1} + sigma sqrt(1 - phi^2) e_t, so the
// marginal is Lognormal(mu, sigma) and lag-1 correlation of the log is phi.
struct AR1Lognormal {
    double mu = 0.0;
    double sigma = 1.0;
    double phi = 0.0;
};

struct ColdWarmMix {
    Component cold;
    Component warm;
    double cold_probability = 0.1;
};

using WorkloadModel = std::variant<Lognormal, Gamma, BimodalMixture, AR1Lognormal, ColdWarmMix>;

struct WorkloadSpec {
    WorkloadModel model = Lognormal{};
    std::uint64_t seed = 0;

    // Throws ConfigError naming the offending field.
    void validate() const;
};

// Stateful stream for one spec. Batches continue a single random stream,
// so the batching pattern never changes the realized sequence.
class WorkloadSource final : public SampleSource {
public:
    explicit WorkloadSource(WorkloadSpec spec);
    std::vector<double> next_batch(std::size_t max_count) override;
    double next();

private:
    WorkloadSpec spec_;
    Rng rng_;
    bool has_state_ = false;
    double state_ = 0.0;  // AR(1) log deviation
};

SampleSeries generate(const WorkloadSpec& spec, std::size_t n);
std::unique_ptr<SampleSource> as_source(const WorkloadSpec& spec);

// Named regimes: warm, cold, mixed, ar1, bursty, noisy-bimodal, narrow.
WorkloadSpec preset(std::string_view name, std::uint64_t seed);
std::vector<std::string> preset_names();

std::string describe(const WorkloadModel& model);

}  // namespace perfstop
