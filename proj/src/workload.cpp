#include "perfstop/workload.hpp"

#include <cmath>
#include <sstream>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "perfstop/error.hpp"

namespace perfstop {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const std::string& field) {
    if (!(std::isfinite(v) && v > 0.0)) throw ConfigError(field, "must be finite and > 0");
}

void require_probability(double v, const std::string& field) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(field, "must lie in [0, 1]");
}

void validate_component(const Component& c, const std::string& prefix) {
    std::visit(overloaded{
                   [&](const Lognormal& m) {
                       if (!std::isfinite(m.mu)) throw ConfigError(prefix + ".mu", "must be finite");
                       require_positive(m.sigma, prefix + ".sigma");
                   },
                   [&](const Gamma& m) {
                       require_positive(m.shape, prefix + ".shape");
                       require_positive(m.scale, prefix + ".scale");
                   },
               },
               c);
}

double standard_normal(Rng& rng) {
    boost::random::normal_distribution<double> dist(0.0, 1.0);
    return dist(rng);
}

double draw(const Component& c, Rng& rng) {
    return std::visit(overloaded{
                          [&](const Lognormal& m) { return std::exp(m.mu + m.sigma * standard_normal(rng)); },
                          [&](const Gamma& m) {
                              boost::random::gamma_distribution<double> dist(m.shape, m.scale);
                              return dist(rng);
                          },
                      },
                      c);
}

std::string describe_component(const Component& c) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const Lognormal& m) { os << "lognormal(mu=" << m.mu << ", sigma=" << m.sigma << ")"; },
                   [&](const Gamma& m) { os << "gamma(shape=" << m.shape << ", scale=" << m.scale << ")"; },
               },
               c);
    return os.str();
}

}  // namespace

void WorkloadSpec::validate() const {
    std::visit(overloaded{
                   [](const Lognormal& m) { validate_component(m, "lognormal"); },
                   [](const Gamma& m) { validate_component(m, "gamma"); },
                   [](const BimodalMixture& m) {
                       validate_component(m.first, "bimodal.first");
                       validate_component(m.second, "bimodal.second");
                       require_probability(m.weight, "bimodal.weight");
                   },
                   [](const AR1Lognormal& m) {
                       if (!std::isfinite(m.mu)) throw ConfigError("ar1.mu", "must be finite");
                       require_positive(m.sigma, "ar1.sigma");
                       if (!(std::abs(m.phi) < 1.0)) throw ConfigError("ar1.phi", "|phi| must be < 1");
                   },
                   [](const ColdWarmMix& m) {
                       validate_component(m.cold, "cold_warm.cold");
                       validate_component(m.warm, "cold_warm.warm");
                       require_probability(m.cold_probability, "cold_warm.cold_probability");
                   },
               },
               model);
}

WorkloadSource::WorkloadSource(WorkloadSpec spec) : spec_(std::move(spec)), rng_(spec_.seed) { spec_.validate(); }

double WorkloadSource::next() {
    return std::visit(overloaded{
                          [&](const Lognormal& m) { return draw(m, rng_); },
                          [&](const Gamma& m) { return draw(m, rng_); },
                          [&](const BimodalMixture& m) {
                              const bool second = rng_.unit() < m.weight;
                              return draw(second ? m.second : m.first, rng_);
                          },
                          [&](const AR1Lognormal& m) {
                              const double e = standard_normal(rng_);
                              if (!has_state_) {
                                  state_ = m.sigma * e;
                                  has_state_ = true;
                              } else {
                                  state_ = m.phi * state_ + m.sigma * std::sqrt(1.0 - m.phi * m.phi) * e;
                              }
                              return std::exp(m.mu + state_);
                          },
                          [&](const ColdWarmMix& m) {
                              const bool cold = rng_.unit() < m.cold_probability;
                              return draw(cold ? m.cold : m.warm, rng_);
                          },
                      },
                      spec_.model);
}

std::vector<double> WorkloadSource::next_batch(std::size_t max_count) {
    std::vector<double> out(max_count);
    for (double& v : out) v = next();
    return out;
}

SampleSeries generate(const WorkloadSpec& spec, std::size_t n) {
    if (n < 1) throw PreconditionError("generate needs n >= 1");
    WorkloadSource source(spec);
    return SampleSeries(source.next_batch(n));
}

std::unique_ptr<SampleSource> as_source(const WorkloadSpec& spec) { return std::make_unique<WorkloadSource>(spec); }

WorkloadSpec preset(std::string_view name, std::uint64_t seed) {
    const double warm_mu = std::log(100.0);
    const double cold_mu = std::log(800.0);
    WorkloadSpec spec;
    spec.seed = seed;
    if (name == "warm") {
        spec.model = Lognormal{warm_mu, 0.05};
    } else if (name == "cold") {
        spec.model = BimodalMixture{Lognormal{cold_mu, 0.06}, Lognormal{std::log(1600.0), 0.35}, 0.10};
    } else if (name == "mixed") {
        spec.model = ColdWarmMix{Lognormal{cold_mu, 0.10}, Lognormal{warm_mu, 0.05}, 0.20};
    } else if (name == "ar1") {
        spec.model = AR1Lognormal{warm_mu, 0.05, 0.8};
    } else if (name == "bursty") {
        spec.model = BimodalMixture{Lognormal{warm_mu, 0.05}, Lognormal{std::log(400.0), 0.30}, 0.05};
    } else if (name == "noisy-bimodal") {
        spec.model = BimodalMixture{Lognormal{std::log(50.0), 0.30}, Lognormal{std::log(500.0), 0.30}, 0.5};
    } else if (name == "narrow") {
        spec.model = Lognormal{warm_mu, 0.10};
    } else {
        throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
    }
    return spec;
}

std::vector<std::string> preset_names() {
    return {"warm", "cold", "mixed", "ar1", "bursty", "noisy-bimodal", "narrow"};
}

std::string describe(const WorkloadModel& model) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const Lognormal& m) { os << describe_component(m); },
                   [&](const Gamma& m) { os << describe_component(m); },
                   [&](const BimodalMixture& m) {
                       os << "bimodal(" << describe_component(m.first) << ", " << describe_component(m.second)
                          << ", weight=" << m.weight << ")";
                   },
                   [&](const AR1Lognormal& m) {
                       os << "ar1_lognormal(mu=" << m.mu << ", sigma=" << m.sigma << ", phi=" << m.phi << ")";
                   },
                   [&](const ColdWarmMix& m) {
                       os << "cold_warm(" << describe_component(m.cold) << ", " << describe_component(m.warm)
                          << ", cold_probability=" << m.cold_probability << ")";
                   },
               },
               model);
    return os.str();
}

}  // namespace perfstop
