#include "ipvss/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ipvss/errors.hpp"

namespace ipvss {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_dimensions(const FilterState& state, const Sample& sample) {
    if (sample.regressor.size() != state.taps.size()) {
        throw ConfigError("regressor length " + std::to_string(sample.regressor.size()) +
                          " does not match filter length " + std::to_string(state.taps.size()));
    }
}

double squared_norm(std::span<const double> v) {
    return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

void momentum_in_place(FilterState& state, const Sample& sample, double error, double eta) {
    const double energy = squared_norm(sample.regressor);
    if (energy == 0.0) return;
    const double gain = (1.0 - eta) * error / energy;
    for (std::size_t i = 0; i < state.vss_momentum.size(); ++i) {
        state.vss_momentum[i] = eta * state.vss_momentum[i] + gain * sample.regressor[i];
    }
}

}  // namespace

FilterState FilterState::zeros(std::size_t n_taps) {
    if (n_taps == 0) throw ConfigError("filter length must be at least 1", "n_taps");
    return FilterState{std::vector<double>(n_taps, 0.0), 1, std::vector<double>(n_taps, 0.0)};
}

Algorithm algorithm_of(const StepSizeSchedule& schedule) noexcept {
    return std::visit(overloaded{
                          [](const InvariantStep&) { return Algorithm::IssLms; },
                          [](const IterationPromotingStep&) { return Algorithm::IpvssLms; },
                          [](const ErrorDrivenStep&) { return Algorithm::VssLms; },
                      },
                      schedule);
}

std::string_view to_string(Algorithm algorithm) noexcept {
    switch (algorithm) {
        case Algorithm::IssLms: return "ISS-LMS";
        case Algorithm::VssLms: return "VSS-LMS";
        case Algorithm::IpvssLms: return "IPVSS-LMS";
    }
    return "unknown";
}

void validate_schedule(const StepSizeSchedule& schedule, double lambda_max) {
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
        throw ConfigError("lambda_max must be positive and finite", "lambda_max");
    }
    const double limit = 1.0 / lambda_max;
    auto require = [](bool ok, const char* field, const std::string& what) {
        if (!ok) throw ConfigError(what, field);
    };
    std::visit(overloaded{
                   [&](const InvariantStep& s) {
                       require(s.mu > 0.0 && std::isfinite(s.mu), "mu", "must be > 0");
                       require(s.mu < limit, "mu", "must be < 1/lambda_max");
                   },
                   [&](const IterationPromotingStep& s) {
                       require(s.mu0 > 0.0 && std::isfinite(s.mu0), "mu0", "must be > 0");
                       require(s.phi > 0.0, "phi", "must be > 0");
                       require(s.phi <= s.mu0, "phi", "must satisfy phi <= mu0");
                       require(s.mu0 < limit, "mu0", "must be < 1/lambda_max");
                   },
                   [&](const ErrorDrivenStep& s) {
                       require(s.mu0 > 0.0 && std::isfinite(s.mu0), "mu0", "must be > 0");
                       require(s.eta >= 0.0 && s.eta < 1.0, "eta", "must lie in [0, 1)");
                       require(s.c > 0.0 && std::isfinite(s.c), "c", "must be > 0");
                       require(s.mu0 < limit, "mu0", "must be < 1/lambda_max");
                   },
               },
               schedule);
}

double prediction_error(const FilterState& state, const Sample& sample) {
    check_dimensions(state, sample);
    double estimate = 0.0;
    for (std::size_t i = 0; i < state.taps.size(); ++i) {
        estimate += state.taps[i] * sample.regressor[i];
    }
    return sample.observation - estimate;
}

double step_size(const StepSizeSchedule& schedule, const FilterState& state) {
    return std::visit(overloaded{
                          [](const InvariantStep& s) { return s.mu; },
                          [&](const IterationPromotingStep& s) {
                              return std::max(s.mu0 / static_cast<double>(state.iteration), s.phi);
                          },
                          [&](const ErrorDrivenStep& s) {
                              const double energy = squared_norm(state.vss_momentum);
                              return s.mu0 * energy / (energy + s.c);
                          },
                      },
                      schedule);
}

FilterState update_vss_momentum(const FilterState& state, const Sample& sample, double error,
                                double eta) {
    check_dimensions(state, sample);
    if (!(eta >= 0.0 && eta < 1.0)) throw ConfigError("must lie in [0, 1)", "eta");
    FilterState next = state;
    momentum_in_place(next, sample, error, eta);
    return next;
}

double advance(FilterState& state, const Sample& sample, const StepSizeSchedule& schedule) {
    const double error = prediction_error(state, sample);
    if (const auto* vss = std::get_if<ErrorDrivenStep>(&schedule)) {
        momentum_in_place(state, sample, error, vss->eta);
    }
    const double gain = step_size(schedule, state) * error;
    if (!std::isfinite(gain)) throw DivergenceError(state.iteration);
    for (std::size_t i = 0; i < state.taps.size(); ++i) {
        state.taps[i] += gain * sample.regressor[i];
        if (!std::isfinite(state.taps[i])) throw DivergenceError(state.iteration);
    }
    ++state.iteration;
    return error;
}

UpdateResult lms_update(const FilterState& state, const Sample& sample,
                        const StepSizeSchedule& schedule) {
    UpdateResult result{state, 0.0};
    result.error = advance(result.state, sample, schedule);
    return result;
}

}  // namespace ipvss
