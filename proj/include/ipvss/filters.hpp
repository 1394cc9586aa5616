#pragma once

// Per-sample LMS updates with invariant (ISS), iteration-promoting (IPVSS)
// and error-driven (VSS) step-size schedules.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace ipvss {

/// Tap estimate w(n), the iteration counter n (starts at 1) and the smoothed
/// error-direction vector p(n) used by the error-driven schedule.
struct FilterState {
    std::vector<double> taps;
    std::int64_t iteration = 1;
    std::vector<double> vss_momentum;

    static FilterState zeros(std::size_t n_taps);

    std::size_t size() const noexcept { return taps.size(); }

    friend bool operator==(const FilterState&, const FilterState&) = default;
};

struct InvariantStep {
    double mu;
};

/// mu(n) = max(mu0 / n, phi)
struct IterationPromotingStep {
    double mu0;
    double phi;
};

/// mu(n) = mu0 * |p|^2 / (|p|^2 + c), with p smoothed by eta.
struct ErrorDrivenStep {
    double mu0;
    double eta;
    double c;
};

using StepSizeSchedule = std::variant<InvariantStep, IterationPromotingStep, ErrorDrivenStep>;

enum class Algorithm { IssLms, VssLms, IpvssLms };

Algorithm algorithm_of(const StepSizeSchedule& schedule) noexcept;
std::string_view to_string(Algorithm algorithm) noexcept;

/// Throws ConfigError when the schedule parameters violate their ranges or the
/// largest step the schedule can produce is not below 1 / lambda_max.
void validate_schedule(const StepSizeSchedule& schedule, double lambda_max = 1.0);

/// One training pair: regressor x(n) (non-owning) and observation y(n).
struct Sample {
    std::span<const double> regressor;
    double observation;
};

/// e(n) = y(n) - w(n)^T x(n)
double prediction_error(const FilterState& state, const Sample& sample);

/// Step size for the current iteration. For ErrorDrivenStep the state must
/// already carry the updated momentum p(n+1).
double step_size(const StepSizeSchedule& schedule, const FilterState& state);

/// p(n+1) = eta p(n) + (1 - eta) x(n) e(n) / |x(n)|^2. A zero-norm regressor
/// leaves p unchanged.
FilterState update_vss_momentum(const FilterState& state, const Sample& sample, double error,
                                double eta);

struct UpdateResult {
    FilterState state;
    double error;  // e(n), before the update
};

/// w(n+1) = w(n) + mu(n) e(n) x(n); iteration advances by one. Throws
/// DivergenceError if any intermediate becomes non-finite.
UpdateResult lms_update(const FilterState& state, const Sample& sample,
                        const StepSizeSchedule& schedule);

/// In-place form of lms_update used by the Monte Carlo loop. Returns e(n).
double advance(FilterState& state, const Sample& sample, const StepSizeSchedule& schedule);

}  // namespace ipvss
