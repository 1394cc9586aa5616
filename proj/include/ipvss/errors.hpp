#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ipvss {

/// Invalid parameters or mismatched dimensions. `field()` names the offending
/// configuration path when one is known (e.g. "algorithms[1].phi").
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what, std::string field = {})
        : std::invalid_argument(field.empty() ? what : field + ": " + what),
          message_(what),
          field_(std::move(field)) {}

    const std::string& message() const noexcept { return message_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::string message_;
    std::string field_;
};

/// A tap update produced a non-finite value.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(std::int64_t iteration)
        : std::runtime_error("filter diverged at iteration " + std::to_string(iteration)),
          iteration_(iteration) {}

    std::int64_t iteration() const noexcept { return iteration_; }

private:
    std::int64_t iteration_;
};

/// Steady-state bound requested where 2 - 3*mu*sigma^2 <= 0.
class StabilityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ipvss
