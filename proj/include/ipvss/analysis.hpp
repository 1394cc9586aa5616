#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ipvss/filters.hpp"
#include "ipvss/signals.hpp"

namespace ipvss {

/// lambda_max * sigma^2 / (2 - 3 * step * sigma^2), the closed-form lower bound
/// on steady-state MSE. With step = phi it is the IPVSS floor bound.
/// Throws StabilityError when the denominator is not positive.
double steady_state_lower_bound(double lambda_max, double noise_variance, double step);

/// (1/M) * sum_i |truth - estimate_i|^2
double average_mse(std::span<const double> truth, std::span<const std::vector<double>> estimates);

struct ComplexityCount {
    std::int64_t multiplications;
    std::int64_t additions;

    friend bool operator==(const ComplexityCount&, const ComplexityCount&) = default;
};

/// Arithmetic operations per iteration for an N-tap filter.
ComplexityCount op_count(Algorithm algorithm, std::int64_t n_taps);

constexpr double kDefaultTailFraction = 0.2;

/// Mean of the last ceil(tail_fraction * size) points. Needs at least 10 points.
double steady_state_empirical(std::span<const double> curve,
                              double tail_fraction = kDefaultTailFraction);

/// 10 * log10(value)
double to_db(double value);

/// Sample estimate of R_xx = E[x(n) x(n)^T] over every full window of `seq`.
Eigen::MatrixXd sample_covariance(const TrainingSequence& seq, std::size_t n_taps);

double largest_eigenvalue(const Eigen::MatrixXd& covariance);

}  // namespace ipvss
