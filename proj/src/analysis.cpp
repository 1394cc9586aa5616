#include "ipvss/analysis.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "ipvss/errors.hpp"

namespace ipvss {

double steady_state_lower_bound(double lambda_max, double noise_variance, double step) {
    if (!(lambda_max > 0.0)) throw ConfigError("must be > 0", "lambda_max");
    if (!(noise_variance > 0.0)) throw ConfigError("must be > 0", "noise_variance");
    if (!(step > 0.0)) throw ConfigError("must be > 0", "step");
    const double denominator = 2.0 - 3.0 * step * noise_variance;
    if (!(denominator > 0.0)) {
        throw StabilityError("steady-state bound undefined: 2 - 3*step*noise_variance = " +
                             std::to_string(denominator));
    }
    return lambda_max * noise_variance / denominator;
}

double average_mse(std::span<const double> truth, std::span<const std::vector<double>> estimates) {
    if (estimates.empty()) throw ConfigError("at least one estimate is required", "estimates");
    double total = 0.0;
    for (const auto& estimate : estimates) {
        if (estimate.size() != truth.size()) {
            throw ConfigError("estimate length " + std::to_string(estimate.size()) +
                              " does not match channel length " + std::to_string(truth.size()));
        }
        double residual = 0.0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const double d = truth[i] - estimate[i];
            residual += d * d;
        }
        total += residual;
    }
    return total / static_cast<double>(estimates.size());
}

ComplexityCount op_count(Algorithm algorithm, std::int64_t n_taps) {
    if (n_taps < 1) throw ConfigError("must be at least 1", "n_taps");
    const std::int64_t n = n_taps;
    switch (algorithm) {
        case Algorithm::IssLms: return {2 * n, 2 * n + 1};
        case Algorithm::VssLms: return {6 * n + 6, 5 * n - 1};
        case Algorithm::IpvssLms: return {2 * n + 1, 2 * n + 1};
    }
    throw ConfigError("unknown algorithm", "algorithm");
}

double steady_state_empirical(std::span<const double> curve, double tail_fraction) {
    if (curve.size() < 10) {
        throw ConfigError("trajectory needs at least 10 points, got " +
                          std::to_string(curve.size()), "trajectory");
    }
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw ConfigError("must lie in (0, 1]", "tail_fraction");
    }
    const auto tail = static_cast<std::size_t>(
        std::ceil(tail_fraction * static_cast<double>(curve.size())));
    double sum = 0.0;
    for (std::size_t i = curve.size() - tail; i < curve.size(); ++i) sum += curve[i];
    return sum / static_cast<double>(tail);
}

double to_db(double value) { return 10.0 * std::log10(value); }

Eigen::MatrixXd sample_covariance(const TrainingSequence& seq, std::size_t n_taps) {
    if (n_taps == 0) throw ConfigError("must be at least 1", "n_taps");
    if (seq.size() < n_taps) throw ConfigError("sequence shorter than the window", "n_taps");
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_taps),
                                              static_cast<Eigen::Index>(n_taps));
    std::size_t windows = 0;
    for (std::size_t n = n_taps; n <= seq.size(); ++n) {
        const auto x = regressor_at(seq, n, n_taps);
        const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(n_taps));
        r.noalias() += v * v.transpose();
        ++windows;
    }
    return r / static_cast<double>(windows);
}

double largest_eigenvalue(const Eigen::MatrixXd& covariance) {
    if (covariance.rows() == 0 || covariance.rows() != covariance.cols()) {
        throw ConfigError("covariance must be square and non-empty", "covariance");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
}

}  // namespace ipvss
