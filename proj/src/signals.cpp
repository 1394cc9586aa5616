#include "ipvss/signals.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "ipvss/errors.hpp"

namespace ipvss {

Seed derive_seed(Seed parent, std::uint64_t stream) noexcept {
    SplitMix64 mix(parent ^ (stream * 0xD1B54A32D192ED03ULL));
    mix();
    return mix();
}

NoiseModel NoiseModel::from_snr_db(double snr_db, double signal_power) {
    if (!(signal_power > 0.0) || !std::isfinite(signal_power)) {
        throw ConfigError("signal power must be positive", "signal_power");
    }
    if (std::isnan(snr_db)) throw ConfigError("SNR must be a number", "snr_db");
    const double variance = std::isinf(snr_db) && snr_db > 0
                                ? 0.0
                                : signal_power * std::pow(10.0, -snr_db / 10.0);
    return NoiseModel{snr_db, signal_power, variance};
}

NoiseModel NoiseModel::noiseless(double signal_power) {
    return from_snr_db(std::numeric_limits<double>::infinity(), signal_power);
}

double snr_db_from_variance(double variance, double signal_power) {
    return 10.0 * std::log10(signal_power / variance);
}

Channel draw_channel(std::size_t n_taps, Seed seed) {
    if (n_taps == 0) throw ConfigError("channel length must be at least 1", "n_taps");
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Channel channel{std::vector<double>(n_taps)};
    for (auto& tap : channel.taps) tap = gauss(engine);
    return channel;
}

TrainingSequence draw_training(std::size_t length, Seed seed) {
    if (length == 0) throw ConfigError("training length must be at least 1", "iterations");
    std::mt19937_64 engine(seed);
    TrainingSequence seq{std::vector<double>(length)};
    for (auto& s : seq.symbols) s = (engine() >> 63) != 0 ? 1.0 : -1.0;
    return seq;
}

std::vector<double> regressor_at(const TrainingSequence& seq, std::size_t n, std::size_t n_taps) {
    if (n < 1 || n > seq.size()) {
        throw std::out_of_range("sample index " + std::to_string(n) + " outside [1, " +
                                std::to_string(seq.size()) + "]");
    }
    std::vector<double> x(n_taps, 0.0);
    for (std::size_t k = 0; k < n_taps && k < n; ++k) x[k] = seq.symbols[n - 1 - k];
    return x;
}

double noise_sample(const NoiseModel& noise, Seed seed, std::uint64_t n) {
    if (noise.variance == 0.0) return 0.0;
    SplitMix64 engine(derive_seed(seed, n));
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise.variance));
    return gauss(engine);
}

double observe(const Channel& channel, std::span<const double> regressor, const NoiseModel& noise,
               Seed seed, std::uint64_t n) {
    if (regressor.size() != channel.taps.size()) {
        throw ConfigError("regressor length " + std::to_string(regressor.size()) +
                          " does not match channel length " +
                          std::to_string(channel.taps.size()));
    }
    double y = 0.0;
    for (std::size_t i = 0; i < regressor.size(); ++i) y += channel.taps[i] * regressor[i];
    return y + noise_sample(noise, seed, n);
}

}  // namespace ipvss
