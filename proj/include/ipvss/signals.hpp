#pragma once

// Simulation world: Gaussian FIR channel, binary PN training sequence,
// sliding-window regressors and AWGN at a given SNR.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace ipvss {

using Seed = std::uint64_t;

/// SplitMix64. Small state, so it can be re-seeded per sample cheaply; this is
/// what keys the noise stream by (seed, sample index).
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Child seed for an independent stream; a pure function of its inputs.
Seed derive_seed(Seed parent, std::uint64_t stream) noexcept;

struct Channel {
    std::vector<double> taps;
};

struct NoiseModel {
    double snr_db;
    double signal_power;
    double variance;

    /// variance = signal_power * 10^(-snr_db/10). snr_db = +inf gives a
    /// noiseless model.
    static NoiseModel from_snr_db(double snr_db, double signal_power = 1.0);
    static NoiseModel noiseless(double signal_power = 1.0);
};

double snr_db_from_variance(double variance, double signal_power = 1.0);

struct TrainingSequence {
    std::vector<double> symbols;  // each +1 or -1

    std::size_t size() const noexcept { return symbols.size(); }
};

/// Taps i.i.d. N(0, 1).
Channel draw_channel(std::size_t n_taps, Seed seed);

/// Equiprobable i.i.d. +/-1 symbols.
TrainingSequence draw_training(std::size_t length, Seed seed);

/// [x(n), x(n-1), ..., x(n-N+1)] for 1-based n; samples before the start of
/// the sequence are zero.
std::vector<double> regressor_at(const TrainingSequence& seq, std::size_t n, std::size_t n_taps);

/// z(n) ~ N(0, variance), keyed by (seed, n).
double noise_sample(const NoiseModel& noise, Seed seed, std::uint64_t n);

/// y(n) = w^T x(n) + z(n)
double observe(const Channel& channel, std::span<const double> regressor, const NoiseModel& noise,
               Seed seed, std::uint64_t n);

}  // namespace ipvss
