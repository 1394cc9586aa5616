#include "ipvss/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <string>
#include <thread>

#include "ipvss/errors.hpp"

namespace ipvss {
namespace {

constexpr std::size_t kTrialsPerBlock = 16;

enum SeedStream : std::uint64_t { kChannelStream = 1, kTrainingStream = 2, kNoiseStream = 3 };

// Reversed, zero-padded copy of the training sequence: the regressor for
// 1-based n is the contiguous window starting at T - n.
std::vector<double> reversed_history(const TrainingSequence& seq, std::size_t n_taps) {
    const std::size_t t = seq.size();
    std::vector<double> rev(t + n_taps - 1, 0.0);
    for (std::size_t j = 0; j < t; ++j) rev[j] = seq.symbols[t - 1 - j];
    return rev;
}

std::span<const double> window(const std::vector<double>& rev, std::size_t t, std::size_t n,
                               std::size_t n_taps) {
    return std::span<const double>(rev).subspan(t - n, n_taps);
}

double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double standard_error(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

struct TrialStats {
    bool used = false;
    double tail_mean = 0.0;
    double convergence = 0.0;
};

struct Block {
    std::vector<std::vector<double>> sums;  // [algorithm][iteration]
    std::vector<DivergenceReport> divergences;
};

}  // namespace

void validate(const TrialConfig& config) {
    if (config.n_taps < 1) throw ConfigError("must be at least 1", "n_taps");
    if (config.iterations < config.n_taps) {
        throw ConfigError("must be at least n_taps", "iterations");
    }
    if (config.iterations < 10) throw ConfigError("must be at least 10", "iterations");
    if (config.num_trials < 1) throw ConfigError("must be at least 1", "num_trials");
    if (std::isnan(config.snr_db)) throw ConfigError("must be a number", "snr_db");
    if (!(config.tail_fraction > 0.0 && config.tail_fraction <= 1.0)) {
        throw ConfigError("must lie in (0, 1]", "tail_fraction");
    }
    if (config.algorithms.empty()) throw ConfigError("at least one algorithm", "algorithms");
    std::set<std::string> names;
    for (std::size_t i = 0; i < config.algorithms.size(); ++i) {
        const auto& algo = config.algorithms[i];
        const std::string path = "algorithms[" + std::to_string(i) + "]";
        if (algo.name.empty()) throw ConfigError("name must not be empty", path + ".name");
        if (!names.insert(algo.name).second) {
            throw ConfigError("duplicate algorithm name '" + algo.name + "'", path + ".name");
        }
        try {
            validate_schedule(algo.schedule, config.lambda_max);
        } catch (const ConfigError& e) {
            throw ConfigError(e.message(), path + "." + e.field());
        }
    }
}

TrialRealization draw_realization(const TrialConfig& config, std::size_t trial_index) {
    const Seed trial_seed = derive_seed(config.master_seed, trial_index);
    TrialRealization r{
        draw_channel(config.n_taps, derive_seed(trial_seed, kChannelStream)),
        draw_training(config.iterations, derive_seed(trial_seed, kTrainingStream)),
        std::vector<double>(config.iterations),
    };
    const auto noise = NoiseModel::from_snr_db(config.snr_db);
    const Seed noise_seed = derive_seed(trial_seed, kNoiseStream);
    const auto rev = reversed_history(r.training, config.n_taps);
    for (std::size_t n = 1; n <= config.iterations; ++n) {
        r.observations[n - 1] = observe(r.channel, window(rev, config.iterations, n, config.n_taps),
                                        noise, noise_seed, n);
    }
    return r;
}

TrialResult run_on_realization(const TrialConfig& config, const StepSizeSchedule& schedule,
                               const TrialRealization& realization) {
    const std::size_t t = config.iterations;
    const std::size_t n_taps = config.n_taps;
    if (realization.channel.taps.size() != n_taps || realization.training.size() != t ||
        realization.observations.size() != t) {
        throw ConfigError("realization does not match the trial configuration");
    }
    const auto rev = reversed_history(realization.training, n_taps);
    const auto& truth = realization.channel.taps;

    TrialResult result;
    result.squared_error.reserve(t);
    auto state = FilterState::zeros(n_taps);
    for (std::size_t n = 1; n <= t; ++n) {
        const Sample sample{window(rev, t, n, n_taps), realization.observations[n - 1]};
        try {
            advance(state, sample, schedule);
        } catch (const DivergenceError& e) {
            result.diverged = true;
            result.divergence_iteration = e.iteration();
            return result;
        }
        double residual = 0.0;
        for (std::size_t i = 0; i < n_taps; ++i) {
            const double d = truth[i] - state.taps[i];
            residual += d * d;
        }
        if (!std::isfinite(residual)) {
            result.diverged = true;
            result.divergence_iteration = static_cast<std::int64_t>(n);
            return result;
        }
        result.squared_error.push_back(residual);
    }
    return result;
}

TrialResult run_trial(const TrialConfig& config, std::size_t algorithm_index,
                      std::size_t trial_index, const RealizationSource& source) {
    validate(config);
    if (algorithm_index >= config.algorithms.size()) {
        throw std::out_of_range("algorithm index " + std::to_string(algorithm_index));
    }
    if (trial_index >= config.num_trials) {
        throw std::out_of_range("trial index " + std::to_string(trial_index));
    }
    return run_on_realization(config, config.algorithms[algorithm_index].schedule,
                              source(config, trial_index));
}

std::int64_t convergence_iteration(std::span<const double> curve, double steady_state) {
    const double ceiling = steady_state * std::pow(10.0, 0.3);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve[i] <= ceiling) return static_cast<std::int64_t>(i + 1);
    }
    return 0;
}

ExperimentResult run_experiment(const TrialConfig& config, const RealizationSource& source) {
    validate(config);
    const std::size_t n_algos = config.algorithms.size();
    const std::size_t t = config.iterations;
    const std::size_t m = config.num_trials;
    const std::size_t n_blocks = (m + kTrialsPerBlock - 1) / kTrialsPerBlock;

    std::vector<Block> blocks(n_blocks);
    std::vector<std::vector<TrialStats>> stats(n_algos, std::vector<TrialStats>(m));

    auto run_block = [&](std::size_t b) {
        Block& block = blocks[b];
        block.sums.assign(n_algos, std::vector<double>(t, 0.0));
        const std::size_t end = std::min(m, (b + 1) * kTrialsPerBlock);
        for (std::size_t trial = b * kTrialsPerBlock; trial < end; ++trial) {
            const TrialRealization realization = source(config, trial);
            for (std::size_t a = 0; a < n_algos; ++a) {
                const auto result =
                    run_on_realization(config, config.algorithms[a].schedule, realization);
                if (result.diverged) {
                    block.divergences.push_back(
                        {config.algorithms[a].name, trial, result.divergence_iteration});
                    continue;
                }
                auto& sum = block.sums[a];
                for (std::size_t i = 0; i < t; ++i) sum[i] += result.squared_error[i];
                const double tail = steady_state_empirical(result.squared_error,
                                                           config.tail_fraction);
                stats[a][trial] = {true, tail,
                                   static_cast<double>(
                                       convergence_iteration(result.squared_error, tail))};
            }
        }
    };

    unsigned workers = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_blocks)));
    if (workers == 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&] {
                    for (std::size_t b; (b = next.fetch_add(1)) < n_blocks;) {
                        try {
                            run_block(b);
                        } catch (...) {
                            std::lock_guard lock(failure_mutex);
                            if (!failure) failure = std::current_exception();
                            next = n_blocks;
                        }
                    }
                });
            }
        }
        if (failure) std::rethrow_exception(failure);
    }

    ExperimentResult out;
    for (const auto& block : blocks) {
        out.divergences.insert(out.divergences.end(), block.divergences.begin(),
                               block.divergences.end());
    }
    for (std::size_t a = 0; a < n_algos; ++a) {
        MseTrajectory traj;
        traj.algorithm = config.algorithms[a].name;
        std::vector<double> total(t, 0.0);
        for (const auto& block : blocks) {
            for (std::size_t i = 0; i < t; ++i) total[i] += block.sums[a][i];
        }
        std::vector<double> tails;
        std::vector<double> convergences;
        for (const auto& s : stats[a]) {
            if (!s.used) continue;
            tails.push_back(s.tail_mean);
            convergences.push_back(s.convergence);
        }
        traj.trials_used = tails.size();
        traj.diverged_trials = m - traj.trials_used;
        if (traj.trials_used == 0) {
            traj.per_iteration_mse.assign(t, std::numeric_limits<double>::infinity());
            traj.steady_state = std::numeric_limits<double>::infinity();
        } else {
            for (auto& v : total) v /= static_cast<double>(traj.trials_used);
            traj.per_iteration_mse = std::move(total);
            traj.steady_state = steady_state_empirical(traj.per_iteration_mse,
                                                       config.tail_fraction);
            traj.convergence_iteration =
                convergence_iteration(traj.per_iteration_mse, traj.steady_state);
            traj.steady_state_stderr = standard_error(tails);
            traj.convergence_stderr = standard_error(convergences);
        }
        // More than 1% of trials lost.
        if (traj.diverged_trials * 100 > m) out.unstable = true;
        out.trajectories.push_back(std::move(traj));
    }
    return out;
}

ComparisonTable compare_summary(std::span<const MseTrajectory> trajectories) {
    if (trajectories.size() < 2) {
        throw ConfigError("need at least two trajectories to compare", "trajectories");
    }
    const std::size_t length = trajectories.front().per_iteration_mse.size();
    ComparisonTable table;
    for (const auto& traj : trajectories) {
        if (traj.per_iteration_mse.size() != length) {
            throw ConfigError("trajectory '" + traj.algorithm + "' has length " +
                              std::to_string(traj.per_iteration_mse.size()) + ", expected " +
                              std::to_string(length), "trajectories");
        }
        table.rows.push_back({traj.algorithm, to_db(traj.steady_state),
                              traj.convergence_iteration});
    }
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        for (std::size_t j = i + 1; j < table.rows.size(); ++j) {
            table.gaps.push_back({table.rows[i].algorithm, table.rows[j].algorithm,
                                  table.rows[i].steady_state_db - table.rows[j].steady_state_db});
        }
    }
    return table;
}

}  // namespace ipvss
