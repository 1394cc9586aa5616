#pragma once

// Seeded Monte Carlo experiments: M paired trials per configuration, averaged
// tap-error curves, steady-state and convergence summaries.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ipvss/analysis.hpp"
#include "ipvss/filters.hpp"
#include "ipvss/signals.hpp"

namespace ipvss {

struct AlgorithmConfig {
    std::string name;
    StepSizeSchedule schedule;
};

struct TrialConfig {
    std::size_t n_taps = 16;
    double snr_db = 15.0;  // +inf for a noiseless run
    std::size_t iterations = 5000;
    std::size_t num_trials = 1000;
    std::vector<AlgorithmConfig> algorithms;
    Seed master_seed = 0;
    double tail_fraction = kDefaultTailFraction;
    double lambda_max = 1.0;
    unsigned threads = 0;  // 0: one per hardware thread
};

void validate(const TrialConfig& config);

/// Channel, training sequence and noisy observations shared by every
/// algorithm within one trial.
struct TrialRealization {
    Channel channel;
    TrainingSequence training;
    std::vector<double> observations;  // y(1..T)
};

/// Builds the realization for `trial_index` from seeds derived from
/// (master_seed, trial_index).
TrialRealization draw_realization(const TrialConfig& config, std::size_t trial_index);

using RealizationSource = std::function<TrialRealization(const TrialConfig&, std::size_t)>;

struct TrialResult {
    std::vector<double> squared_error;  // |w - w(n+1)|^2 after each update n = 1..T
    bool diverged = false;
    std::int64_t divergence_iteration = 0;
};

TrialResult run_trial(const TrialConfig& config, std::size_t algorithm_index,
                      std::size_t trial_index, const RealizationSource& source = draw_realization);

/// Runs one algorithm over an existing realization.
TrialResult run_on_realization(const TrialConfig& config, const StepSizeSchedule& schedule,
                               const TrialRealization& realization);

/// First 1-based n where the curve is within 3 dB above `steady_state`.
std::int64_t convergence_iteration(std::span<const double> curve, double steady_state);

struct MseTrajectory {
    std::string algorithm;
    std::vector<double> per_iteration_mse;
    double steady_state = 0.0;
    std::int64_t convergence_iteration = 0;
    double steady_state_stderr = 0.0;   // across per-trial tail means
    double convergence_stderr = 0.0;    // across per-trial convergence iterations
    std::size_t trials_used = 0;
    std::size_t diverged_trials = 0;
};

struct DivergenceReport {
    std::string algorithm;
    std::size_t trial_index;
    std::int64_t iteration;
};

struct ExperimentResult {
    std::vector<MseTrajectory> trajectories;
    std::vector<DivergenceReport> divergences;
    bool unstable = false;  // some algorithm lost more than 1% of its trials
};

/// Trials run on `config.threads` workers. Partial sums are formed over fixed
/// blocks of trials and combined in block order, so the result does not
/// depend on the thread count.
ExperimentResult run_experiment(const TrialConfig& config,
                                const RealizationSource& source = draw_realization);

struct SteadyStateGap {
    std::string first;
    std::string second;
    double gap_db;  // steady_state_db(first) - steady_state_db(second)
};

struct ComparisonRow {
    std::string algorithm;
    double steady_state_db;
    std::int64_t convergence_iteration;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    std::vector<SteadyStateGap> gaps;  // every pair i < j
};

ComparisonTable compare_summary(std::span<const MseTrajectory> trajectories);

}  // namespace ipvss
