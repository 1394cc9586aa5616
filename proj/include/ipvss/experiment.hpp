#pragma once

// Experiment description, config-file handling and artifact output for the
// command-line front end.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ipvss/harness.hpp"

namespace ipvss {

constexpr Seed kDefaultSeed = 20150601;

/// One algorithm entry, written as `iss:mu=0.05`, `ipvss:mu0=0.05,phi=0.005`
/// or `vss:mu0=0.05,eta=0.97[,c=0.1]`. An omitted VSS `c` resolves to
/// 1 / SNR_linear at each SNR point.
struct AlgorithmSpec {
    Algorithm algorithm = Algorithm::IssLms;
    double mu = 0.05;  // mu for ISS, mu0 otherwise
    double phi = 0.005;
    double eta = 0.97;
    std::optional<double> c;

    static AlgorithmSpec iss(double mu) { return {Algorithm::IssLms, mu, 0.0, 0.0, {}}; }
    static AlgorithmSpec ipvss(double mu0, double phi) {
        return {Algorithm::IpvssLms, mu0, phi, 0.0, {}};
    }
    static AlgorithmSpec vss(double mu0, double eta, std::optional<double> c = {}) {
        return {Algorithm::VssLms, mu0, 0.0, eta, c};
    }

    std::string label() const;
    std::string to_string() const;
    StepSizeSchedule resolve(double snr_db) const;

    friend bool operator==(const AlgorithmSpec&, const AlgorithmSpec&) = default;
};

AlgorithmSpec parse_algorithm(std::string_view text);

enum class OutputFormat { Csv, Json };

struct ExperimentSpec {
    std::size_t n_taps = 16;
    std::vector<double> snr_db{0.0, 5.0, 10.0, 15.0, 20.0};
    std::size_t iterations = 5000;
    std::size_t num_trials = 1000;
    std::vector<AlgorithmSpec> algorithms{
        AlgorithmSpec::iss(0.05),
        AlgorithmSpec::iss(0.005),
        AlgorithmSpec::ipvss(0.05, 0.005),
    };
    Seed master_seed = kDefaultSeed;
    double tail_fraction = kDefaultTailFraction;
    double lambda_max = 1.0;
    std::string out_dir = "results";
    OutputFormat format = OutputFormat::Csv;
    bool figures = false;

    friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

/// Command-line values; any that are set take precedence over the file.
struct FlagOverrides {
    std::optional<std::size_t> n_taps;
    std::vector<double> snr_db;
    std::optional<std::size_t> iterations;
    std::optional<std::size_t> num_trials;
    std::vector<std::string> algorithms;
    std::optional<Seed> master_seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    bool figures = false;
};

nlohmann::json to_json(const ExperimentSpec& spec);
/// Rejects unknown keys and type mismatches with a ConfigError naming the key.
ExperimentSpec from_json(const nlohmann::json& document);

/// Defaults, then the config file (if any), then flags. The result is validated.
ExperimentSpec parse_config(const std::optional<std::filesystem::path>& file,
                            const FlagOverrides& flags = {});

void validate(const ExperimentSpec& spec);

/// A set of algorithms run together at one SNR point.
struct RunGroup {
    std::string label;  // output subdirectory
    double snr_db;
    std::vector<AlgorithmSpec> algorithms;
};

/// The groups a spec expands to. With `figures` set this is the five-point
/// SNR sweep with ISS(0.05), ISS(0.005) and IPVSS over the threshold list,
/// plus an IPVSS(phi=0.035) vs VSS-LMS comparison at 15 dB.
std::vector<RunGroup> expand_groups(const ExperimentSpec& spec);

TrialConfig trial_config(const ExperimentSpec& spec, const RunGroup& group, unsigned threads = 0);

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitIo = 2, kExitUnstable = 3 };

/// Runs every group and writes curves, summary.json and provenance.json under
/// spec.out_dir. Returns kExitUnstable if any group was unstable.
int run(const ExperimentSpec& spec, unsigned threads = 0, std::ostream* log = nullptr);

/// Multiplications/additions table for the three algorithms.
void report_complexity(std::int64_t n_taps, std::ostream& out);

std::string_view version() noexcept;

}  // namespace ipvss
