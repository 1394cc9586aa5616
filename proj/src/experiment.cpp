#include "ipvss/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ipvss/errors.hpp"

#ifndef IPVSS_VERSION
#define IPVSS_VERSION "0.0.0"
#endif

namespace ipvss {
namespace {

using nlohmann::json;

const std::vector<double> kFigureSnrs{0.0, 5.0, 10.0, 15.0, 20.0};
const std::vector<double> kThresholds{0.005, 0.01, 0.015, 0.02, 0.025};
constexpr double kComparisonThreshold = 0.035;
constexpr double kComparisonSnr = 15.0;

double parse_number(std::string_view text, const std::string& field) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ConfigError("expected a number, got '" + std::string(text) + "'", field);
    }
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
}

std::string format_name(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

OutputFormat parse_format(const std::string& text) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    throw ConfigError("expected 'csv' or 'json', got '" + text + "'", "format");
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << contents;
    if (!out.flush()) throw IoError("failed writing " + path.string());
}

std::string curve_csv(const MseTrajectory& traj) {
    std::string text = "iteration,mse,mse_db\n";
    for (std::size_t i = 0; i < traj.per_iteration_mse.size(); ++i) {
        const double mse = traj.per_iteration_mse[i];
        text += fmt::format("{},{},{}\n", i + 1, mse, to_db(mse));
    }
    return text;
}

std::string curve_json(const MseTrajectory& traj) {
    json doc;
    doc["algorithm"] = traj.algorithm;
    json iteration = json::array(), mse = json::array(), mse_db = json::array();
    for (std::size_t i = 0; i < traj.per_iteration_mse.size(); ++i) {
        iteration.push_back(i + 1);
        mse.push_back(traj.per_iteration_mse[i]);
        mse_db.push_back(to_db(traj.per_iteration_mse[i]));
    }
    doc["iteration"] = std::move(iteration);
    doc["mse"] = std::move(mse);
    doc["mse_db"] = std::move(mse_db);
    return doc.dump(1) + "\n";
}

}  // namespace

std::string AlgorithmSpec::label() const {
    switch (algorithm) {
        case Algorithm::IssLms: return fmt::format("iss_mu{}", mu);
        case Algorithm::IpvssLms: return fmt::format("ipvss_mu{}_phi{}", mu, phi);
        case Algorithm::VssLms:
            return c ? fmt::format("vss_mu{}_eta{}_c{}", mu, eta, *c)
                     : fmt::format("vss_mu{}_eta{}", mu, eta);
    }
    return "unknown";
}

std::string AlgorithmSpec::to_string() const {
    switch (algorithm) {
        case Algorithm::IssLms: return fmt::format("iss:mu={}", mu);
        case Algorithm::IpvssLms: return fmt::format("ipvss:mu0={},phi={}", mu, phi);
        case Algorithm::VssLms:
            return c ? fmt::format("vss:mu0={},eta={},c={}", mu, eta, *c)
                     : fmt::format("vss:mu0={},eta={}", mu, eta);
    }
    return "unknown";
}

StepSizeSchedule AlgorithmSpec::resolve(double snr_db) const {
    switch (algorithm) {
        case Algorithm::IssLms: return InvariantStep{mu};
        case Algorithm::IpvssLms: return IterationPromotingStep{mu, phi};
        case Algorithm::VssLms:
            return ErrorDrivenStep{mu, eta, c.value_or(std::pow(10.0, -snr_db / 10.0))};
    }
    throw ConfigError("unknown algorithm");
}

AlgorithmSpec parse_algorithm(std::string_view text) {
    const auto colon = text.find(':');
    const std::string kind(trim(text.substr(0, colon)));
    AlgorithmSpec spec;
    std::set<std::string> allowed;
    if (kind == "iss") {
        spec = AlgorithmSpec::iss(0.05);
        allowed = {"mu"};
    } else if (kind == "ipvss") {
        spec = AlgorithmSpec::ipvss(0.05, 0.005);
        allowed = {"mu0", "phi"};
    } else if (kind == "vss") {
        spec = AlgorithmSpec::vss(0.05, 0.97);
        allowed = {"mu0", "eta", "c"};
    } else {
        throw ConfigError("unknown algorithm '" + kind + "' (expected iss, ipvss or vss)",
                          "algorithm");
    }
    if (colon == std::string_view::npos) return spec;

    std::string_view params = text.substr(colon + 1);
    while (!params.empty()) {
        const auto comma = params.find(',');
        const std::string_view item = trim(params.substr(0, comma));
        params = comma == std::string_view::npos ? std::string_view{} : params.substr(comma + 1);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("expected key=value, got '" + std::string(item) + "'", kind);
        }
        const std::string key(trim(item.substr(0, eq)));
        if (!allowed.contains(key)) {
            throw ConfigError("unknown parameter '" + key + "'", kind);
        }
        const double value = parse_number(trim(item.substr(eq + 1)), kind + "." + key);
        if (key == "mu" || key == "mu0") spec.mu = value;
        else if (key == "phi") spec.phi = value;
        else if (key == "eta") spec.eta = value;
        else if (key == "c") spec.c = value;
    }
    return spec;
}

json to_json(const ExperimentSpec& spec) {
    json algorithms = json::array();
    for (const auto& a : spec.algorithms) algorithms.push_back(a.to_string());
    return json{
        {"n_taps", spec.n_taps},
        {"snr_db", spec.snr_db},
        {"iterations", spec.iterations},
        {"num_trials", spec.num_trials},
        {"algorithms", std::move(algorithms)},
        {"master_seed", spec.master_seed},
        {"tail_fraction", spec.tail_fraction},
        {"lambda_max", spec.lambda_max},
        {"out_dir", spec.out_dir},
        {"format", format_name(spec.format)},
        {"figures", spec.figures},
    };
}

ExperimentSpec from_json(const json& document) {
    if (!document.is_object()) throw ConfigError("config must be a key/value object");
    ExperimentSpec spec;
    for (const auto& [key, value] : document.items()) {
        try {
            if (key == "n_taps") spec.n_taps = value.get<std::size_t>();
            else if (key == "snr_db") {
                spec.snr_db = value.is_array() ? value.get<std::vector<double>>()
                                               : std::vector<double>{value.get<double>()};
            } else if (key == "iterations") spec.iterations = value.get<std::size_t>();
            else if (key == "num_trials") spec.num_trials = value.get<std::size_t>();
            else if (key == "algorithms") {
                spec.algorithms.clear();
                for (std::size_t i = 0; i < value.size(); ++i) {
                    try {
                        spec.algorithms.push_back(parse_algorithm(value.at(i).get<std::string>()));
                    } catch (const ConfigError& e) {
                        throw ConfigError(e.message(), "algorithms[" + std::to_string(i) + "]");
                    }
                }
            } else if (key == "master_seed") spec.master_seed = value.get<Seed>();
            else if (key == "tail_fraction") spec.tail_fraction = value.get<double>();
            else if (key == "lambda_max") spec.lambda_max = value.get<double>();
            else if (key == "out_dir") spec.out_dir = value.get<std::string>();
            else if (key == "format") spec.format = parse_format(value.get<std::string>());
            else if (key == "figures") spec.figures = value.get<bool>();
            else throw ConfigError("unknown key", key);
        } catch (const json::exception& e) {
            throw ConfigError(e.what(), key);
        }
    }
    return spec;
}

ExperimentSpec parse_config(const std::optional<std::filesystem::path>& file,
                            const FlagOverrides& flags) {
    ExperimentSpec spec;
    if (file) {
        std::ifstream in(*file);
        if (!in) throw IoError("cannot read config file " + file->string());
        json document;
        try {
            document = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError(e.what(), file->string());
        }
        spec = from_json(document);
    }
    if (flags.n_taps) spec.n_taps = *flags.n_taps;
    if (!flags.snr_db.empty()) spec.snr_db = flags.snr_db;
    if (flags.iterations) spec.iterations = *flags.iterations;
    if (flags.num_trials) spec.num_trials = *flags.num_trials;
    if (!flags.algorithms.empty()) {
        spec.algorithms.clear();
        for (std::size_t i = 0; i < flags.algorithms.size(); ++i) {
            try {
                spec.algorithms.push_back(parse_algorithm(flags.algorithms[i]));
            } catch (const ConfigError& e) {
                throw ConfigError(e.message(), "--algo[" + std::to_string(i) + "]");
            }
        }
    }
    if (flags.master_seed) spec.master_seed = *flags.master_seed;
    if (flags.out_dir) spec.out_dir = *flags.out_dir;
    if (flags.format) spec.format = parse_format(*flags.format);
    if (flags.figures) spec.figures = true;
    validate(spec);
    return spec;
}

std::vector<RunGroup> expand_groups(const ExperimentSpec& spec) {
    std::vector<RunGroup> groups;
    if (!spec.figures) {
        for (double snr : spec.snr_db) {
            groups.push_back({fmt::format("snr_{}dB", snr), snr, spec.algorithms});
        }
        return groups;
    }
    std::vector<AlgorithmSpec> sweep{AlgorithmSpec::iss(0.05), AlgorithmSpec::iss(0.005)};
    for (double phi : kThresholds) sweep.push_back(AlgorithmSpec::ipvss(0.05, phi));
    for (double snr : kFigureSnrs) groups.push_back({fmt::format("snr_{}dB", snr), snr, sweep});
    groups.push_back({fmt::format("vss_comparison_snr_{}dB", kComparisonSnr), kComparisonSnr,
                      {AlgorithmSpec::ipvss(0.05, kComparisonThreshold),
                       AlgorithmSpec::vss(0.05, 0.97)}});
    return groups;
}

TrialConfig trial_config(const ExperimentSpec& spec, const RunGroup& group, unsigned threads) {
    TrialConfig config;
    config.n_taps = spec.n_taps;
    config.snr_db = group.snr_db;
    config.iterations = spec.iterations;
    config.num_trials = spec.num_trials;
    config.master_seed = spec.master_seed;
    config.tail_fraction = spec.tail_fraction;
    config.lambda_max = spec.lambda_max;
    config.threads = threads;
    for (const auto& a : group.algorithms) {
        config.algorithms.push_back({a.label(), a.resolve(group.snr_db)});
    }
    return config;
}

void validate(const ExperimentSpec& spec) {
    if (spec.snr_db.empty()) throw ConfigError("at least one SNR point", "snr_db");
    for (std::size_t i = 0; i < spec.snr_db.size(); ++i) {
        if (!std::isfinite(spec.snr_db[i])) {
            throw ConfigError("must be finite", "snr_db[" + std::to_string(i) + "]");
        }
    }
    if (spec.out_dir.empty()) throw ConfigError("must not be empty", "out_dir");
    for (const auto& group : expand_groups(spec)) validate(trial_config(spec, group));
}

int run(const ExperimentSpec& spec, unsigned threads, std::ostream* log) {
    validate(spec);
    const std::filesystem::path root(spec.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    if (ec) throw IoError("cannot create " + root.string() + ": " + ec.message());

    const std::string ext = spec.format == OutputFormat::Csv ? ".csv" : ".json";
    bool unstable = false;
    json groups = json::array();
    for (const auto& group : expand_groups(spec)) {
        if (log) fmt::print(*log, "running {} ({} trials)\n", group.label, spec.num_trials);
        const auto config = trial_config(spec, group, threads);
        const auto result = run_experiment(config);
        unstable = unstable || result.unstable;

        const auto dir = root / group.label;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
        json algorithms = json::array();
        for (const auto& traj : result.trajectories) {
            write_file(dir / (traj.algorithm + ext),
                       spec.format == OutputFormat::Csv ? curve_csv(traj) : curve_json(traj));
            algorithms.push_back({
                {"name", traj.algorithm},
                {"steady_state", traj.steady_state},
                {"steady_state_db", to_db(traj.steady_state)},
                {"steady_state_stderr", traj.steady_state_stderr},
                {"convergence_iteration", traj.convergence_iteration},
                {"convergence_stderr", traj.convergence_stderr},
                {"trials_used", traj.trials_used},
                {"diverged_trials", traj.diverged_trials},
            });
        }
        json gaps = json::array();
        if (result.trajectories.size() >= 2) {
            for (const auto& g : compare_summary(result.trajectories).gaps) {
                gaps.push_back({{"first", g.first}, {"second", g.second}, {"gap_db", g.gap_db}});
            }
        }
        json divergences = json::array();
        for (const auto& d : result.divergences) {
            divergences.push_back(
                {{"algorithm", d.algorithm}, {"trial", d.trial_index}, {"iteration", d.iteration}});
        }
        groups.push_back({
            {"label", group.label},
            {"snr_db", group.snr_db},
            {"unstable", result.unstable},
            {"algorithms", std::move(algorithms)},
            {"gaps", std::move(gaps)},
            {"divergences", std::move(divergences)},
        });
    }

    write_file(root / "summary.json",
               json{{"unstable", unstable}, {"groups", std::move(groups)}}.dump(2) + "\n");
    write_file(root / "provenance.json",
               json{{"config", to_json(spec)},
                    {"master_seed", spec.master_seed},
                    {"version", std::string(version())}}
                       .dump(2) +
                   "\n");
    return unstable ? kExitUnstable : kExitOk;
}

void report_complexity(std::int64_t n_taps, std::ostream& out) {
    if (n_taps < 1) throw ConfigError("must be at least 1", "n_taps");
    fmt::print(out, "{:<12}{:>16}{:>12}\n", "algorithm", "multiplications", "additions");
    for (auto algorithm : {Algorithm::IssLms, Algorithm::VssLms, Algorithm::IpvssLms}) {
        const auto count = op_count(algorithm, n_taps);
        fmt::print(out, "{:<12}{:>16}{:>12}\n", to_string(algorithm), count.multiplications,
                   count.additions);
    }
}

std::string_view version() noexcept { return IPVSS_VERSION; }

}  // namespace ipvss
