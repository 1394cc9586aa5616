// Command-line front end: runs Monte Carlo comparisons of ISS-, VSS- and
// IPVSS-LMS channel estimators and writes plot-ready curves.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ipvss/errors.hpp"
#include "ipvss/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"IPVSS-LMS adaptive channel estimation experiments"};
    app.set_version_flag("--version", std::string(ipvss::version()));

    std::optional<std::string> config_path;
    ipvss::FlagOverrides flags;
    std::optional<std::int64_t> complexity;
    unsigned threads = 0;
    bool quiet = false;

    app.add_option("--config", config_path, "JSON key/value experiment file")
        ->check(CLI::ExistingFile);
    app.add_option("--snr-db", flags.snr_db, "SNR point(s) in dB")->expected(1, -1);
    app.add_option("--taps", flags.n_taps, "Channel/filter length N");
    app.add_option("--trials", flags.num_trials, "Monte Carlo trials M per SNR point");
    app.add_option("--iterations", flags.iterations, "Training length T");
    app.add_option("--algo", flags.algorithms,
                   "Algorithm, repeatable: iss:mu=..., ipvss:mu0=...,phi=..., "
                   "vss:mu0=...,eta=...[,c=...]")
        ->take_all();
    app.add_option("--seed", flags.master_seed, "Master seed");
    app.add_option("--out-dir", flags.out_dir, "Output directory");
    app.add_option("--format", flags.format, "Curve format: csv or json");
    app.add_flag("--figures", flags.figures,
                 "Run the SNR sweep, threshold sweep and VSS comparison presets");
    app.add_option("--complexity", complexity,
                   "Print per-iteration arithmetic counts for N taps and exit");
    app.add_option("--threads", threads, "Worker threads (0: all cores)");
    app.add_flag("-q,--quiet", quiet, "No progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ipvss::kExitValidation;
    }

    try {
        if (complexity) {
            ipvss::report_complexity(*complexity, std::cout);
            return ipvss::kExitOk;
        }
        std::optional<std::filesystem::path> file;
        if (config_path) file = *config_path;
        const auto spec = ipvss::parse_config(file, flags);
        const int status = ipvss::run(spec, threads, quiet ? nullptr : &std::cerr);
        if (status == ipvss::kExitUnstable) {
            std::cerr << "experiment unstable: more than 1% of trials diverged; see summary.json\n";
        }
        return status;
    } catch (const ipvss::ConfigError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return ipvss::kExitValidation;
    } catch (const ipvss::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return ipvss::kExitIo;
    }
}
