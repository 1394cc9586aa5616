#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "ipvss/errors.hpp"
#include "ipvss/experiment.hpp"

using namespace ipvss;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ipvss_test_" + name);
    fs::remove_all(dir);
    return dir;
}

fs::path write_config(const std::string& name, const std::string& contents) {
    const auto path = fs::temp_directory_path() / ("ipvss_cfg_" + name + ".json");
    std::ofstream(path) << contents;
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentSpec quick_spec(const fs::path& out) {
    ExperimentSpec spec;
    spec.snr_db = {5.0, 15.0};
    spec.iterations = 300;
    spec.num_trials = 8;
    spec.out_dir = out.string();
    return spec;
}

}  // namespace

TEST_CASE("parse_algorithm") {
    CHECK(parse_algorithm("iss:mu=0.05") == AlgorithmSpec::iss(0.05));
    CHECK(parse_algorithm("ipvss:mu0=0.05,phi=0.01") == AlgorithmSpec::ipvss(0.05, 0.01));
    CHECK(parse_algorithm("vss:mu0=0.04,eta=0.9,c=0.2") == AlgorithmSpec::vss(0.04, 0.9, 0.2));
    CHECK(parse_algorithm("vss:mu0=0.04") == AlgorithmSpec::vss(0.04, 0.97));
    CHECK(parse_algorithm("ipvss:mu0=0.05,phi=0.01").label() == "ipvss_mu0.05_phi0.01");
    CHECK_THROWS_AS(parse_algorithm("nlms:mu=0.1"), ConfigError);
    CHECK_THROWS_AS(parse_algorithm("iss:phi=0.1"), ConfigError);
    CHECK_THROWS_AS(parse_algorithm("iss:mu=abc"), ConfigError);
    CHECK_THROWS_AS(parse_algorithm("iss:mu"), ConfigError);

    SUBCASE("VSS threshold defaults to 1/SNR") {
        const auto s = std::get<ErrorDrivenStep>(AlgorithmSpec::vss(0.05, 0.97).resolve(10.0));
        CHECK(s.c == doctest::Approx(0.1).epsilon(1e-15));
    }
}

TEST_CASE("parse_config") {
    SUBCASE("empty config gives the defaults") {
        const auto spec = parse_config(write_config("empty", "{}"));
        CHECK(spec.n_taps == 16);
        CHECK(spec.num_trials == 1000);
        CHECK(spec.snr_db == std::vector<double>{0, 5, 10, 15, 20});
        REQUIRE(spec.algorithms.size() == 3);
        CHECK(spec.algorithms[0] == AlgorithmSpec::iss(0.05));
        CHECK(spec.algorithms[1] == AlgorithmSpec::iss(0.005));
        CHECK(spec.algorithms[2] == AlgorithmSpec::ipvss(0.05, 0.005));
        CHECK(spec == parse_config(std::nullopt));
    }
    SUBCASE("flags override the file") {
        const auto file = write_config("snr", R"({"snr_db": 10, "num_trials": 7})");
        FlagOverrides flags;
        flags.snr_db = {15.0};
        const auto spec = parse_config(file, flags);
        CHECK(spec.snr_db == std::vector<double>{15.0});
        CHECK(spec.num_trials == 7);
    }
    SUBCASE("phi above mu0 is rejected with its path") {
        FlagOverrides flags;
        flags.algorithms = {"iss:mu=0.05", "ipvss:mu0=0.05,phi=0.1"};
        try {
            (void)parse_config(std::nullopt, flags);
            FAIL("expected validation error");
        } catch (const ConfigError& e) {
            CHECK(e.field() == "algorithms[1].phi");
            CHECK(std::string(e.what()).find("phi <= mu0") != std::string::npos);
        }
    }
    SUBCASE("step at or above 1/lambda_max is rejected") {
        FlagOverrides flags;
        flags.algorithms = {"iss:mu=1.0"};
        CHECK_THROWS_AS(parse_config(std::nullopt, flags), ConfigError);
    }
    SUBCASE("unknown keys are rejected") {
        try {
            (void)parse_config(write_config("unknown", R"({"n_taps": 8, "colour": "red"})"));
            FAIL("expected validation error");
        } catch (const ConfigError& e) {
            CHECK(e.field() == "colour");
        }
    }
    SUBCASE("type errors name the key") {
        try {
            (void)parse_config(write_config("type", R"({"iterations": "many"})"));
            FAIL("expected validation error");
        } catch (const ConfigError& e) {
            CHECK(e.field() == "iterations");
        }
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(parse_config(fs::path("/nonexistent/ipvss.json")), IoError);
    }
}

TEST_CASE("spec round-trips through its file format") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        ExperimentSpec spec;
        spec.n_taps = 1 + rng() % 32;
        spec.iterations = spec.n_taps + rng() % 10000;
        spec.num_trials = 1 + rng() % 2000;
        spec.snr_db = {u(rng) * 30.0 - 5.0, u(rng) * 20.0};
        spec.master_seed = rng();
        spec.tail_fraction = 0.01 + 0.99 * u(rng);
        spec.format = trial % 2 ? OutputFormat::Json : OutputFormat::Csv;
        spec.figures = trial % 3 == 0;
        spec.out_dir = "out_" + std::to_string(trial);
        const double mu0 = 0.001 + 0.1 * u(rng);
        spec.algorithms = {AlgorithmSpec::iss(0.001 + 0.2 * u(rng)),
                           AlgorithmSpec::ipvss(mu0, mu0 * u(rng)),
                           AlgorithmSpec::vss(mu0, 0.99 * u(rng)),
                           AlgorithmSpec::vss(mu0, 0.5, u(rng))};
        const auto text = to_json(spec).dump();
        CHECK(from_json(nlohmann::json::parse(text)) == spec);
    }
}

TEST_CASE("run writes curves, summary and provenance") {
    const auto out = scratch_dir("run");
    const auto spec = quick_spec(out);
    REQUIRE(run(spec) == kExitOk);

    for (const char* group : {"snr_5dB", "snr_15dB"}) {
        for (const char* name : {"iss_mu0.05", "iss_mu0.005", "ipvss_mu0.05_phi0.005"}) {
            const auto path = out / group / (std::string(name) + ".csv");
            REQUIRE(fs::exists(path));
            std::ifstream in(path);
            std::string line;
            std::getline(in, line);
            CHECK(line == "iteration,mse,mse_db");
            std::size_t expected = 1;
            while (std::getline(in, line)) {
                std::stringstream row(line);
                std::string a, b, c;
                std::getline(row, a, ',');
                std::getline(row, b, ',');
                std::getline(row, c, ',');
                REQUIRE(std::stoul(a) == expected++);
                const double mse = std::stod(b);
                const double db = std::stod(c);
                REQUIRE(std::isfinite(mse));
                REQUIRE(std::abs(db - 10.0 * std::log10(mse)) <= 1e-9 * std::abs(db) + 1e-300);
            }
            CHECK(expected - 1 == spec.iterations);
        }
    }
    const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
    CHECK(summary["unstable"] == false);
    CHECK(summary["groups"].size() == 2);
    CHECK(summary["groups"][0]["gaps"].size() == 3);
    const auto provenance = nlohmann::json::parse(slurp(out / "provenance.json"));
    CHECK(provenance["master_seed"] == spec.master_seed);
    CHECK(from_json(provenance["config"]) == spec);
    CHECK(provenance["version"] == std::string(version()));

    SUBCASE("rerun is byte-identical") {
        const auto again = scratch_dir("run_again");
        auto spec2 = spec;
        spec2.out_dir = again.string();
        REQUIRE(run(spec2) == kExitOk);
        CHECK(slurp(out / "snr_15dB" / "ipvss_mu0.05_phi0.005.csv") ==
              slurp(again / "snr_15dB" / "ipvss_mu0.05_phi0.005.csv"));
        CHECK(slurp(out / "summary.json") == slurp(again / "summary.json"));
    }
}

TEST_CASE("json curve format") {
    const auto out = scratch_dir("json");
    auto spec = quick_spec(out);
    spec.snr_db = {10.0};
    spec.format = OutputFormat::Json;
    REQUIRE(run(spec) == kExitOk);
    const auto doc = nlohmann::json::parse(slurp(out / "snr_10dB" / "iss_mu0.05.json"));
    CHECK(doc["algorithm"] == "iss_mu0.05");
    CHECK(doc["mse"].size() == spec.iterations);
    CHECK(doc["iteration"].back() == spec.iterations);
}

TEST_CASE("unstable experiment still writes its summary") {
    const auto out = scratch_dir("unstable");
    auto spec = quick_spec(out);
    spec.snr_db = {10.0};
    spec.iterations = 2000;
    spec.algorithms = {AlgorithmSpec::iss(0.5), AlgorithmSpec::iss(0.01)};
    CHECK(run(spec) == kExitUnstable);
    const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
    CHECK(summary["unstable"] == true);
    CHECK(summary["groups"][0]["divergences"].size() == spec.num_trials);
}

TEST_CASE("unwritable output path") {
    const auto blocker = scratch_dir("blocker");
    std::ofstream(blocker) << "not a directory";
    auto spec = quick_spec(blocker / "sub");
    CHECK_THROWS_AS(run(spec), IoError);
    fs::remove(blocker);
}

TEST_CASE("figures preset") {
    ExperimentSpec spec;
    spec.figures = true;
    const auto groups = expand_groups(spec);
    REQUIRE(groups.size() == 6);
    CHECK(groups[3].label == "snr_15dB");
    CHECK(groups[3].algorithms.size() == 7);
    CHECK(groups[5].label == "vss_comparison_snr_15dB");
    CHECK(groups[5].algorithms[0] == AlgorithmSpec::ipvss(0.05, 0.035));
    CHECK(groups[5].algorithms[1].algorithm == Algorithm::VssLms);

    ExperimentSpec plain;
    CHECK(expand_groups(plain).size() == 5);
    CHECK(expand_groups(plain)[0].algorithms.size() == 3);
}

TEST_CASE("report_complexity") {
    std::ostringstream out16;
    report_complexity(16, out16);
    const auto text = out16.str();
    CHECK(text.find("ISS-LMS                   32          33") != std::string::npos);
    CHECK(text.find("VSS-LMS                  102          79") != std::string::npos);
    CHECK(text.find("IPVSS-LMS                 33          33") != std::string::npos);

    std::ostringstream out1;
    report_complexity(1, out1);
    CHECK(out1.str().find("ISS-LMS                    2           3") != std::string::npos);
    CHECK(out1.str().find("VSS-LMS                   12           4") != std::string::npos);
    CHECK(out1.str().find("IPVSS-LMS                  3           3") != std::string::npos);

    std::ostringstream out0;
    CHECK_THROWS_AS(report_complexity(0, out0), ConfigError);
}
