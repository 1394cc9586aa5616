#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ipvss/analysis.hpp"
#include "ipvss/errors.hpp"
#include "ipvss/experiment.hpp"
#include "ipvss/filters.hpp"
#include "ipvss/harness.hpp"
#include "ipvss/signals.hpp"

namespace py = pybind11;
using namespace ipvss;

namespace {

Sample as_sample(const std::vector<double>& regressor, double observation) {
    return Sample{regressor, observation};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "ISS-, VSS- and IPVSS-LMS adaptive channel estimation";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
    py::register_exception<StabilityError>(m, "StabilityError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::enum_<Algorithm>(m, "Algorithm")
        .value("ISS_LMS", Algorithm::IssLms)
        .value("VSS_LMS", Algorithm::VssLms)
        .value("IPVSS_LMS", Algorithm::IpvssLms);

    py::class_<FilterState>(m, "FilterState")
        .def(py::init<std::vector<double>, std::int64_t, std::vector<double>>(), py::arg("taps"),
             py::arg("iteration") = 1, py::arg("vss_momentum") = std::vector<double>{})
        .def_static("zeros", &FilterState::zeros, py::arg("n_taps"))
        .def_readwrite("taps", &FilterState::taps)
        .def_readwrite("iteration", &FilterState::iteration)
        .def_readwrite("vss_momentum", &FilterState::vss_momentum)
        .def("__eq__", [](const FilterState& a, const FilterState& b) { return a == b; })
        .def("__repr__", [](const FilterState& s) {
            return "FilterState(n_taps=" + std::to_string(s.size()) +
                   ", iteration=" + std::to_string(s.iteration) + ")";
        });

    py::class_<InvariantStep>(m, "InvariantStep")
        .def(py::init<double>(), py::arg("mu"))
        .def_readwrite("mu", &InvariantStep::mu);
    py::class_<IterationPromotingStep>(m, "IterationPromotingStep")
        .def(py::init<double, double>(), py::arg("mu0"), py::arg("phi"))
        .def_readwrite("mu0", &IterationPromotingStep::mu0)
        .def_readwrite("phi", &IterationPromotingStep::phi);
    py::class_<ErrorDrivenStep>(m, "ErrorDrivenStep")
        .def(py::init<double, double, double>(), py::arg("mu0"), py::arg("eta"), py::arg("c"))
        .def_readwrite("mu0", &ErrorDrivenStep::mu0)
        .def_readwrite("eta", &ErrorDrivenStep::eta)
        .def_readwrite("c", &ErrorDrivenStep::c);

    m.def("validate_schedule", &validate_schedule, py::arg("schedule"), py::arg("lambda_max") = 1.0);
    m.def("algorithm_of", &algorithm_of, py::arg("schedule"));

    m.def(
        "prediction_error",
        [](const FilterState& s, const std::vector<double>& x, double y) {
            return prediction_error(s, as_sample(x, y));
        },
        py::arg("state"), py::arg("regressor"), py::arg("observation"));
    m.def("step_size", &step_size, py::arg("schedule"), py::arg("state"));
    m.def(
        "update_vss_momentum",
        [](const FilterState& s, const std::vector<double>& x, double error, double eta) {
            return update_vss_momentum(s, as_sample(x, 0.0), error, eta);
        },
        py::arg("state"), py::arg("regressor"), py::arg("error"), py::arg("eta"));
    m.def(
        "lms_update",
        [](const FilterState& s, const std::vector<double>& x, double y,
           const StepSizeSchedule& schedule) {
            auto r = lms_update(s, as_sample(x, y), schedule);
            return py::make_tuple(std::move(r.state), r.error);
        },
        py::arg("state"), py::arg("regressor"), py::arg("observation"), py::arg("schedule"),
        "Returns (next_state, error).");

    py::class_<NoiseModel>(m, "NoiseModel")
        .def_static("from_snr_db", &NoiseModel::from_snr_db, py::arg("snr_db"),
                    py::arg("signal_power") = 1.0)
        .def_static("noiseless", &NoiseModel::noiseless, py::arg("signal_power") = 1.0)
        .def_readonly("snr_db", &NoiseModel::snr_db)
        .def_readonly("signal_power", &NoiseModel::signal_power)
        .def_readonly("variance", &NoiseModel::variance);

    m.def("derive_seed", &derive_seed, py::arg("parent"), py::arg("stream"));
    m.def(
        "draw_channel", [](std::size_t n, Seed seed) { return draw_channel(n, seed).taps; },
        py::arg("n_taps"), py::arg("seed"));
    m.def(
        "draw_training",
        [](std::size_t n, Seed seed) { return draw_training(n, seed).symbols; },
        py::arg("length"), py::arg("seed"));
    m.def(
        "regressor_at",
        [](std::vector<double> seq, std::size_t n, std::size_t n_taps) {
            return regressor_at(TrainingSequence{std::move(seq)}, n, n_taps);
        },
        py::arg("sequence"), py::arg("n"), py::arg("n_taps"));
    m.def(
        "observe",
        [](std::vector<double> channel, const std::vector<double>& x, const NoiseModel& noise,
           Seed seed, std::uint64_t n) {
            return observe(Channel{std::move(channel)}, x, noise, seed, n);
        },
        py::arg("channel"), py::arg("regressor"), py::arg("noise"), py::arg("seed"), py::arg("n"));

    m.def("steady_state_lower_bound", &steady_state_lower_bound, py::arg("lambda_max"),
          py::arg("noise_variance"), py::arg("step"));
    m.def(
        "average_mse",
        [](const std::vector<double>& truth, const std::vector<std::vector<double>>& estimates) {
            return average_mse(truth, estimates);
        },
        py::arg("truth"), py::arg("estimates"));
    m.def(
        "op_count",
        [](Algorithm a, std::int64_t n) {
            const auto c = op_count(a, n);
            return py::make_tuple(c.multiplications, c.additions);
        },
        py::arg("algorithm"), py::arg("n_taps"), "Returns (multiplications, additions).");
    m.def(
        "steady_state_empirical",
        [](const std::vector<double>& curve, double tail) {
            return steady_state_empirical(curve, tail);
        },
        py::arg("curve"), py::arg("tail_fraction") = kDefaultTailFraction);

    py::class_<AlgorithmConfig>(m, "AlgorithmConfig")
        .def(py::init<std::string, StepSizeSchedule>(), py::arg("name"), py::arg("schedule"))
        .def_readwrite("name", &AlgorithmConfig::name)
        .def_readwrite("schedule", &AlgorithmConfig::schedule);

    py::class_<TrialConfig>(m, "TrialConfig")
        .def(py::init<>())
        .def_readwrite("n_taps", &TrialConfig::n_taps)
        .def_readwrite("snr_db", &TrialConfig::snr_db)
        .def_readwrite("iterations", &TrialConfig::iterations)
        .def_readwrite("num_trials", &TrialConfig::num_trials)
        .def_readwrite("algorithms", &TrialConfig::algorithms)
        .def_readwrite("master_seed", &TrialConfig::master_seed)
        .def_readwrite("tail_fraction", &TrialConfig::tail_fraction)
        .def_readwrite("lambda_max", &TrialConfig::lambda_max)
        .def_readwrite("threads", &TrialConfig::threads);

    py::class_<TrialResult>(m, "TrialResult")
        .def_readonly("squared_error", &TrialResult::squared_error)
        .def_readonly("diverged", &TrialResult::diverged)
        .def_readonly("divergence_iteration", &TrialResult::divergence_iteration);

    py::class_<MseTrajectory>(m, "MseTrajectory")
        .def_readonly("algorithm", &MseTrajectory::algorithm)
        .def_readonly("per_iteration_mse", &MseTrajectory::per_iteration_mse)
        .def_readonly("steady_state", &MseTrajectory::steady_state)
        .def_readonly("convergence_iteration", &MseTrajectory::convergence_iteration)
        .def_readonly("steady_state_stderr", &MseTrajectory::steady_state_stderr)
        .def_readonly("convergence_stderr", &MseTrajectory::convergence_stderr)
        .def_readonly("trials_used", &MseTrajectory::trials_used)
        .def_readonly("diverged_trials", &MseTrajectory::diverged_trials);

    py::class_<DivergenceReport>(m, "DivergenceReport")
        .def_readonly("algorithm", &DivergenceReport::algorithm)
        .def_readonly("trial_index", &DivergenceReport::trial_index)
        .def_readonly("iteration", &DivergenceReport::iteration);

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("trajectories", &ExperimentResult::trajectories)
        .def_readonly("divergences", &ExperimentResult::divergences)
        .def_readonly("unstable", &ExperimentResult::unstable);

    m.def(
        "run_trial",
        [](const TrialConfig& c, std::size_t a, std::size_t t) { return run_trial(c, a, t); },
        py::arg("config"), py::arg("algorithm_index"), py::arg("trial_index"));
    m.def(
        "run_experiment", [](const TrialConfig& c) { return run_experiment(c); },
        py::arg("config"), py::call_guard<py::gil_scoped_release>());

    m.def(
        "compare_summary",
        [](const std::vector<MseTrajectory>& trajectories) {
            const auto table = compare_summary(trajectories);
            py::list rows, gaps;
            for (const auto& r : table.rows) {
                rows.append(py::make_tuple(r.algorithm, r.steady_state_db, r.convergence_iteration));
            }
            for (const auto& g : table.gaps) gaps.append(py::make_tuple(g.first, g.second, g.gap_db));
            return py::make_tuple(rows, gaps);
        },
        py::arg("trajectories"),
        "Returns ([(name, steady_state_db, convergence_iteration)], [(first, second, gap_db)]).");

    m.def(
        "report_complexity",
        [](std::int64_t n) {
            std::ostringstream out;
            report_complexity(n, out);
            return out.str();
        },
        py::arg("n_taps"));

    m.attr("__version__") = std::string(version());
}
