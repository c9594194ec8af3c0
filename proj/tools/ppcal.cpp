// ppcal: simulate tracker data, identify a robot model, compare estimators.
//
// Exit codes: 0 success, 2 usage or invalid input, 3 parse error,
// 4 unidentifiable parameters, 5 no convergence.

#include "ppcal/experiments.hpp"
#include "ppcal/identification.hpp"
#include "ppcal/io/measurement_file.hpp"
#include "ppcal/io/model_file.hpp"
#include "ppcal/io/report.hpp"
#include "ppcal/io/scenario_file.hpp"
#include "ppcal/kinematics.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

enum Exit { kOk = 0, kUsage = 2, kParse = 3, kUnidentifiable = 4, kNotConverged = 5 };

struct UsageError : ppcal::Error {
    using ppcal::Error::Error;
};

void emit(const std::string& text, const std::string& output) {
    if (output.empty())
        std::cout << text;
    else
        ppcal::io::write_text_file(output, text);
}

struct SimulateArgs {
    std::string scenario;
    std::string model;
    std::string truth;
    std::optional<double> sigma;
    std::optional<std::uint64_t> seed;
    std::optional<int> random;
    std::optional<std::uint64_t> configuration_seed;
    std::string output;
};

int run_simulate(const SimulateArgs& a) {
    if (a.scenario.empty() == a.model.empty()) throw UsageError("simulate needs exactly one of --scenario or --model");
    ppcal::ExperimentScenario sc;
    if (!a.scenario.empty()) {
        sc = ppcal::io::load_scenario(a.scenario);
    } else {
        sc.model = ppcal::io::load_model(a.model);
        sc.truth = a.truth.empty() ? ppcal::ExperimentScenario::nominal_truth(sc.model)
                                   : ppcal::io::load_truth(a.truth, sc.model);
    }
    if (a.sigma) sc.sigma = *a.sigma;
    if (a.seed) sc.seed = *a.seed;
    if (a.random) {
        sc.configurations.clear();
        sc.random_configurations = *a.random;
    }
    if (a.configuration_seed) sc.configuration_seed = *a.configuration_seed;
    sc.validate();
    const auto data = ppcal::simulate_measurements(sc, ppcal::trial_seed(sc, 0));
    emit(ppcal::io::serialize_measurements(ppcal::io::to_measurement_table(data, sc.model.joint_count)), a.output);
    return kOk;
}

struct IdentifyArgs {
    std::string model;
    std::string measurements;
    std::string approach = "partial";
    std::optional<double> weight;
    int max_iter = 50;
    double tol = 1e-9;
    std::string output;
    bool machine = false;
};

bool has_data_rows(const std::string& text) {
    std::size_t lines = 0;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        const auto t = ppcal::io::detail::trim(raw);
        if (!t.empty() && t.front() != '#') ++lines;
    }
    return lines > 1;
}

int run_identify(const IdentifyArgs& a) {
    const auto model = ppcal::io::load_model(a.model);
    const auto text = ppcal::io::read_text_file(a.measurements);
    if (!has_data_rows(text)) throw UsageError("measurement file '" + a.measurements + "' contains no data");
    const auto table = ppcal::io::parse_measurement_text(text);
    if (table.joints != model.joint_count)
        throw UsageError("measurement file has " + std::to_string(table.joints) + " joints, model has " +
                         std::to_string(model.joint_count));
    const auto data = ppcal::io::to_measurement_set(table);
    ppcal::require_marker_triad(data.records.front().markers);
    for (const auto& rec : data.records)
        if (!ppcal::within_joint_limits(model, rec.q))
            std::cerr << "warning: configuration '" << rec.config_id << "' is outside the joint limits\n";

    ppcal::IdentifyOptions options;
    options.max_iter = a.max_iter;
    options.tol = a.tol;
    ppcal::io::IdentifyReportInfo info{a.approach, 0.0, data.size(), data.marker_count()};
    ppcal::IdentificationResult result;
    if (a.approach == "fullpose") {
        info.weight = a.weight.value_or(ppcal::default_orientation_weight(model));
        result = ppcal::identify_fullpose(model, data, info.weight, options);
    } else {
        result = ppcal::identify_iterative(model, data, options);
    }
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    emit(a.machine ? ppcal::io::identify_report_csv(model, result, info)
                   : ppcal::io::identify_report_text(model, result, info),
         a.output);
    if (!result.converged) {
        std::cerr << "error: identification did not converge in " << result.iterations << " iterations\n";
        return kNotConverged;
    }
    return kOk;
}

struct CompareArgs {
    std::string scenario;
    std::optional<double> weight;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<int> max_iter;
    std::optional<double> tol;
    std::string output;
    bool machine = false;
};

int run_compare(const CompareArgs& a) {
    auto sc = ppcal::io::load_scenario(a.scenario);
    if (a.weight) sc.orientation_weight = *a.weight;
    if (a.trials) sc.trials = *a.trials;
    if (a.seed) sc.seed = *a.seed;
    if (a.max_iter) sc.options.max_iter = *a.max_iter;
    if (a.tol) sc.options.tol = *a.tol;
    const auto r = ppcal::run_comparison(sc);
    emit(a.machine ? ppcal::io::compare_report_csv(sc, r) : ppcal::io::compare_report_text(sc, r), a.output);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robot calibration from tracker reference-point measurements"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Write synthetic measurements of an injected robot");
    simulate->add_option("--scenario", sim.scenario, "Scenario file (model, truth, configurations, noise)");
    simulate->add_option("--model", sim.model, "Model file, when no scenario is given");
    simulate->add_option("--truth", sim.truth, "Injected truth file for --model");
    simulate->add_option("--sigma", sim.sigma, "Noise standard deviation per coordinate [mm]")
        ->check(CLI::NonNegativeNumber);
    simulate->add_option("--seed", sim.seed, "Noise seed");
    simulate->add_option("--random", sim.random, "Number of random configurations")->check(CLI::PositiveNumber);
    simulate->add_option("--config-seed", sim.configuration_seed, "Seed of the random configurations");
    simulate->add_option("--output", sim.output, "Measurement file to write (default: stdout)");

    IdentifyArgs idf;
    auto* identify = app.add_subcommand("identify", "Identify model parameters from a measurement file");
    identify->add_option("model", idf.model, "Model file")->required();
    identify->add_option("measurements", idf.measurements, "Measurement file")->required();
    identify->add_option("--approach", idf.approach, "Estimator")
        ->check(CLI::IsMember({"partial", "fullpose"}))
        ->capture_default_str();
    identify->add_option("--weight", idf.weight, "Full-pose orientation weight [mm/rad]")
        ->check(CLI::PositiveNumber);
    identify->add_option("--max-iter", idf.max_iter, "Outer iteration limit")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    identify->add_option("--tol", idf.tol, "Update tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    identify->add_option("--output", idf.output, "Report file (default: stdout)");
    identify->add_flag("--machine-readable", idf.machine, "Comma-separated report");

    CompareArgs cmp;
    auto* compare = app.add_subcommand("compare", "Monte-Carlo comparison of full-pose and partial-pose estimators");
    compare->add_option("scenario", cmp.scenario, "Scenario file")->required();
    compare->add_option("--weight", cmp.weight, "Full-pose orientation weight [mm/rad]")->check(CLI::PositiveNumber);
    compare->add_option("--trials", cmp.trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
    compare->add_option("--seed", cmp.seed, "Noise seed");
    compare->add_option("--max-iter", cmp.max_iter, "Outer iteration limit")->check(CLI::PositiveNumber);
    compare->add_option("--tol", cmp.tol, "Update tolerance")->check(CLI::PositiveNumber);
    compare->add_option("--output", cmp.output, "Report file (default: stdout)");
    compare->add_flag("--machine-readable", cmp.machine, "Comma-separated report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*simulate) return run_simulate(sim);
        if (*identify) return run_identify(idf);
        return run_compare(cmp);
    } catch (const ppcal::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const ppcal::UnidentifiableError& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& c : e.combinations()) std::cerr << "  unidentifiable: " << c << "\n";
        return kUnidentifiable;
    } catch (const ppcal::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}
