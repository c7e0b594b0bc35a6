// loopair command-line tool: analyze a plant model, recommend loop
// pairings, tune the resulting PID loops, simulate the closed loops and
// run the randomized property verifier.
//
// Exit codes: 0 success, 1 property-suite failure, 2 invalid input,
// 3 no viable pairing.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "loopair/loopair.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNoViablePairing = 3;

struct BasisChoice {
    bool rga = false;
    bool rnga = false;
};

BasisChoice parse_basis(const std::string& basis) {
    if (basis == "rga") return {true, false};
    if (basis == "rnga") return {false, true};
    if (basis == "both") return {true, true};
    throw loopair::ValidationError("--basis must be rga, rnga or both");
}

loopair::LambdaOverrides parse_lambda_overrides(const std::vector<std::string>& specs) {
    loopair::LambdaOverrides overrides;
    for (const std::string& spec : specs) {
        // LOOP=VALUE with LOOP as 1-based "output-input", e.g. 1-1=13.74
        const auto eq = spec.find('=');
        const auto dash = spec.find('-');
        if (eq == std::string::npos || dash == std::string::npos || dash > eq) {
            throw loopair::ValidationError("--lambda-f expects OUTPUT-INPUT=VALUE, got \"" + spec +
                                           "\"");
        }
        try {
            const std::size_t output = std::stoul(spec.substr(0, dash));
            const std::size_t input = std::stoul(spec.substr(dash + 1, eq - dash - 1));
            const double value = std::stod(spec.substr(eq + 1));
            if (output == 0 || input == 0) throw std::invalid_argument("1-based");
            overrides[{output - 1, input - 1}] = value;
        } catch (const std::exception&) {
            throw loopair::ValidationError("--lambda-f expects OUTPUT-INPUT=VALUE, got \"" + spec +
                                           "\"");
        }
    }
    return overrides;
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw loopair::ValidationError("cannot write to " + path);
    out << text;
}

struct CommonOptions {
    std::string plant_path;
    std::string basis = "both";
    std::string out = "-";
    std::string format = "table";
};

loopair::ReportFormat parse_format(const std::string& format) {
    if (format == "table") return loopair::ReportFormat::table;
    if (format == "json") return loopair::ReportFormat::structured;
    throw loopair::ValidationError("--format must be table or json");
}

int run_report_command(const CommonOptions& common, bool with_pairing, bool with_tuning,
                       const std::vector<std::string>& lambda_specs) {
    const loopair::TransferMatrix tm = loopair::load_plant_file(common.plant_path);
    const BasisChoice basis = parse_basis(common.basis);
    loopair::ReportOptions options;
    options.with_rga = basis.rga;
    options.with_rnga = basis.rnga;
    options.with_pairing = with_pairing;
    options.with_tuning = with_tuning;
    options.lambda_overrides = parse_lambda_overrides(lambda_specs);
    const loopair::AnalysisReport report = loopair::build_report(tm, options);
    write_text(common.out, loopair::render(report, parse_format(common.format)));
    return kExitOk;
}

struct SimulateOptions {
    CommonOptions common;
    std::size_t step_output = 1;  // 1-based
    double step_size = 0.01;
    double horizon = 500.0;
    std::vector<std::string> lambda_specs;
    std::string out_dir = ".";
};

int run_simulate(const SimulateOptions& opt) {
    const loopair::TransferMatrix tm = loopair::load_plant_file(opt.common.plant_path);
    const BasisChoice basis = parse_basis(opt.common.basis);
    const loopair::LambdaOverrides overrides = parse_lambda_overrides(opt.lambda_specs);
    if (opt.step_output == 0 || opt.step_output > tm.rows()) {
        throw loopair::ValidationError("--step-output out of range for this plant");
    }

    loopair::Scenario scenario;
    scenario.steps = {{opt.step_output - 1, 1.0, 0.0}};
    scenario.horizon = opt.horizon;
    scenario.step_size = opt.step_size;
    loopair::validate(scenario, tm);

    loopair::ReportOptions report_options;
    report_options.with_rga = basis.rga;
    report_options.with_rnga = basis.rnga;
    report_options.with_pairing = true;
    report_options.with_tuning = true;
    report_options.lambda_overrides = overrides;
    loopair::AnalysisReport report = loopair::build_report(tm, report_options);
    report.scenario = scenario;

    std::filesystem::create_directories(opt.out_dir);
    auto run_basis = [&](const loopair::BasisAnalysis& analysis, const std::string& label) {
        const loopair::SimulationTrace trace =
            loopair::simulate(tm, *analysis.plan, analysis.tunings, scenario);
        loopair::ScenarioMetrics metrics;
        metrics.basis = label;
        metrics.pairs = analysis.plan->pairs;
        metrics.iae_per_output = trace.iae_per_output;
        metrics.isci_per_input = trace.isci_per_input;
        report.metrics.push_back(metrics);
        const auto csv_path = std::filesystem::path(opt.out_dir) / ("trace_" + label + ".csv");
        write_text(csv_path.string(), loopair::trace_to_csv(trace));
    };
    if (report.rnga_basis.has_value()) run_basis(*report.rnga_basis, "rnga");
    if (report.rga_basis.has_value()) run_basis(*report.rga_basis, "rga");

    const auto metrics_path = std::filesystem::path(opt.out_dir) / "metrics.json";
    write_text(metrics_path.string(), loopair::render(report, loopair::ReportFormat::structured));
    // Comparative table on stdout (side by side when basis = both).
    std::cout << loopair::render(report, loopair::ReportFormat::table);
    return kExitOk;
}

struct VerifyCliOptions {
    std::size_t trials = 1000;
    std::size_t max_rows = 3;
    std::size_t max_cols = 6;
    std::uint64_t seed = loopair::kDefaultVerifySeed;
    std::string out = "-";
};

int run_verify(const VerifyCliOptions& opt) {
    loopair::VerifyOptions options;
    options.trials = opt.trials;
    options.max_rows = opt.max_rows;
    options.max_cols = opt.max_cols;
    options.seed = opt.seed;
    const loopair::VerifySummary summary = loopair::run_property_suite(options);
    write_text(opt.out, loopair::render(summary));
    return summary.all_passed() ? kExitOk : kExitPropertyFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"loop-pairing analysis toolkit"};
    app.require_subcommand(1);

    CommonOptions analyze_opt, pair_opt, tune_opt;
    std::vector<std::string> tune_lambda_specs;
    SimulateOptions sim_opt;
    VerifyCliOptions verify_opt;

    auto add_common = [](CLI::App* cmd, CommonOptions& opt) {
        cmd->add_option("--plant", opt.plant_path, "plant model file (JSON)")->required();
        cmd->add_option("--basis", opt.basis, "interaction basis: rga, rnga or both");
        cmd->add_option("--out", opt.out, "output path (- for stdout)");
        cmd->add_option("--format", opt.format, "report format: table or json");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "arrays, sums and property residuals");
    add_common(analyze, analyze_opt);

    CLI::App* pair = app.add_subcommand("pair", "recommend loop pairings");
    add_common(pair, pair_opt);

    CLI::App* tune = app.add_subcommand("tune", "pairings plus IMC-PID settings");
    add_common(tune, tune_opt);
    tune->add_option("--lambda-f", tune_lambda_specs,
                     "per-loop filter constant OUTPUT-INPUT=VALUE (repeatable)");

    CLI::App* simulate = app.add_subcommand("simulate", "closed-loop traces and IAE/ISCI metrics");
    simulate->add_option("--plant", sim_opt.common.plant_path, "plant model file (JSON)")
        ->required();
    simulate->add_option("--basis", sim_opt.common.basis, "interaction basis: rga, rnga or both");
    simulate->add_option("--step-output", sim_opt.step_output,
                         "1-based output receiving the unit setpoint step");
    simulate->add_option("--step-size", sim_opt.step_size, "integration step h in seconds");
    simulate->add_option("--horizon", sim_opt.horizon, "simulation horizon in seconds");
    simulate->add_option("--lambda-f", sim_opt.lambda_specs,
                         "per-loop filter constant OUTPUT-INPUT=VALUE (repeatable)");
    simulate->add_option("--out", sim_opt.out_dir,
                         "output directory for trace CSVs and metrics.json");

    CLI::App* verify = app.add_subcommand("verify", "randomized interaction-array property suite");
    verify->add_option("--trials", verify_opt.trials, "number of random matrices");
    verify->add_option("--seed", verify_opt.seed, "master seed");
    verify->add_option("--max-r", verify_opt.max_rows, "largest row count");
    verify->add_option("--max-s", verify_opt.max_cols, "largest column count");
    verify->add_option("--out", verify_opt.out, "summary path (- for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (analyze->parsed()) return run_report_command(analyze_opt, false, false, {});
        if (pair->parsed()) return run_report_command(pair_opt, true, false, {});
        if (tune->parsed()) return run_report_command(tune_opt, true, true, tune_lambda_specs);
        if (simulate->parsed()) return run_simulate(sim_opt);
        if (verify->parsed()) return run_verify(verify_opt);
    } catch (const loopair::NoViablePairingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoViablePairing;
    } catch (const loopair::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
