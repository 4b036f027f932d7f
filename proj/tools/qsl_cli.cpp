// qsl command-line front end with run, preset and sweep subcommands.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsl/error.hpp"
#include "qsl/runner.hpp"
#include "qsl/scenario.hpp"

namespace {

constexpr int kChainViolationExit = 1;
constexpr int kErrorExitBase = 10;

int error_exit(const qsl::Error& e) {
    std::cerr << "qsl: " << e.what() << '\n';
    return kErrorExitBase + static_cast<int>(e.code());
}

std::vector<Eigen::Index> parse_dims(const std::string& list) {
    std::vector<Eigen::Index> dims;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long v = std::stol(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            dims.push_back(v);
        } catch (const std::exception&) {
            throw qsl::Error(qsl::ErrorCode::Input, "--dims: cannot parse '" + item + "'");
        }
    }
    return dims;
}

void print_run(const qsl::RunSummary& s, const std::string& out) {
    std::cout << "wrote " << s.rows << " rows to " << out << " (" << s.chain_violations
              << " chain violations, " << s.runtime_seconds << " s)\n";
    for (const auto& m : s.violation_messages) std::cerr << "violation: " << m << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entropy-based quantum speed limits for detailed-balance GKSL dynamics", "qsl"};
    app.set_version_flag("--version", std::string("qsl ") + QSL_VERSION);
    app.require_subcommand(1);

    std::string config_path, run_out = "run.csv";
    std::size_t stride = 0;
    auto* run = app.add_subcommand("run", "Integrate a scenario file and write bound time series");
    run->add_option("--config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--out", run_out, "CSV output path (summary goes to <out>.summary.json)");
    run->add_option("--stride", stride, "Store every N-th integration step (overrides the file)")
        ->check(CLI::PositiveNumber);

    std::string preset_name, preset_out;
    auto* preset = app.add_subcommand("preset", "Write a built-in scenario file");
    preset->add_option("name", preset_name, "Preset name")->required()->check(CLI::IsMember({"two-level"}));
    preset->add_option("--out", preset_out, "Output path (stdout when omitted)");

    std::string dims_list = "2", sweep_out = "sweep.csv";
    qsl::SweepConfig cfg;
    auto* sweep = app.add_subcommand("sweep", "Evaluate bounds over seeded random detailed-balance models");
    sweep->add_option("--dims", dims_list, "Comma-separated dimensions in 2..6")->required();
    sweep->add_option("--count", cfg.count, "Models per dimension")->required()->check(CLI::PositiveNumber);
    sweep->add_option("--seed", cfg.seed, "Base seed")->required();
    sweep->add_option("--out", sweep_out, "Per-model CSV output path")->required();
    sweep->add_option("--t-end", cfg.t_end, "Trajectory length")->check(CLI::PositiveNumber);
    sweep->add_option("--dt", cfg.dt, "Integration step")->check(CLI::PositiveNumber);
    sweep->add_option("--stride", cfg.stride, "Sampling stride")->check(CLI::PositiveNumber);
    sweep->add_option("--threads", cfg.threads, "Worker threads (0: all cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            qsl::Scenario s = qsl::load_scenario(config_path);
            if (stride > 0) s.stride = stride;
            const qsl::RunSummary summary = qsl::run_and_emit(s, run_out);
            print_run(summary, run_out);
            return summary.ok() ? 0 : kChainViolationExit;
        }
        if (*preset) {
            const qsl::Scenario s = qsl::preset_two_level();
            if (preset_out.empty()) {
                std::cout << qsl::to_json(s);
            } else {
                qsl::save_scenario(s, preset_out);
                std::cout << "wrote " << preset_out << '\n';
            }
            return 0;
        }
        if (*sweep) {
            cfg.dims = parse_dims(dims_list);
            const qsl::SweepSummary summary = qsl::sweep_and_emit(cfg, sweep_out);
            std::cout << "swept " << summary.models << " models into " << sweep_out << " ("
                      << summary.chain_violations << " chain violations, " << summary.failed_models
                      << " failed); median ratio qfi " << summary.median_qfi_ratio << ", vs "
                      << summary.median_vs_ratio << ", fss " << summary.median_fss_ratio << '\n';
            if (summary.failed_models > 0) return kErrorExitBase + static_cast<int>(qsl::ErrorCode::Integration);
            return summary.ok() ? 0 : kChainViolationExit;
        }
    } catch (const qsl::Error& e) {
        return error_exit(e);
    }
    return 0;
}
