// runner.hpp: trajectory execution, CSV/summary emission and the randomized sweep.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "qsl/bounds.hpp"
#include "qsl/scenario.hpp"

namespace qsl {

/// CSV header, in column order.
const std::vector<std::string>& csv_columns();

/// Shortest round-trip decimal form; infinities print as "inf" / "-inf", NaN as "nan".
std::string format_number(double v);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const BoundReport& r);

struct RatioRange {
    double min = 0.0;
    double max = 0.0;
};

struct RunSummary {
    std::string scenario;
    std::size_t rows = 0;
    std::size_t chain_violations = 0;
    std::vector<std::string> violation_messages;  // first few, verbatim
    std::size_t divergent_rows = 0;
    std::size_t fisher_term_below_speed = 0;   // rows with 1/2 sqrt F(H+H_D) < speed
    std::size_t entropy_term_below_speed = 0;  // rows with sqrt(sigma_dot M'/2) < speed
    std::size_t trace_renormalizations = 0;
    // bound / speed_tr over rows with speed_tr > 1e-12 and finite bounds.
    RatioRange fss_ratio, vs_ratio, qfi_ratio, current_ratio;
    double runtime_seconds = 0.0;

    bool ok() const { return chain_violations == 0; }
    std::string to_json() const;
};

struct RunResult {
    std::vector<BoundReport> reports;
    RunSummary summary;
};

/// Integrates the scenario and evaluates a bound report at each stored point.
RunResult run_scenario(const Scenario& scenario);

/// run_scenario, then writes the CSV to out_path and the summary next to it
/// (extension replaced by ".summary.json").
RunSummary run_and_emit(const Scenario& scenario, const std::filesystem::path& out_path);

std::filesystem::path summary_path(const std::filesystem::path& csv_path);

/// A seeded random model satisfying detailed balance: random Hermitian H, one
/// Hermitian channel and one lowering channel, beta ~ U(0.2, 2),
/// gamma(omega > 0) ~ U(0.2, 1.5), gamma(-omega) = gamma(omega) e^{-beta omega},
/// gamma(0) ~ U(0.1, 1). The initial state is a full-rank Ginibre state.
Scenario random_detailed_balance_model(Eigen::Index dim, std::mt19937_64& rng);

struct SweepConfig {
    std::vector<Eigen::Index> dims{2};
    std::size_t count = 10;  // models per dimension
    std::uint64_t seed = 1;
    double t_end = 1.0;
    double dt = 1e-3;
    std::size_t stride = 100;
    std::size_t threads = 0;  // 0: hardware concurrency
};

struct SweepModelResult {
    std::size_t index = 0;
    Eigen::Index dim = 0;
    std::uint64_t seed = 0;
    std::size_t points = 0;
    std::size_t chain_violations = 0;
    double min_sigma_dot = 0.0;
    double max_sigma_form_gap = 0.0;  // |sigma_dot - flux form| over finite rows
    // median over the model's rows of bound / speed_tr
    double fss_ratio = 0.0, vs_ratio = 0.0, qfi_ratio = 0.0, current_ratio = 0.0;
    std::string error;  // non-empty when the model failed
};

struct SweepSummary {
    std::size_t models = 0;
    std::size_t failed_models = 0;
    std::size_t chain_violations = 0;
    double min_sigma_dot = 0.0;
    double median_fss_ratio = 0.0, median_vs_ratio = 0.0, median_qfi_ratio = 0.0, median_current_ratio = 0.0;
    double runtime_seconds = 0.0;
    std::vector<SweepModelResult> results;

    bool ok() const { return chain_violations == 0 && failed_models == 0; }
    std::string to_json() const;
};

/// Evaluates every model concurrently; results are ordered by model index.
SweepSummary sweep(const SweepConfig& config);

/// sweep, then writes the per-model CSV and the summary JSON.
SweepSummary sweep_and_emit(const SweepConfig& config, const std::filesystem::path& out_path);

void write_sweep_csv(std::ostream& out, const SweepSummary& summary);

} // namespace qsl
