#pragma once

/// @file harness.hpp
/// Replicated experiments, parameter sweeps, aggregation and export.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "plcgp/config.hpp"
#include "plcgp/problems.hpp"
#include "plcgp/selection.hpp"

namespace plcgp {

struct ReplicationResult {
    std::size_t index{};
    std::uint64_t seed{};
    RunRecord record;
};

/// One exported line of runs.csv.
struct RunRow {
    std::size_t replication{};
    std::uint64_t seed{};
    bool solved{};
    std::uint64_t evaluations{};
    std::uint64_t generations{};
    double final_fitness{};
    std::size_t functional_size{};
    std::size_t active_links{};
    /// Dynamic runs: mean recovery over recovered epochs after the first; NaN otherwise.
    double mean_recovery{};
    std::size_t unrecovered_epochs{};

    bool operator==(const RunRow& other) const noexcept;
};

/// Evaluation and generation statistics cover solved replications only, as in
/// the usual success-rate tables. NaN marks an empty statistic.
struct Aggregates {
    std::size_t replications{};
    std::size_t solved{};
    double success_fraction{};
    double mean_evaluations{};
    double median_evaluations{};
    double q1_evaluations{};
    double q3_evaluations{};
    double mean_generations{};
    double median_generations{};
    double mean_final_fitness{};
    double median_final_fitness{};
    double mean_functional_size{};
    double median_functional_size{};
    double mean_active_links{};
    double median_active_links{};
    double mean_recovery{};
    std::size_t unrecovered_epochs{};

    /// NaN fields compare equal to NaN.
    bool operator==(const Aggregates& other) const noexcept;
};

struct ExperimentSummary {
    ExperimentConfig config;
    std::vector<ReplicationResult> runs;
    Aggregates aggregates;
};

/// Problem instance for one replication; dynamic targets and Pagie samples are
/// drawn from the replication's stream.
Problem make_problem(const ProblemConfig& config, Rng& rng);

/// One replication, fully determined by (config, index).
ReplicationResult run_replication(const ExperimentConfig& config, std::size_t index);

/// Runs all replications on `config.workers` threads and writes the artifacts
/// to config.output_dir when it is set. Throws ConfigError or IoError.
ExperimentSummary run_replications(const ExperimentConfig& config);

RunRow to_row(const ReplicationResult& result);
std::vector<RunRow> to_rows(std::span<const ReplicationResult> runs);
Aggregates aggregate(std::span<const RunRow> rows);

struct SweepResult {
    std::vector<std::size_t> lambdas;
    std::vector<double> rates;
    /// Row-major: rates are rows, lambdas are columns.
    std::vector<ExperimentSummary> cells;

    [[nodiscard]] const ExperimentSummary& at(std::size_t rate_index, std::size_t lambda_index) const
    {
        return cells.at(rate_index * lambdas.size() + lambda_index);
    }
};

/// One experiment per (rate, lambda) cell. Cell artifacts go to
/// "<output_dir>/rate_<r>_lambda_<l>", the matrix to sweep.csv and table.txt.
SweepResult sweep_grid(const ExperimentConfig& base, std::span<const std::size_t> lambdas,
                       std::span<const double> rates);

/// Writes config.cfg, summary.json, runs.csv, chromosomes.txt, recovery.csv
/// (dynamic runs) and traces/ (when traces were recorded).
void export_results(const ExperimentSummary& summary, const std::filesystem::path& directory);
void export_sweep(const SweepResult& sweep, const std::filesystem::path& directory);

std::vector<RunRow> read_runs_csv(const std::filesystem::path& path);

/// Values of a runs.csv column by name, optionally restricted to solved rows.
std::vector<double> column_values(std::span<const RunRow> rows, std::string_view column, bool solved_only);

} // namespace plcgp
