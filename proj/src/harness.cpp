#include "plcgp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "plcgp/error.hpp"
#include "plcgp/stats.hpp"

namespace plcgp {

namespace {
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

    bool same(double a, double b) noexcept
    {
        return (std::isnan(a) && std::isnan(b)) || a == b;
    }

    std::ofstream open_for_write(const std::filesystem::path& path)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError(fmt::format("cannot write {}", path.string()));
        }
        return out;
    }

    void close_checked(std::ofstream& out, const std::filesystem::path& path)
    {
        out.close();
        if (!out) {
            throw IoError(fmt::format("failed writing {}", path.string()));
        }
    }

    void make_directory(const std::filesystem::path& dir)
    {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec || !std::filesystem::is_directory(dir)) {
            throw IoError(fmt::format("cannot create output directory {}: {}", dir.string(), ec.message()));
        }
    }

    constexpr std::string_view kRunsHeader =
        "replication,seed,solved,evaluations,generations,final_fitness,functional_size,active_links,"
        "mean_recovery,unrecovered_epochs";

    nlohmann::json number_or_null(double v)
    {
        return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
    }
} // namespace

bool RunRow::operator==(const RunRow& o) const noexcept
{
    return replication == o.replication && seed == o.seed && solved == o.solved && evaluations == o.evaluations &&
           generations == o.generations && same(final_fitness, o.final_fitness) &&
           functional_size == o.functional_size && active_links == o.active_links &&
           same(mean_recovery, o.mean_recovery) && unrecovered_epochs == o.unrecovered_epochs;
}

bool Aggregates::operator==(const Aggregates& o) const noexcept
{
    return replications == o.replications && solved == o.solved && same(success_fraction, o.success_fraction) &&
           same(mean_evaluations, o.mean_evaluations) && same(median_evaluations, o.median_evaluations) &&
           same(q1_evaluations, o.q1_evaluations) && same(q3_evaluations, o.q3_evaluations) &&
           same(mean_generations, o.mean_generations) && same(median_generations, o.median_generations) &&
           same(mean_final_fitness, o.mean_final_fitness) && same(median_final_fitness, o.median_final_fitness) &&
           same(mean_functional_size, o.mean_functional_size) &&
           same(median_functional_size, o.median_functional_size) && same(mean_active_links, o.mean_active_links) &&
           same(median_active_links, o.median_active_links) && same(mean_recovery, o.mean_recovery) &&
           unrecovered_epochs == o.unrecovered_epochs;
}

Problem make_problem(const ProblemConfig& config, Rng& rng)
{
    switch (config.kind) {
    case ProblemKind::parity:
        return Problem::parity(config.parity_bits);
    case ProblemKind::dynamic:
        return Problem::dynamic(config.dynamic_inputs, rng);
    case ProblemKind::pagie:
        return Problem::pagie(rng, config.sampling);
    }
    throw ConfigError("unknown problem kind");
}

ReplicationResult run_replication(const ExperimentConfig& config, std::size_t index)
{
    ReplicationResult result;
    result.index = index;
    result.seed = replication_seed(config.base_seed, index);
    Rng rng(result.seed);
    const auto problem = make_problem(config.problem, rng);
    const auto spec = problem.genome_spec(config.num_nodes);
    RunOptions options;
    options.record_generation_log = config.record_traces;
    options.record_rate_trace = config.record_traces;
    if (config.problem.kind == ProblemKind::dynamic) {
        result.record = evolve_dynamic(problem, spec, config.policy, config.problem.epochs,
                                       config.problem.epoch_length, config.problem.flips, rng, options);
    } else {
        result.record = evolve(problem, spec, config.policy, config.budget, rng, options);
    }
    return result;
}

ExperimentSummary run_replications(const ExperimentConfig& config)
{
    config.validate();

    ExperimentSummary summary;
    summary.config = config;
    summary.runs.resize(config.replications);

    auto workers = config.workers == 0 ? std::max(1U, std::thread::hardware_concurrency()) : config.workers;
    workers = std::min(workers, config.replications);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto work = [&] {
        for (auto i = next.fetch_add(1); i < config.replications; i = next.fetch_add(1)) {
            try {
                summary.runs[i] = run_replication(config, i);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = config.replications;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) {
            pool.emplace_back(work);
        }
        work();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    const auto rows = to_rows(summary.runs);
    summary.aggregates = aggregate(rows);
    if (!config.output_dir.empty()) {
        export_results(summary, config.output_dir);
    }
    return summary;
}

RunRow to_row(const ReplicationResult& result)
{
    const auto& r = result.record;
    RunRow row;
    row.replication = result.index;
    row.seed = result.seed;
    row.solved = r.solved;
    row.evaluations = r.evaluations_used;
    row.generations = r.generations_used;
    row.final_fitness = r.best_fitness.value;
    row.functional_size = r.functional_size;
    row.active_links = r.active_links;
    row.mean_recovery = kNaN;
    if (!r.recovery_times.empty()) {
        std::vector<double> recovered;
        for (std::size_t e = 1; e < r.recovery_times.size(); ++e) {
            if (r.recovery_times[e] == kNotRecovered) {
                ++row.unrecovered_epochs;
            } else {
                recovered.push_back(static_cast<double>(r.recovery_times[e]));
            }
        }
        row.mean_recovery = mean(recovered);
    }
    return row;
}

std::vector<RunRow> to_rows(std::span<const ReplicationResult> runs)
{
    std::vector<RunRow> rows;
    rows.reserve(runs.size());
    for (const auto& r : runs) {
        rows.push_back(to_row(r));
    }
    return rows;
}

Aggregates aggregate(std::span<const RunRow> rows)
{
    Aggregates a;
    a.replications = rows.size();
    std::vector<double> evaluations;
    std::vector<double> generations;
    std::vector<double> fitness;
    std::vector<double> sizes;
    std::vector<double> links;
    std::vector<double> recovery;
    for (const auto& row : rows) {
        if (row.solved) {
            ++a.solved;
            evaluations.push_back(static_cast<double>(row.evaluations));
            generations.push_back(static_cast<double>(row.generations));
        }
        fitness.push_back(row.final_fitness);
        sizes.push_back(static_cast<double>(row.functional_size));
        links.push_back(static_cast<double>(row.active_links));
        if (!std::isnan(row.mean_recovery)) {
            recovery.push_back(row.mean_recovery);
        }
        a.unrecovered_epochs += row.unrecovered_epochs;
    }
    a.success_fraction = rows.empty() ? kNaN : static_cast<double>(a.solved) / static_cast<double>(rows.size());
    a.mean_evaluations = mean(evaluations);
    a.median_evaluations = median(evaluations);
    a.q1_evaluations = quantile(evaluations, 0.25);
    a.q3_evaluations = quantile(evaluations, 0.75);
    a.mean_generations = mean(generations);
    a.median_generations = median(generations);
    a.mean_final_fitness = mean(fitness);
    a.median_final_fitness = median(fitness);
    a.mean_functional_size = mean(sizes);
    a.median_functional_size = median(sizes);
    a.mean_active_links = mean(links);
    a.median_active_links = median(links);
    a.mean_recovery = mean(recovery);
    return a;
}

SweepResult sweep_grid(const ExperimentConfig& base, std::span<const std::size_t> lambdas,
                       std::span<const double> rates)
{
    if (lambdas.empty() || rates.empty()) {
        throw ConfigError("sweep needs at least one lambda and one rate");
    }
    SweepResult sweep;
    sweep.lambdas.assign(lambdas.begin(), lambdas.end());
    sweep.rates.assign(rates.begin(), rates.end());
    for (auto rate : rates) {
        for (auto lambda : lambdas) {
            auto cell = base;
            cell.policy.lambda = lambda;
            cell.policy.initial_mutation_rate = rate;
            cell.policy.min_mutation_rate = std::min(cell.policy.min_mutation_rate, rate);
            cell.policy.max_mutation_rate = std::max(cell.policy.max_mutation_rate, rate);
            if (!base.output_dir.empty()) {
                cell.output_dir = (std::filesystem::path(base.output_dir) /
                                   fmt::format("rate_{}_lambda_{}", rate, lambda))
                                      .string();
            }
            sweep.cells.push_back(run_replications(cell));
        }
    }
    if (!base.output_dir.empty()) {
        export_sweep(sweep, base.output_dir);
    }
    return sweep;
}

void export_results(const ExperimentSummary& summary, const std::filesystem::path& directory)
{
    make_directory(directory);
    const auto rows = to_rows(summary.runs);

    {
        const auto path = directory / "config.cfg";
        auto out = open_for_write(path);
        write_config(out, summary.config);
        close_checked(out, path);
    }
    {
        const auto path = directory / "runs.csv";
        auto out = open_for_write(path);
        out << kRunsHeader << '\n';
        for (const auto& r : rows) {
            out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.replication, r.seed, r.solved ? 1 : 0,
                               r.evaluations, r.generations, r.final_fitness, r.functional_size, r.active_links,
                               r.mean_recovery, r.unrecovered_epochs);
        }
        close_checked(out, path);
    }
    {
        const auto path = directory / "chromosomes.txt";
        auto out = open_for_write(path);
        for (const auto& r : summary.runs) {
            out << to_record(r.record.final_chromosome) << '\n';
        }
        close_checked(out, path);
    }
    {
        const auto& a = summary.aggregates;
        nlohmann::ordered_json doc;
        for (const auto& [key, value] : to_key_values(summary.config)) {
            doc["config"][key] = value;
        }
        doc["policy"] = summary.config.policy.name();
        auto& agg = doc["aggregates"];
        agg["replications"] = a.replications;
        agg["solved"] = a.solved;
        agg["success_fraction"] = number_or_null(a.success_fraction);
        agg["mean_evaluations"] = number_or_null(a.mean_evaluations);
        agg["median_evaluations"] = number_or_null(a.median_evaluations);
        agg["q1_evaluations"] = number_or_null(a.q1_evaluations);
        agg["q3_evaluations"] = number_or_null(a.q3_evaluations);
        agg["mean_generations"] = number_or_null(a.mean_generations);
        agg["median_generations"] = number_or_null(a.median_generations);
        agg["mean_final_fitness"] = number_or_null(a.mean_final_fitness);
        agg["median_final_fitness"] = number_or_null(a.median_final_fitness);
        agg["mean_functional_size"] = number_or_null(a.mean_functional_size);
        agg["median_functional_size"] = number_or_null(a.median_functional_size);
        agg["mean_active_links"] = number_or_null(a.mean_active_links);
        agg["median_active_links"] = number_or_null(a.median_active_links);
        agg["mean_recovery"] = number_or_null(a.mean_recovery);
        agg["unrecovered_epochs"] = a.unrecovered_epochs;
        auto& reps = doc["replications"];
        reps = nlohmann::ordered_json::array();
        for (const auto& r : summary.runs) {
            nlohmann::ordered_json item;
            item["replication"] = r.index;
            item["seed"] = r.seed;
            item["solved"] = r.record.solved;
            item["evaluations"] = r.record.evaluations_used;
            item["generations"] = r.record.generations_used;
            item["final_fitness"] = number_or_null(r.record.best_fitness.value);
            item["functional_size"] = r.record.functional_size;
            item["active_links"] = r.record.active_links;
            if (!r.record.recovery_times.empty()) {
                item["recovery_times"] = r.record.recovery_times;
            }
            item["chromosome"] = to_record(r.record.final_chromosome);
            reps.push_back(std::move(item));
        }
        const auto path = directory / "summary.json";
        auto out = open_for_write(path);
        out << doc.dump(2) << '\n';
        close_checked(out, path);
    }
    const bool dynamic = std::any_of(summary.runs.begin(), summary.runs.end(),
                                     [](const auto& r) { return !r.record.recovery_times.empty(); });
    if (dynamic) {
        const auto path = directory / "recovery.csv";
        auto out = open_for_write(path);
        out << "replication,epoch,generations\n";
        for (const auto& r : summary.runs) {
            for (std::size_t e = 0; e < r.record.recovery_times.size(); ++e) {
                out << fmt::format("{},{},{}\n", r.index, e, r.record.recovery_times[e]);
            }
        }
        close_checked(out, path);
    }
    const bool traced = std::any_of(summary.runs.begin(), summary.runs.end(),
                                    [](const auto& r) { return !r.record.generation_log.empty(); });
    if (traced) {
        const auto trace_dir = directory / "traces";
        make_directory(trace_dir);
        for (const auto& r : summary.runs) {
            const auto path = trace_dir / fmt::format("rep_{:03}.csv", r.index);
            auto out = open_for_write(path);
            out << "generation,best_fitness,functional_size,mutation_rate\n";
            for (const auto& g : r.record.generation_log) {
                out << fmt::format("{},{},{},{}\n", g.generation, g.best_fitness, g.functional_size, g.mutation_rate);
            }
            close_checked(out, path);
        }
    }
}

void export_sweep(const SweepResult& sweep, const std::filesystem::path& directory)
{
    make_directory(directory);
    {
        const auto path = directory / "sweep.csv";
        auto out = open_for_write(path);
        out << "mutation_rate,lambda,replications,solved,success_fraction,mean_evaluations,median_evaluations\n";
        for (std::size_t r = 0; r < sweep.rates.size(); ++r) {
            for (std::size_t l = 0; l < sweep.lambdas.size(); ++l) {
                const auto& a = sweep.at(r, l).aggregates;
                out << fmt::format("{},{},{},{},{},{},{}\n", sweep.rates[r], sweep.lambdas[l], a.replications,
                                   a.solved, a.success_fraction, a.mean_evaluations, a.median_evaluations);
            }
        }
        close_checked(out, path);
    }
    {
        const auto path = directory / "table.txt";
        auto out = open_for_write(path);
        out << "MutRate";
        for (auto lambda : sweep.lambdas) {
            out << fmt::format("\tlambda={}", lambda);
        }
        out << '\n';
        for (std::size_t r = 0; r < sweep.rates.size(); ++r) {
            out << fmt::format("{}%", sweep.rates[r] * 100.0);
            for (std::size_t l = 0; l < sweep.lambdas.size(); ++l) {
                const auto& a = sweep.at(r, l).aggregates;
                out << fmt::format("\t{:.0f}% ({:.0f})", a.success_fraction * 100.0, a.mean_evaluations);
            }
            out << '\n';
        }
        close_checked(out, path);
    }
}

std::vector<RunRow> read_runs_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError(fmt::format("cannot open {}", path.string()));
    }
    std::string line;
    if (!std::getline(in, line) || line != kRunsHeader) {
        throw IoError(fmt::format("{}: missing or unexpected header", path.string()));
    }
    std::vector<RunRow> rows;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        if (fields.size() != 10) {
            throw IoError(fmt::format("{}:{}: expected 10 fields, got {}", path.string(), number, fields.size()));
        }
        try {
            RunRow row;
            row.replication = std::stoull(fields[0]);
            row.seed = std::stoull(fields[1]);
            row.solved = fields[2] == "1";
            row.evaluations = std::stoull(fields[3]);
            row.generations = std::stoull(fields[4]);
            row.final_fitness = std::strtod(fields[5].c_str(), nullptr);
            row.functional_size = std::stoull(fields[6]);
            row.active_links = std::stoull(fields[7]);
            row.mean_recovery = std::strtod(fields[8].c_str(), nullptr);
            row.unrecovered_epochs = std::stoull(fields[9]);
            rows.push_back(row);
        } catch (const std::exception&) {
            throw IoError(fmt::format("{}:{}: malformed number", path.string(), number));
        }
    }
    return rows;
}

std::vector<double> column_values(std::span<const RunRow> rows, std::string_view column, bool solved_only)
{
    std::vector<double> values;
    for (const auto& r : rows) {
        if (solved_only && !r.solved) {
            continue;
        }
        double v = 0.0;
        if (column == "evaluations") {
            v = static_cast<double>(r.evaluations);
        } else if (column == "generations") {
            v = static_cast<double>(r.generations);
        } else if (column == "final_fitness") {
            v = r.final_fitness;
        } else if (column == "functional_size") {
            v = static_cast<double>(r.functional_size);
        } else if (column == "active_links") {
            v = static_cast<double>(r.active_links);
        } else if (column == "mean_recovery") {
            v = r.mean_recovery;
            if (std::isnan(v)) {
                continue;
            }
        } else {
            throw ConfigError(fmt::format("unknown column '{}'", column));
        }
        values.push_back(v);
    }
    return values;
}

} // namespace plcgp
