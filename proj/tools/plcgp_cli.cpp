// Command-line driver: run, sweep, dynamic, analyze, stats.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "plcgp/analysis.hpp"
#include "plcgp/config.hpp"
#include "plcgp/error.hpp"
#include "plcgp/harness.hpp"
#include "plcgp/stats.hpp"

namespace {

using namespace plcgp;

// Flags shared by the experiment subcommands; unset flags keep the config-file value.
struct ExperimentFlags {
    std::string config_file;
    std::string output_dir;
    std::string problem;
    std::optional<std::size_t> bits;
    std::optional<std::size_t> nodes;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> budget;
    std::optional<std::size_t> lambda;
    std::optional<double> mut_rate;
    std::optional<double> quasi_band;
    std::optional<std::size_t> workers;
    std::string sampling;
    bool pl{false};
    bool am{false};
    bool traces{false};
    std::vector<std::string> sets;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("-c,--config", config_file, "Configuration file (key = value)");
        cmd->add_option("-o,--out", output_dir, "Output directory");
        cmd->add_option("--problem", problem, "parity | dynamic | pagie");
        cmd->add_option("--bits", bits, "Parity bits");
        cmd->add_option("--nodes", nodes, "Nodes per chromosome");
        cmd->add_option("--seed", seed, "Base seed");
        cmd->add_option("--reps", reps, "Replications");
        cmd->add_option("--budget", budget, "Evaluation budget per replication");
        cmd->add_option("--lambda", lambda, "Offspring per generation");
        cmd->add_option("--mut-rate", mut_rate, "(Initial) mutation rate");
        cmd->add_option("--quasi-band", quasi_band, "Relative quasi-neutral band (0 disables)");
        cmd->add_option("--workers", workers, "Worker threads (0 = all cores)");
        cmd->add_option("--sampling", sampling, "Pagie sampling: random | grid");
        cmd->add_flag("--pl", pl, "Prefer larger functional circuits among ties");
        cmd->add_flag("--am", am, "Adapt the mutation rate with the one-fifth rule");
        cmd->add_flag("--traces", traces, "Write per-generation traces");
        cmd->add_option("--set", sets, "Extra key=value override (repeatable)");
    }

    ExperimentConfig build() const
    {
        ExperimentConfig c = config_file.empty() ? ExperimentConfig{} : load_config(config_file);
        const auto set = [&c](std::string_view key, const std::string& value) { apply_key_value(c, key, value); };
        if (!problem.empty()) set("problem.kind", problem);
        if (bits) c.problem.parity_bits = *bits;
        if (nodes) c.num_nodes = *nodes;
        if (seed) c.base_seed = *seed;
        if (reps) c.replications = *reps;
        if (budget) c.budget = *budget;
        if (lambda) c.policy.lambda = *lambda;
        if (mut_rate) c.policy.initial_mutation_rate = *mut_rate;
        if (quasi_band) c.policy.quasi_band = *quasi_band;
        if (workers) c.workers = *workers;
        if (!sampling.empty()) set("problem.sampling", sampling);
        if (pl) c.policy.prefer_larger = true;
        if (am) c.policy.adaptive_mutation = true;
        if (traces) c.record_traces = true;
        if (c.policy.quasi_neutral()) c.policy.prefer_larger = true;
        if (!output_dir.empty()) c.output_dir = output_dir;
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(fmt::format("--set expects key=value, got '{}'", kv));
            }
            apply_key_value(c, kv.substr(0, eq), kv.substr(eq + 1));
        }
        return c;
    }
};

void print_summary(const ExperimentSummary& s)
{
    const auto& a = s.aggregates;
    fmt::print("{} {}: solved {}/{} ({:.0f}%), mean evaluations {:.0f} (median {:.0f}), mean generations {:.0f}, "
               "mean final fitness {:.6g}, mean functional size {:.1f}\n",
               s.config.policy.name(), to_string(s.config.problem.kind), a.solved, a.replications,
               a.success_fraction * 100.0, a.mean_evaluations, a.median_evaluations, a.mean_generations,
               a.mean_final_fitness, a.mean_functional_size);
    if (s.config.problem.kind == ProblemKind::dynamic) {
        fmt::print("mean recovery {:.1f} generations, {} unrecovered epochs\n", a.mean_recovery,
                   a.unrecovered_epochs);
    }
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        values.push_back(std::stod(item));
    }
    return values;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cartesian genetic programming with preferential selection of larger solutions"};
    app.require_subcommand(1);

    ExperimentFlags run_flags;
    auto* run = app.add_subcommand("run", "Run one replicated experiment");
    run_flags.attach(run);

    ExperimentFlags sweep_flags;
    std::string lambdas_text = "1,4,7,9,19,49";
    std::string rates_text = "0.01,0.02,0.04";
    auto* sweep = app.add_subcommand("sweep", "Sweep lambda x mutation rate");
    sweep_flags.attach(sweep);
    sweep->add_option("--lambdas", lambdas_text, "Comma-separated lambda values");
    sweep->add_option("--rates", rates_text, "Comma-separated mutation rates");

    ExperimentFlags dyn_flags;
    std::optional<std::size_t> epochs;
    std::optional<std::uint64_t> epoch_length;
    std::optional<std::size_t> flips;
    std::optional<std::size_t> dyn_inputs;
    auto* dynamic = app.add_subcommand("dynamic", "Dynamic classification schedule");
    dyn_flags.attach(dynamic);
    dynamic->add_option("--epochs", epochs, "Number of epochs");
    dynamic->add_option("--epoch-length", epoch_length, "Generations per epoch");
    dynamic->add_option("--flips", flips, "Targets flipped at each epoch boundary");
    dynamic->add_option("--inputs", dyn_inputs, "Number of inputs");

    std::vector<std::string> chromosome_files;
    std::uint64_t analyze_seed = 1;
    double probe_rate = 0.02;
    std::size_t probe_samples = 100'000;
    std::size_t walk_steps = 2'000;
    std::string analyze_problem = "parity";
    std::string analyze_sampling = "random";
    std::uint64_t dataset_seed = 1;
    auto* analyze = app.add_subcommand("analyze", "Robustness and variability of saved chromosomes");
    analyze->add_option("files", chromosome_files, "Chromosome files (one record per line)")->required();
    analyze->add_option("--seed", analyze_seed, "Probe seed");
    analyze->add_option("--mut-rate", probe_rate, "Mutation rate of the robustness probe");
    analyze->add_option("--samples", probe_samples, "Mutants per robustness probe");
    analyze->add_option("--steps", walk_steps, "Random-walk steps");
    analyze->add_option("--problem", analyze_problem, "parity (bits = chromosome inputs) | pagie");
    analyze->add_option("--sampling", analyze_sampling, "Pagie sampling: random | grid");
    analyze->add_option("--dataset-seed", dataset_seed, "Seed of the Pagie dataset");

    std::string stats_a;
    std::string stats_b;
    std::string stats_column = "evaluations";
    bool stats_solved_only = false;
    auto* stats = app.add_subcommand("stats", "Mann-Whitney U test on two runs.csv files");
    stats->add_option("a", stats_a, "First runs.csv")->required();
    stats->add_option("b", stats_b, "Second runs.csv")->required();
    stats->add_option("--column", stats_column, "Column to compare");
    stats->add_flag("--solved-only", stats_solved_only, "Use solved replications only");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            print_summary(run_replications(run_flags.build()));
        } else if (sweep->parsed()) {
            const auto config = sweep_flags.build();
            std::vector<std::size_t> lambdas;
            for (auto v : parse_list(lambdas_text)) {
                lambdas.push_back(static_cast<std::size_t>(v));
            }
            const auto rates = parse_list(rates_text);
            const auto result = sweep_grid(config, lambdas, rates);
            for (const auto& cell : result.cells) {
                fmt::print("rate {} lambda {}: ", cell.config.policy.initial_mutation_rate, cell.config.policy.lambda);
                print_summary(cell);
            }
        } else if (dynamic->parsed()) {
            auto config = dyn_flags.build();
            config.problem.kind = ProblemKind::dynamic;
            if (epochs) config.problem.epochs = *epochs;
            if (epoch_length) config.problem.epoch_length = *epoch_length;
            if (flips) config.problem.flips = *flips;
            if (dyn_inputs) config.problem.dynamic_inputs = *dyn_inputs;
            print_summary(run_replications(config));
        } else if (analyze->parsed()) {
            fmt::print("file,index,seed,functional_size,active_links,fitness,fitness_preserved,functional_change,"
                       "preserved_given_functional_change,behavioral_change,unique_behaviors,accepted_steps\n");
            for (const auto& file : chromosome_files) {
                std::ifstream in(file);
                if (!in) {
                    throw IoError(fmt::format("cannot open {}", file));
                }
                const auto chromosomes = read_chromosomes(in);
                for (std::size_t i = 0; i < chromosomes.size(); ++i) {
                    const auto& c = chromosomes[i];
                    Rng data_rng(dataset_seed);
                    const auto problem = analyze_problem == "pagie"
                                             ? Problem::pagie(data_rng, parse_sampling_mode(analyze_sampling))
                                             : Problem::parity(c.spec().num_inputs);
                    if (problem.genome_spec(c.spec().num_nodes) != c.spec()) {
                        throw ConfigError(fmt::format("{}:{}: chromosome does not fit the {} problem", file, i + 1,
                                                      analyze_problem));
                    }
                    Rng rng(replication_seed(analyze_seed, i));
                    const auto robust = robustness_probe(c, problem, probe_rate, probe_samples, rng);
                    const auto walk = variability_walk(c, problem, walk_steps, rng);
                    const auto [size, links] = size_report(c);
                    fmt::print("{},{},{},{},{},{},{},{},{},{},{},{}\n", file, i, analyze_seed, size, links,
                               problem.evaluate(c).value, robust.fitness_preserved_fraction,
                               robust.functional_change_fraction, robust.preserved_given_functional_change,
                               robust.behavioral_change_fraction, walk.unique_behaviors, walk.accepted_steps);
                }
            }
        } else if (stats->parsed()) {
            const auto rows_a = read_runs_csv(stats_a);
            const auto rows_b = read_runs_csv(stats_b);
            const auto a = column_values(rows_a, stats_column, stats_solved_only);
            const auto b = column_values(rows_b, stats_column, stats_solved_only);
            const auto result = mann_whitney_u(a, b);
            fmt::print("column={} n_a={} n_b={} median_a={} median_b={} U={} p={} ({})\n", stats_column, a.size(),
                       b.size(), median(a), median(b), result.u, result.p, result.exact ? "exact" : "normal");
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return EXIT_SUCCESS;
}
