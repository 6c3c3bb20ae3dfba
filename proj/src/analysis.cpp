#include "plcgp/analysis.hpp"

#include <stdexcept>
#include <unordered_set>

#include "plcgp/error.hpp"
#include "plcgp/exec.hpp"

namespace plcgp {

bool functional_change(const Chromosome& parent, const Phenotype& parent_phenotype, const Chromosome& mutant,
                       const Phenotype& mutant_phenotype) noexcept
{
    if (parent_phenotype.active_nodes != mutant_phenotype.active_nodes) {
        return true;
    }
    const auto& spec = parent.spec();
    for (auto node : parent_phenotype.active_nodes) {
        if (parent.function(node) != mutant.function(node)) {
            return true;
        }
        for (std::size_t slot = 0; slot < spec.node_arity; ++slot) {
            if (parent.input(node, slot) != mutant.input(node, slot)) {
                return true;
            }
        }
    }
    for (std::size_t o = 0; o < spec.num_outputs; ++o) {
        if (parent.output(o) != mutant.output(o)) {
            return true;
        }
    }
    return false;
}

RobustnessReport robustness_probe(const Chromosome& chromosome, const Problem& problem, double rate,
                                  std::size_t samples, Rng& rng)
{
    if (samples == 0) {
        throw ConfigError("robustness probe needs at least one sample");
    }
    const auto phenotype = decode(chromosome);
    const auto table = evaluate_all(chromosome, phenotype, problem.patterns());
    const auto fitness = problem.fitness(table);

    std::size_t preserved = 0;
    std::size_t changed = 0;
    std::size_t changed_preserved = 0;
    std::size_t behaved = 0;
    std::size_t behaved_preserved = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto mutant = mutate(chromosome, rate, rng);
        const auto mutant_phenotype = decode(mutant);
        const auto mutant_table = evaluate_all(mutant, mutant_phenotype, problem.patterns());
        const bool same = problem.fitness(mutant_table) == fitness;
        preserved += same ? 1 : 0;
        if (functional_change(chromosome, phenotype, mutant, mutant_phenotype)) {
            ++changed;
            changed_preserved += same ? 1 : 0;
        }
        if (!(mutant_table == table)) {
            ++behaved;
            behaved_preserved += same ? 1 : 0;
        }
    }

    const auto ratio = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    RobustnessReport report;
    report.samples = samples;
    report.fitness_preserved_fraction = ratio(preserved, samples);
    report.functional_change_fraction = ratio(changed, samples);
    report.preserved_given_functional_change = ratio(changed_preserved, changed);
    report.functional_change_samples = changed;
    report.behavioral_change_fraction = ratio(behaved, samples);
    report.preserved_given_behavioral_change = ratio(behaved_preserved, behaved);
    return report;
}

VariabilityReport variability_walk(const Chromosome& chromosome, const Problem& problem, std::size_t steps,
                                   Rng& rng)
{
    if (steps == 0) {
        throw ConfigError("random walk needs at least one step");
    }
    auto state = chromosome;
    auto table = evaluate_all(state, problem.patterns());
    const auto walk_fitness = problem.fitness(table);

    std::unordered_set<OutputTable, OutputTableHash> seen;
    seen.insert(std::move(table));

    VariabilityReport report;
    report.steps = steps;
    std::uniform_int_distribution<std::size_t> pick(0, state.size() - 1);
    for (std::size_t s = 0; s < steps; ++s) {
        const auto position = pick(rng);
        std::uniform_int_distribution<Gene> value(0, gene_bound(state.spec(), position) - 1);
        auto mutant = state.with_gene(position, value(rng));
        auto mutant_table = evaluate_all(mutant, problem.patterns());
        const auto mutant_fitness = problem.fitness(mutant_table);
        if (seen.insert(std::move(mutant_table)).second) {
            ++report.unique_behaviors;
        }
        if (mutant_fitness == walk_fitness) {
            state = std::move(mutant);
            ++report.accepted_steps;
            if (!(problem.evaluate(state) == walk_fitness)) {
                throw std::logic_error("random walk fitness drifted");
            }
        }
    }
    return report;
}

std::pair<std::size_t, std::size_t> size_report(const Chromosome& chromosome)
{
    const auto phenotype = decode(chromosome);
    return {phenotype.functional_size, phenotype.active_links};
}

} // namespace plcgp
