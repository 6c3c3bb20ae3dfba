#pragma once

/// @file analysis.hpp
/// Post-hoc instruments on evolved chromosomes: mutational robustness,
/// function-preserving random walks, and size measures.

#include <cstddef>
#include <utility>

#include "plcgp/genome.hpp"
#include "plcgp/problems.hpp"
#include "plcgp/random.hpp"

namespace plcgp {

struct RobustnessReport {
    std::size_t samples{};
    double fitness_preserved_fraction{};
    /// Mutants whose active subgraph differs structurally (active node set or
    /// any active gene).
    double functional_change_fraction{};
    /// Among structurally changed mutants; 0 when there were none.
    double preserved_given_functional_change{};
    std::size_t functional_change_samples{};
    /// Mutants whose output table differs from the parent's.
    double behavioral_change_fraction{};
    /// Among behaviorally changed mutants; 0 when there were none.
    double preserved_given_behavioral_change{};
};

/// Samples `samples` independent mutants produced by mutate() at `rate`.
/// Throws ConfigError when samples == 0.
RobustnessReport robustness_probe(const Chromosome& chromosome, const Problem& problem, double rate,
                                  std::size_t samples, Rng& rng);

/// True if the active subgraphs differ: a different active node set, a
/// different gene on a shared active node, or a different output gene.
bool functional_change(const Chromosome& parent, const Phenotype& parent_phenotype, const Chromosome& mutant,
                       const Phenotype& mutant_phenotype) noexcept;

struct VariabilityReport {
    std::size_t steps{};
    std::size_t unique_behaviors{};
    std::size_t accepted_steps{};
};

/// Function-preserving random walk. Each step redraws one uniformly chosen
/// gene; a mutant whose output table was never seen before in the walk
/// (including the start) counts as a new behavior, and the step is kept iff
/// the mutant's fitness equals the walk's fitness. Throws ConfigError when
/// steps == 0 and std::logic_error if the walk's fitness ever drifts.
VariabilityReport variability_walk(const Chromosome& chromosome, const Problem& problem, std::size_t steps,
                                   Rng& rng);

/// (functional_size, active_links)
std::pair<std::size_t, std::size_t> size_report(const Chromosome& chromosome);

} // namespace plcgp
