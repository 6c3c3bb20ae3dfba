#pragma once

/// @file selection.hpp
/// (1+lambda) evolution strategies for CGP and their variants:
///
///  - ES:     fitness first, offspring preferred over the parent on ties.
///  - ES-PL:  equal-fitness candidates ordered by functional size, larger first.
///  - ES-PLQS: candidates within a relative band of the generation's best
///            fitness are ordered by size before fitness.
///  - -AM:    the mutation rate follows the one-fifth success rule, updated
///            after every offspring evaluation.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "plcgp/genome.hpp"
#include "plcgp/problems.hpp"
#include "plcgp/random.hpp"

namespace plcgp {

struct SelectionPolicy {
    std::size_t lambda{4};
    bool prefer_larger{false};
    /// Relative band around the best fitness; 0 disables quasi-neutral ordering.
    double quasi_band{0.0};
    bool adaptive_mutation{false};
    double initial_mutation_rate{0.02};
    double min_mutation_rate{0.0005};
    double max_mutation_rate{0.25};

    [[nodiscard]] bool quasi_neutral() const noexcept { return quasi_band > 0.0; }

    /// Throws ConfigError on lambda = 0, a band outside [0,1) or inconsistent rates.
    void validate() const;

    /// "ES", "ES-PL", "ES-PLQS", each optionally suffixed with "-AM".
    [[nodiscard]] std::string name() const;

    bool operator==(const SelectionPolicy&) const = default;
};

/// Origin of the parent; sorts after every offspring index.
inline constexpr std::size_t kParentOrigin = std::numeric_limits<std::size_t>::max();

struct Candidate {
    Chromosome chromosome;
    Phenotype phenotype;
    Fitness fitness;
    /// Offspring index within the generation, or kParentOrigin.
    std::size_t origin{kParentOrigin};

    [[nodiscard]] bool is_parent() const noexcept { return origin == kParentOrigin; }
};

/// |f - best| <= band * |best|; exact equality always qualifies.
bool in_quasi_band(const Fitness& fitness, const Fitness& best, double band) noexcept;

/// Sort order of the 1+lambda candidates; `less` means `a` is preferred.
/// `best` is the best fitness among the candidates being compared and only
/// matters for quasi-neutral policies.
std::weak_ordering candidate_order(const Candidate& a, const Candidate& b, const SelectionPolicy& policy,
                                   const Fitness& best);

/// Minimum of candidate_order over parent and offspring.
const Candidate& select_survivor(const Candidate& parent, std::span<const Candidate> offspring,
                                 const SelectionPolicy& policy);

inline constexpr double kRateIncrease = 1.4;

/// One-fifth success rule: x1.4 when the offspring is at least as good as the
/// parent, x1.4^(-1/4) otherwise, clamped to [min_rate, max_rate].
double update_mutation_rate(double rate, const Fitness& offspring, const Fitness& parent, double min_rate,
                            double max_rate);

struct GenerationLog {
    std::uint64_t generation{};
    double best_fitness{};
    std::size_t functional_size{};
    double mutation_rate{};
};

/// Recovery time recorded for an epoch in which the optimum was never reached.
inline constexpr std::int64_t kNotRecovered = -1;

struct RunRecord {
    std::uint64_t evaluations_used{};
    std::uint64_t generations_used{};
    /// Best fitness observed. For quasi-neutral policies the final parent can be
    /// worse than this, so both are kept.
    Fitness best_fitness;
    bool solved{false};
    /// Chromosome that achieved best_fitness.
    Chromosome final_chromosome;
    Chromosome final_parent;
    std::size_t functional_size{};
    std::size_t active_links{};
    /// Rate at the end of every generation. Only recorded under adaptive
    /// mutation or when requested; otherwise the rate is the policy's constant.
    std::vector<double> mutation_rate_trace;
    /// Dynamic runs: generations from each epoch's start until the optimum was
    /// (re)attained, or kNotRecovered. Entry 0 is the initial solve.
    std::vector<std::int64_t> recovery_times;
    std::vector<GenerationLog> generation_log;
};

struct RunOptions {
    bool record_rate_trace{false};
    bool record_generation_log{false};
};

/// Evolves from a random parent until an optimal candidate is found or no full
/// generation fits in `budget` evaluations. Throws ConfigError if budget < lambda.
RunRecord evolve(const Problem& problem, const GenomeSpec& spec, const SelectionPolicy& policy,
                 std::uint64_t budget, Rng& rng, const RunOptions& options = {});

/// Runs `epochs * epoch_length` generations on a boolean problem, flipping
/// `k_flips` targets at every epoch boundary after the first and re-evaluating
/// the parent (one evaluation). k_flips = 0 leaves the targets unchanged.
RunRecord evolve_dynamic(const Problem& problem, const GenomeSpec& spec, const SelectionPolicy& policy,
                         std::size_t epochs, std::uint64_t epoch_length, std::size_t k_flips, Rng& rng,
                         const RunOptions& options = {});

} // namespace plcgp
