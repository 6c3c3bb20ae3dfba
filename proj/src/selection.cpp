#include "plcgp/selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "plcgp/error.hpp"

namespace plcgp {

void SelectionPolicy::validate() const
{
    if (lambda == 0) {
        throw ConfigError("lambda must be at least 1");
    }
    if (!(quasi_band >= 0.0 && quasi_band < 1.0)) {
        throw ConfigError(fmt::format("quasi-neutral band must lie in [0, 1), got {}", quasi_band));
    }
    if (!(min_mutation_rate > 0.0 && min_mutation_rate <= initial_mutation_rate &&
          initial_mutation_rate <= max_mutation_rate && max_mutation_rate <= 1.0)) {
        throw ConfigError(fmt::format("mutation rates must satisfy 0 < min <= initial <= max <= 1 (got {} / {} / {})",
                                      min_mutation_rate, initial_mutation_rate, max_mutation_rate));
    }
}

std::string SelectionPolicy::name() const
{
    std::string n = "ES";
    if (quasi_neutral()) {
        n += "-PLQS";
    } else if (prefer_larger) {
        n += "-PL";
    }
    if (adaptive_mutation) {
        n += "-AM";
    }
    return n;
}

bool in_quasi_band(const Fitness& fitness, const Fitness& best, double band) noexcept
{
    if (fitness.value == best.value) {
        return true;
    }
    return std::abs(fitness.value - best.value) <= band * std::abs(best.value);
}

namespace {
    std::weak_ordering compare_fitness(const Fitness& a, const Fitness& b) noexcept
    {
        if (a.better_than(b)) {
            return std::weak_ordering::less;
        }
        if (b.better_than(a)) {
            return std::weak_ordering::greater;
        }
        return std::weak_ordering::equivalent;
    }

    // Larger sizes sort first.
    std::weak_ordering compare_size(std::size_t a, std::size_t b) noexcept
    {
        return b <=> a;
    }

    const Fitness& best_of(const Candidate& parent, std::span<const Candidate> offspring) noexcept
    {
        const Fitness* best = &parent.fitness;
        for (const auto& c : offspring) {
            if (c.fitness.better_than(*best)) {
                best = &c.fitness;
            }
        }
        return *best;
    }

    // Index into offspring, or offspring.size() for the parent.
    std::size_t survivor_index(const Candidate& parent, std::span<const Candidate> offspring,
                               const SelectionPolicy& policy)
    {
        const auto& best = best_of(parent, offspring);
        const Candidate* winner = &parent;
        std::size_t index = offspring.size();
        for (std::size_t i = 0; i < offspring.size(); ++i) {
            if (candidate_order(offspring[i], *winner, policy, best) < 0) {
                winner = &offspring[i];
                index = i;
            }
        }
        return index;
    }
} // namespace

std::weak_ordering candidate_order(const Candidate& a, const Candidate& b, const SelectionPolicy& policy,
                                   const Fitness& best)
{
    if (a.fitness.direction != b.fitness.direction) {
        throw std::logic_error("comparing fitness values of different directions");
    }
    const auto size_a = a.phenotype.functional_size;
    const auto size_b = b.phenotype.functional_size;

    if (policy.quasi_neutral()) {
        const bool band_a = in_quasi_band(a.fitness, best, policy.quasi_band);
        const bool band_b = in_quasi_band(b.fitness, best, policy.quasi_band);
        if (band_a != band_b) {
            return band_a ? std::weak_ordering::less : std::weak_ordering::greater;
        }
        if (auto c = compare_size(size_a, size_b); c != 0) {
            return c;
        }
        if (auto c = compare_fitness(a.fitness, b.fitness); c != 0) {
            return c;
        }
        return a.origin <=> b.origin;
    }

    if (auto c = compare_fitness(a.fitness, b.fitness); c != 0) {
        return c;
    }
    if (policy.prefer_larger) {
        if (auto c = compare_size(size_a, size_b); c != 0) {
            return c;
        }
    }
    return a.origin <=> b.origin;
}

const Candidate& select_survivor(const Candidate& parent, std::span<const Candidate> offspring,
                                 const SelectionPolicy& policy)
{
    if (offspring.size() != policy.lambda) {
        throw std::logic_error(fmt::format("expected {} offspring, got {}", policy.lambda, offspring.size()));
    }
    const auto i = survivor_index(parent, offspring, policy);
    return i == offspring.size() ? parent : offspring[i];
}

double update_mutation_rate(double rate, const Fitness& offspring, const Fitness& parent, double min_rate,
                            double max_rate)
{
    static const double decrease = std::pow(kRateIncrease, -0.25);
    const double next = offspring.at_least_as_good_as(parent) ? rate * kRateIncrease : rate * decrease;
    return std::clamp(next, min_rate, max_rate);
}

namespace {

    class Engine {
    public:
        Engine(const Problem& problem, const GenomeSpec& spec, const SelectionPolicy& policy, Rng& rng,
               const RunOptions& options)
            : policy_(policy), rng_(rng), options_(options), rate_(policy.initial_mutation_rate)
        {
            auto chromosome = random_chromosome(spec, rng_);
            parent_.phenotype = decode(chromosome);
            parent_.fitness = problem.evaluate(chromosome, parent_.phenotype);
            parent_.chromosome = std::move(chromosome);
            parent_.origin = kParentOrigin;
            evaluations_ = 1;
            elite_ = parent_.chromosome;
            elite_fitness_ = parent_.fitness;
            offspring_.reserve(policy.lambda);
        }

        /// One generation; returns the best fitness among parent and offspring.
        Fitness step(const Problem& problem)
        {
            offspring_.clear();
            for (std::size_t i = 0; i < policy_.lambda; ++i) {
                auto mutation = mutate_tracked(parent_.chromosome, rate_, rng_);
                Candidate child;
                if (changes_active_genes(parent_.chromosome, parent_.phenotype, mutation.child, mutation.positions)) {
                    child.phenotype = decode(mutation.child);
                    child.fitness = problem.evaluate(mutation.child, child.phenotype);
                } else {
                    // Only inactive genes moved: same program, same fitness.
                    child.phenotype = parent_.phenotype;
                    child.fitness = parent_.fitness;
                }
                child.chromosome = std::move(mutation.child);
                child.origin = i;
                ++evaluations_;
                if (policy_.adaptive_mutation) {
                    rate_ = update_mutation_rate(rate_, child.fitness, parent_.fitness, policy_.min_mutation_rate,
                                                 policy_.max_mutation_rate);
                }
                offspring_.push_back(std::move(child));
            }
            ++generations_;

            const auto best = best_of(parent_, offspring_);
            const auto index = survivor_index(parent_, offspring_, policy_);
            const auto& survivor = index == offspring_.size() ? parent_ : offspring_[index];
            if (policy_.quasi_neutral()) {
                if (!in_quasi_band(survivor.fitness, best, policy_.quasi_band)) {
                    throw std::logic_error("survivor left the quasi-neutral band");
                }
            } else if (parent_.fitness.better_than(survivor.fitness)) {
                throw std::logic_error("survivor is worse than its parent");
            }

            if (best.better_than(elite_fitness_)) {
                const Candidate* holder = &parent_;
                for (const auto& c : offspring_) {
                    if (c.fitness == best) {
                        holder = &c;
                        break;
                    }
                }
                elite_ = holder->chromosome;
                elite_fitness_ = best;
            }

            if (index != offspring_.size()) {
                parent_ = std::move(offspring_[index]);
                parent_.origin = kParentOrigin;
            }

            if (options_.record_rate_trace || policy_.adaptive_mutation) {
                rate_trace_.push_back(rate_);
            }
            if (options_.record_generation_log) {
                log_.push_back({generations_, best.value, parent_.phenotype.functional_size, rate_});
            }
            return best;
        }

        /// Parent re-evaluation after the targets changed.
        void reevaluate(const Problem& problem)
        {
            parent_.fitness = problem.evaluate(parent_.chromosome, parent_.phenotype);
            ++evaluations_;
            elite_ = parent_.chromosome;
            elite_fitness_ = parent_.fitness;
        }

        [[nodiscard]] const Candidate& parent() const noexcept { return parent_; }
        [[nodiscard]] std::uint64_t evaluations() const noexcept { return evaluations_; }

        RunRecord finish(bool solved)
        {
            RunRecord record;
            record.evaluations_used = evaluations_;
            record.generations_used = generations_;
            record.best_fitness = elite_fitness_;
            record.solved = solved;
            const auto phenotype = decode(elite_);
            record.functional_size = phenotype.functional_size;
            record.active_links = phenotype.active_links;
            record.final_chromosome = std::move(elite_);
            record.final_parent = parent_.chromosome;
            record.mutation_rate_trace = std::move(rate_trace_);
            record.generation_log = std::move(log_);
            return record;
        }

    private:
        const SelectionPolicy& policy_;
        Rng& rng_;
        const RunOptions& options_;
        double rate_;
        Candidate parent_;
        std::vector<Candidate> offspring_;
        Chromosome elite_;
        Fitness elite_fitness_;
        std::uint64_t evaluations_{};
        std::uint64_t generations_{};
        std::vector<double> rate_trace_;
        std::vector<GenerationLog> log_;
    };

    void check_spec(const Problem& problem, const GenomeSpec& spec)
    {
        spec.validate();
        if (spec.num_inputs != problem.num_inputs() || spec.num_outputs != problem.num_outputs() ||
            spec.function_set != problem.function_set()) {
            throw ConfigError("genome spec does not match the problem's arity or function set");
        }
    }

} // namespace

RunRecord evolve(const Problem& problem, const GenomeSpec& spec, const SelectionPolicy& policy,
                 std::uint64_t budget, Rng& rng, const RunOptions& options)
{
    policy.validate();
    check_spec(problem, spec);
    if (budget < policy.lambda) {
        throw ConfigError(fmt::format("budget {} is smaller than lambda {}", budget, policy.lambda));
    }

    Engine engine(problem, spec, policy, rng, options);
    if (problem.is_optimal(engine.parent().fitness)) {
        return engine.finish(true);
    }
    while (engine.evaluations() + policy.lambda <= budget) {
        if (problem.is_optimal(engine.step(problem))) {
            return engine.finish(true);
        }
    }
    return engine.finish(false);
}

RunRecord evolve_dynamic(const Problem& problem, const GenomeSpec& spec, const SelectionPolicy& policy,
                         std::size_t epochs, std::uint64_t epoch_length, std::size_t k_flips, Rng& rng,
                         const RunOptions& options)
{
    policy.validate();
    check_spec(problem, spec);
    if (problem.targets() == nullptr) {
        throw ConfigError("dynamic evolution needs a boolean problem");
    }
    if (epochs == 0 || epoch_length == 0) {
        throw ConfigError("dynamic evolution needs at least one epoch of at least one generation");
    }
    if (k_flips > problem.targets()->size()) {
        throw ConfigError(fmt::format("cannot flip {} of {} targets", k_flips, problem.targets()->size()));
    }

    auto current = problem;
    Engine engine(current, spec, policy, rng, options);
    std::vector<std::int64_t> recovery;
    recovery.reserve(epochs);

    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        if (epoch > 0) {
            if (k_flips > 0) {
                current = current.with_targets(perturb_targets(*current.targets(), k_flips, rng));
            }
            engine.reevaluate(current);
        }
        std::int64_t time = current.is_optimal(engine.parent().fitness) ? 0 : kNotRecovered;
        for (std::uint64_t g = 1; g <= epoch_length; ++g) {
            const auto best = engine.step(current);
            if (time == kNotRecovered && current.is_optimal(best)) {
                time = static_cast<std::int64_t>(g);
            }
        }
        recovery.push_back(time);
    }

    const bool all_recovered = std::none_of(recovery.begin(), recovery.end(),
                                            [](std::int64_t t) { return t == kNotRecovered; });
    auto record = engine.finish(all_recovered);
    record.recovery_times = std::move(recovery);
    return record;
}

} // namespace plcgp
