#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "plcgp/analysis.hpp"
#include "plcgp/error.hpp"

using namespace plcgp;

TEST_CASE("size report")
{
    CHECK(size_report(oracle::xor_chromosome(1)) == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK(size_report(oracle::xor_chromosome()) == std::pair<std::size_t, std::size_t>{3, 6});
}

TEST_CASE("functional change")
{
    const auto c = oracle::xor_chromosome(2); // only n0 active
    const auto p = decode(c);
    const auto inactive = c.with_gene(3, 0); // n1's function
    CHECK_FALSE(functional_change(c, p, inactive, decode(inactive)));
    const auto active_fn = c.with_gene(0, 0);
    CHECK(functional_change(c, p, active_fn, decode(active_fn)));
    const auto rewired = c.with_gene(9, 3);
    CHECK(functional_change(c, p, rewired, decode(rewired)));
    const auto same_value = c.with_gene(9, 2);
    CHECK_FALSE(functional_change(c, p, same_value, decode(same_value)));
}

TEST_CASE("robustness probe matches exhaustive single-gene enumeration")
{
    // 2 inputs, 5 nodes: 16 genes, so rate 0.01 redraws exactly one gene.
    Rng rng(61);
    const auto problem = Problem::parity(2);
    const auto spec = problem.genome_spec(5);
    for (int trial = 0; trial < 5; ++trial) {
        const auto c = random_chromosome(spec, rng);
        const auto exact = oracle::enumerate_one_gene(c, problem);
        const std::size_t n = 20'000;
        const auto report = robustness_probe(c, problem, 0.01, n, rng);
        const auto within = [n](double estimate, double p) {
            const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
            return std::fabs(estimate - p) <= 3.0 * sigma + 1e-12;
        };
        CHECK(within(report.fitness_preserved_fraction, exact.preserved_probability));
        CHECK(within(report.functional_change_fraction, exact.functional_change_probability));
        CHECK(report.samples == n);
        CHECK(report.behavioral_change_fraction <= report.functional_change_fraction + 1e-12);
    }
}

TEST_CASE("robustness probe edge cases")
{
    Rng rng(2);
    const auto problem = Problem::parity(2);
    const auto c = oracle::xor_chromosome();
    CHECK_THROWS_AS(robustness_probe(c, problem, 0.02, 0, rng), ConfigError);
    // Every mutation at rate 1 redraws all genes; fractions stay within [0, 1].
    const auto r = robustness_probe(c, problem, 1.0, 500, rng);
    CHECK(r.fitness_preserved_fraction >= 0.0);
    CHECK(r.fitness_preserved_fraction <= 1.0);
    CHECK(r.functional_change_samples <= 500);
}

TEST_CASE("mutations of inactive genes always preserve fitness")
{
    Rng rng(19);
    const auto problem = Problem::parity(4);
    const auto spec = problem.genome_spec(30);
    for (int trial = 0; trial < 100; ++trial) {
        const auto c = random_chromosome(spec, rng);
        const auto p = decode(c);
        const auto base = problem.evaluate(c);
        for (std::size_t pos = 0; pos < spec.gene_count(); ++pos) {
            if (is_active_gene(p, spec, pos)) continue;
            const auto m = c.with_gene(pos, static_cast<Gene>(rng() % gene_bound(spec, pos)));
            CHECK(problem.evaluate(m) == base);
            CHECK_FALSE(functional_change(c, p, m, decode(m)));
        }
    }
}

TEST_CASE("variability walk")
{
    Rng rng(5);
    const auto problem = Problem::parity(2);
    const auto spec = problem.genome_spec(10);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = random_chromosome(spec, rng);
        const auto report = variability_walk(c, problem, 2'000, rng);
        CHECK(report.steps == 2'000);
        CHECK(report.unique_behaviors <= 15); // 16 tables minus the start
        CHECK(report.accepted_steps <= report.steps);
    }
    CHECK_THROWS_AS(variability_walk(oracle::xor_chromosome(), problem, 0, rng), ConfigError);
}

TEST_CASE("walk novelty is monotone in the number of steps")
{
    const auto problem = Problem::parity(3);
    Rng seed_rng(8);
    const auto c = random_chromosome(problem.genome_spec(20), seed_rng);
    std::size_t previous = 0;
    for (std::size_t steps : {1, 10, 100, 500, 2'000}) {
        Rng rng(99);
        const auto r = variability_walk(c, problem, steps, rng);
        CHECK(r.unique_behaviors >= previous);
        previous = r.unique_behaviors;
    }
}

TEST_CASE("walk on a regression problem keeps its fitness")
{
    Rng data(4);
    const auto problem = Problem::pagie(data, SamplingMode::grid);
    Rng rng(6);
    const auto c = random_chromosome(problem.genome_spec(20), rng);
    const auto r = variability_walk(c, problem, 300, rng);
    CHECK(r.steps == 300);
    CHECK(r.unique_behaviors <= 300);
}
