#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "plcgp/error.hpp"
#include "plcgp/genome.hpp"

using namespace plcgp;

namespace {
GenomeSpec parity_spec(std::size_t nodes = 100)
{
    return {6, nodes, 1, FunctionSetId::boolean, 2};
}
} // namespace

TEST_CASE("gene counts and legal ranges")
{
    CHECK(parity_spec().gene_count() == 301);

    const GenomeSpec tiny{1, 1, 1, FunctionSetId::boolean, 2};
    CHECK(gene_bound(tiny, 0) == 4);
    CHECK(gene_bound(tiny, 1) == 1);
    CHECK(gene_bound(tiny, 2) == 1);
    CHECK(gene_bound(tiny, 3) == 2);
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto c = random_chromosome(tiny, rng);
        CHECK(c.function(0) < 4);
        CHECK(c.input(0, 0) == 0);
        CHECK(c.input(0, 1) == 0);
        CHECK(c.output(0) < 2);
    }
}

TEST_CASE("random chromosomes respect the feed-forward bound")
{
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const GenomeSpec spec{1 + static_cast<std::size_t>(trial % 5), 1 + static_cast<std::size_t>(trial % 17),
                              1 + static_cast<std::size_t>(trial % 3), FunctionSetId::real, 2};
        const auto c = random_chromosome(spec, rng);
        for (std::size_t node = 0; node < spec.num_nodes; ++node) {
            CHECK(c.input(node, 0) < spec.num_inputs + node);
            CHECK(c.input(node, 1) < spec.num_inputs + node);
        }
        for (std::size_t o = 0; o < spec.num_outputs; ++o) {
            CHECK(c.output(o) < spec.address_count());
        }
    }
}

TEST_CASE("function genes are uniform (3 sigma per value)")
{
    Rng rng(2024);
    std::array<int, 4> counts{};
    const auto spec = parity_spec(1);
    for (int i = 0; i < 10'000; ++i) {
        ++counts[random_chromosome(spec, rng).function(0)];
    }
    const double sigma = std::sqrt(10'000 * 0.25 * 0.75);
    for (int c : counts) {
        CHECK(std::fabs(c - 2'500.0) <= 3 * sigma);
    }
}

TEST_CASE("invalid genomes are rejected")
{
    CHECK_THROWS_AS(GenomeSpec({0, 5, 1}).validate(), ConfigError);
    CHECK_THROWS_AS(GenomeSpec({2, 5, 1, FunctionSetId::boolean, 3}).validate(), ConfigError);
    const GenomeSpec spec{2, 1, 1, FunctionSetId::boolean, 2};
    CHECK_THROWS_AS(Chromosome(spec, {0, 0, 2, 0}), ConfigError); // input gene may not address node 0 itself
    CHECK_THROWS_AS(Chromosome(spec, {4, 0, 1, 0}), ConfigError);
    CHECK_THROWS_AS(Chromosome(spec, {0, 0, 1}), ConfigError);
    CHECK_NOTHROW(Chromosome(spec, {3, 1, 1, 2}));
    const Chromosome ok(spec, {3, 1, 1, 2});
    CHECK_THROWS_AS((void)ok.with_gene(3, 3), ConfigError);
    CHECK(ok.with_gene(3, 0).output(0) == 0);
}

TEST_CASE("mutation count")
{
    CHECK(mutation_count(301, 0.02) == 6);
    CHECK(mutation_count(301, 0.001) == 1);
    CHECK(mutation_count(301, 1.0) == 301);
    CHECK(mutation_count(301, 0.03) == 9);
    CHECK_THROWS_AS(mutation_count(301, 0.0), ConfigError);
    CHECK_THROWS_AS(mutation_count(301, 1.5), ConfigError);
    CHECK_THROWS_AS(mutation_count(301, std::nan("")), ConfigError);
}

TEST_CASE("mutation redraws exactly k distinct legal positions")
{
    Rng rng(5);
    const auto spec = parity_spec();
    for (int trial = 0; trial < 300; ++trial) {
        const auto parent = random_chromosome(spec, rng);
        const double rate = std::array{0.001, 0.02, 0.04, 0.25}[trial % 4];
        const auto result = mutate_tracked(parent, rate, rng);
        const auto k = mutation_count(spec.gene_count(), rate);
        REQUIRE(result.positions.size() == k);
        CHECK(std::is_sorted(result.positions.begin(), result.positions.end()));
        CHECK(std::adjacent_find(result.positions.begin(), result.positions.end()) == result.positions.end());
        std::size_t differing = 0;
        for (std::size_t i = 0; i < spec.gene_count(); ++i) {
            const bool listed = std::binary_search(result.positions.begin(), result.positions.end(), i);
            if (parent.genes()[i] != result.child.genes()[i]) {
                ++differing;
                CHECK(listed);
            }
            CHECK(result.child.genes()[i] < gene_bound(spec, i));
        }
        CHECK(differing <= k);
        // Re-validating through the checked constructor must succeed.
        CHECK_NOTHROW(Chromosome(spec, {result.child.genes().begin(), result.child.genes().end()}));
    }
}

TEST_CASE("mutation positions are uniform over the genome")
{
    Rng rng(77);
    const GenomeSpec spec{2, 3, 1, FunctionSetId::boolean, 2}; // 10 genes
    const auto parent = random_chromosome(spec, rng);
    std::array<int, 10> hits{};
    const int draws = 20'000;
    for (int i = 0; i < draws; ++i) {
        for (auto p : mutate_tracked(parent, 0.2, rng).positions) { // k = 2
            ++hits[p];
        }
    }
    const double expected = draws * 2 / 10.0;
    const double sigma = std::sqrt(draws * 0.2 * 0.8);
    for (int h : hits) {
        CHECK(std::fabs(h - expected) <= 4 * sigma);
    }
}

TEST_CASE("mutation is deterministic for a fixed seed")
{
    Rng a(42);
    Rng b(42);
    const auto parent = random_chromosome(parity_spec(), a);
    (void)random_chromosome(parity_spec(), b);
    CHECK(mutate(parent, 0.02, a) == mutate(parent, 0.02, b));
}

TEST_CASE("decode of the XOR composition")
{
    const auto c = oracle::xor_chromosome(4);
    const auto p = decode(c);
    CHECK(p.active_nodes == std::vector<std::size_t>{0, 1, 2});
    CHECK(p.functional_size == 3);
    CHECK(p.active_links == 6);

    const auto to_n0 = decode(oracle::xor_chromosome(2));
    CHECK(to_n0.active_nodes == std::vector<std::size_t>{0});
    CHECK(to_n0.functional_size == 1);
    CHECK(to_n0.is_active(0));
    CHECK_FALSE(to_n0.is_active(1));

    const auto to_input = decode(oracle::xor_chromosome(1));
    CHECK(to_input.functional_size == 0);
    CHECK(to_input.active_links == 0);
}

TEST_CASE("decode of a full chain")
{
    std::vector<std::tuple<unsigned, unsigned, unsigned>> nodes;
    for (unsigned i = 0; i < 100; ++i) {
        nodes.emplace_back(i % 4, i == 0 ? 0 : 1 + i, i == 0 ? 1 : i);
    }
    const auto c = oracle::build(2, FunctionSetId::boolean, nodes, {101});
    const auto p = decode(c);
    CHECK(p.functional_size == 100);
    CHECK(p.active_links == 200);
}

TEST_CASE("decode matches a forward-closure oracle")
{
    Rng rng(9);
    for (int trial = 0; trial < 500; ++trial) {
        const GenomeSpec spec{1 + static_cast<std::size_t>(trial % 4), 1 + static_cast<std::size_t>(trial % 20),
                              1 + static_cast<std::size_t>(trial % 2), FunctionSetId::boolean, 2};
        const auto c = random_chromosome(spec, rng);
        const auto p = decode(c);
        // A node is active iff some output reaches it; compute by repeated relaxation.
        std::vector<bool> reach(spec.address_count(), false);
        for (std::size_t o = 0; o < spec.num_outputs; ++o) reach[c.output(o)] = true;
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t n = 0; n < spec.num_nodes; ++n) {
                if (!reach[spec.num_inputs + n]) continue;
                for (std::size_t s = 0; s < 2; ++s) {
                    if (!reach[c.input(n, s)]) {
                        reach[c.input(n, s)] = true;
                        changed = true;
                    }
                }
            }
        }
        std::vector<std::size_t> expected;
        for (std::size_t n = 0; n < spec.num_nodes; ++n) {
            if (reach[spec.num_inputs + n]) expected.push_back(n);
        }
        CHECK(p.active_nodes == expected);
        CHECK(p.functional_size == expected.size());
        CHECK(p.active_links == 2 * expected.size());
    }
}

TEST_CASE("changes to inactive genes keep the phenotype")
{
    Rng rng(13);
    const auto spec = parity_spec();
    for (int trial = 0; trial < 300; ++trial) {
        const auto parent = random_chromosome(spec, rng);
        const auto pp = decode(parent);
        const auto r = mutate_tracked(parent, 0.02, rng);
        if (!changes_active_genes(parent, pp, r.child, r.positions)) {
            CHECK(decode(r.child) == pp);
        }
        for (auto pos : r.positions) {
            if (!is_active_gene(pp, spec, pos)) {
                CHECK(gene_role(spec, pos) != GeneRole::output);
            }
        }
    }
}

TEST_CASE("chromosome records round-trip")
{
    Rng rng(21);
    std::vector<Chromosome> all;
    all.push_back(random_chromosome(parity_spec(), rng));
    all.push_back(random_chromosome({2, 10, 1, FunctionSetId::real, 2}, rng));
    std::stringstream ss;
    ss << "# comment\n\n";
    write_chromosomes(ss, all);
    CHECK(read_chromosomes(ss) == all);
    CHECK(parse_record(to_record(all[1])) == all[1]);
    CHECK_THROWS_AS(parse_record("2 1 1 2 boolean 0 0 2 0"), ConfigError);
    CHECK_THROWS_AS(parse_record("2 1 1 2 ternary 0 0 1 0"), ConfigError);
    CHECK_THROWS_AS(parse_record("2 1"), ConfigError);
    CHECK_THROWS_AS(parse_record("2 1 1 2 boolean 0 0 1 x"), ConfigError);
}
