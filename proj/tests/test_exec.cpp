#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "oracles.hpp"
#include "plcgp/error.hpp"
#include "plcgp/exec.hpp"

using namespace plcgp;

TEST_CASE("boolean gate truth tables")
{
    const auto& set = function_set(FunctionSetId::boolean);
    CHECK(set.names[0] == "AND");
    CHECK(apply_function(set, 0, 1, 1) == 1.0);
    CHECK(apply_function(set, 0, 1, 0) == 0.0);
    CHECK(apply_function(set, 1, 1, 1) == 0.0);
    CHECK(apply_function(set, 2, 0, 1) == 1.0);
    CHECK(apply_function(set, 3, 0, 0) == 1.0);
    CHECK(apply_function(set, 3, 1, 0) == 0.0);
    CHECK_THROWS(apply_function(set, 4, 0, 0));
    // Word form agrees with the scalar form bit by bit.
    for (std::size_t f = 0; f < 4; ++f) {
        const auto w = apply_boolean(f, 0b1100, 0b1010);
        for (int bit = 0; bit < 4; ++bit) {
            const double a = (0b1100 >> bit) & 1;
            const double b = (0b1010 >> bit) & 1;
            CHECK(static_cast<double>((w >> bit) & 1U) == apply_function(set, f, a, b));
        }
    }
}

TEST_CASE("real operators with protected division")
{
    const auto& set = function_set(FunctionSetId::real);
    CHECK(apply_function(set, 0, 2.5, 1.5) == 4.0);
    CHECK(apply_function(set, 1, 2.5, 1.5) == 1.0);
    CHECK(apply_function(set, 2, 2.5, 2.0) == 5.0);
    CHECK(apply_function(set, 3, 7.0, 0.0) == 1.0);
    CHECK(apply_function(set, 3, 7.0, 5e-11) == 1.0);
    CHECK(apply_function(set, 3, 7.0, -5e-11) == 1.0);
    CHECK(apply_function(set, 3, 7.0, 2.0) == 3.5);
}

TEST_CASE("XOR composition truth table")
{
    const auto c = oracle::xor_chromosome();
    const auto p = decode(c);
    const std::vector<double> in10{1, 0};
    const std::vector<double> in11{1, 1};
    CHECK(evaluate_single(c, p, in10)[0] == 1.0);
    CHECK(evaluate_single(c, p, in11)[0] == 0.0);
    const auto table = evaluate_all(c, PatternSet::all_boolean(2));
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(table.bit(0, j) == (((j & 1U) ^ (j >> 1U)) != 0));
    }
}

TEST_CASE("identity wiring and pattern counts")
{
    const auto patterns = PatternSet::all_boolean(6);
    CHECK(patterns.rows() == 64);
    CHECK(patterns.words() == 1);
    Rng rng(1);
    auto c = random_chromosome({6, 10, 1, FunctionSetId::boolean, 2}, rng).with_gene(30, 0);
    const auto table = evaluate_all(c, patterns);
    for (std::size_t j = 0; j < 64; ++j) {
        CHECK(table.bit(0, j) == ((j & 1U) != 0));
    }
    CHECK_THROWS_AS(PatternSet::all_boolean(0), ConfigError);
    CHECK_THROWS_AS(PatternSet::all_boolean(25), ConfigError);
}

TEST_CASE("constant-zero gadget")
{
    // n0 = NAND(x,x) = not x, n1 = AND(x, n0) = 0.
    const auto c = oracle::build(3, FunctionSetId::boolean, {{1, 0, 0}, {0, 0, 3}}, {4});
    const auto table = evaluate_all(c, PatternSet::all_boolean(3));
    for (std::size_t j = 0; j < 8; ++j) {
        CHECK_FALSE(table.bit(0, j));
    }
    CHECK(table.bits[0] == 0);
}

TEST_CASE("padding bits are zero for small pattern sets")
{
    const auto c = oracle::build(2, FunctionSetId::boolean, {{3, 0, 1}}, {2}); // NOR: true only on 00
    const auto table = evaluate_all(c, PatternSet::all_boolean(2));
    CHECK(table.bits[0] == 1);
}

TEST_CASE("fast path equals the naive all-nodes interpreter")
{
    Rng rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 8);
        const GenomeSpec spec{n, 1 + static_cast<std::size_t>(trial % 30), 1 + static_cast<std::size_t>(trial % 3),
                              FunctionSetId::boolean, 2};
        const auto c = random_chromosome(spec, rng);
        const auto rows = oracle::boolean_rows(n);
        const auto expected = oracle::naive_outputs(c, rows);
        const auto table = evaluate_all(c, PatternSet::all_boolean(n));
        REQUIRE(table.outputs == spec.num_outputs);
        for (std::size_t o = 0; o < spec.num_outputs; ++o) {
            for (std::size_t j = 0; j < rows.size(); ++j) {
                CHECK(static_cast<double>(table.bit(o, j)) == expected[o * rows.size() + j]);
            }
        }
        CHECK(evaluate_all_scalar(c, decode(c), PatternSet::all_boolean(n)) == table);
    }
}

TEST_CASE("real evaluation matches the naive interpreter bit for bit")
{
    Rng rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::vector<std::vector<double>> columns(2, std::vector<double>(50));
    std::vector<std::vector<double>> rows(50, std::vector<double>(2));
    for (std::size_t r = 0; r < 50; ++r) {
        for (std::size_t i = 0; i < 2; ++i) {
            columns[i][r] = rows[r][i] = r == 0 ? 0.0 : u(rng);
        }
    }
    const auto patterns = PatternSet::real(columns);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = random_chromosome({2, 1 + static_cast<std::size_t>(trial % 20), 1, FunctionSetId::real, 2}, rng);
        const auto table = evaluate_all(c, patterns);
        const auto expected = oracle::naive_outputs(c, rows);
        for (std::size_t r = 0; r < 50; ++r) {
            const double a = table.value(0, r);
            const double b = expected[r];
            CHECK(((std::isnan(a) && std::isnan(b)) || std::memcmp(&a, &b, sizeof a) == 0));
        }
    }
}

TEST_CASE("pattern set shape errors")
{
    CHECK_THROWS_AS(PatternSet::real({}), ConfigError);
    CHECK_THROWS_AS(PatternSet::real({{1.0, 2.0}, {1.0}}), ConfigError);
    const auto c = oracle::xor_chromosome();
    CHECK_THROWS_AS(evaluate_all(c, PatternSet::all_boolean(3)), ConfigError);
    CHECK_THROWS_AS(evaluate_all(c, PatternSet::real({{1.0}, {2.0}})), ConfigError);
}

TEST_CASE("fingerprints ignore inactive genes and separate behaviors")
{
    Rng rng(31);
    const GenomeSpec spec{4, 20, 1, FunctionSetId::boolean, 2};
    const auto patterns = PatternSet::all_boolean(4);
    int compared = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = random_chromosome(spec, rng);
        const auto p = decode(c);
        for (std::size_t pos = 0; pos + 1 < spec.gene_count(); ++pos) {
            if (is_active_gene(p, spec, pos)) continue;
            const auto bound = gene_bound(spec, pos);
            const auto other = c.with_gene(pos, (c.genes()[pos] + 1) % bound);
            const auto ta = evaluate_all(c, patterns);
            const auto tb = evaluate_all(other, patterns);
            CHECK(ta == tb);
            CHECK(ta.fingerprint() == tb.fingerprint());
            ++compared;
            break;
        }
    }
    CHECK(compared > 50);
    // All 16 two-input truth tables have distinct fingerprints.
    std::vector<std::uint64_t> prints;
    for (std::uint64_t t = 0; t < 16; ++t) {
        OutputTable table{Domain::boolean, 4, 1, {t}, {}};
        prints.push_back(table.fingerprint());
    }
    std::sort(prints.begin(), prints.end());
    CHECK(std::adjacent_find(prints.begin(), prints.end()) == prints.end());
}
