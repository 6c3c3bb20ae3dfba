#pragma once

// Independent reference implementations used only by the test suites.

#include <cstddef>
#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#include "plcgp/genome.hpp"
#include "plcgp/problems.hpp"

namespace oracle {

/// Evaluates every node for every row, ignoring activity. Boolean rows are the
/// 2^n patterns with input i = bit i of the row index; the result holds one
/// value per (output, row) in output-major order.
std::vector<double> naive_outputs(const plcgp::Chromosome& chromosome, std::span<const std::vector<double>> rows);

/// All 2^n boolean rows.
std::vector<std::vector<double>> boolean_rows(std::size_t num_inputs);

/// Chromosome from (function, in0, in1) tuples and output addresses.
plcgp::Chromosome build(std::size_t num_inputs, plcgp::FunctionSetId set,
                        std::vector<std::tuple<unsigned, unsigned, unsigned>> nodes, std::vector<unsigned> outputs);

/// The three-node XOR composition: n0 = OR(in0,in1), n1 = NAND(in0,in1), n2 = AND(n0,n1).
plcgp::Chromosome xor_chromosome(unsigned output_address = 4);

struct OneGeneNeighbourhood {
    std::size_t mutants{};
    /// Probability that a uniformly drawn single-gene mutant keeps the fitness,
    /// drawing position then value uniformly.
    double preserved_probability{};
    double functional_change_probability{};
};

/// Exhaustive enumeration of all single-gene redraws.
OneGeneNeighbourhood enumerate_one_gene(const plcgp::Chromosome& chromosome, const plcgp::Problem& problem);

/// Two-sided rank-sum p-value by enumerating every assignment of the pooled
/// values to the first group.
double brute_force_rank_sum_p(std::span<const double> a, std::span<const double> b);

} // namespace oracle
