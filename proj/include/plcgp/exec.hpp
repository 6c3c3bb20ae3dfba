#pragma once

/// @file exec.hpp
/// Program interpreter. Boolean programs are evaluated bit-parallel, 64 input
/// patterns per machine word; real programs evaluate one column of samples per
/// node in double precision.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "plcgp/genome.hpp"

namespace plcgp {

enum class Domain : std::uint8_t { boolean, real };

struct FunctionSet {
    FunctionSetId id;
    Domain domain;
    std::array<std::string_view, 4> names;

    [[nodiscard]] std::size_t size() const noexcept { return names.size(); }
};

/// Boolean: AND, NAND, OR, NOR. Real: ADD, SUB, MUL, protected DIV.
const FunctionSet& function_set(FunctionSetId id) noexcept;

/// Denominators with smaller magnitude make protected division return 1.
inline constexpr double kDivisionGuard = 1e-10;

/// Word-wise boolean operator; each bit is one input pattern.
constexpr std::uint64_t apply_boolean(std::size_t index, std::uint64_t a, std::uint64_t b) noexcept
{
    switch (index) {
    case 0:
        return a & b;
    case 1:
        return ~(a & b);
    case 2:
        return a | b;
    default:
        return ~(a | b);
    }
}

constexpr double apply_real(std::size_t index, double a, double b) noexcept
{
    switch (index) {
    case 0:
        return a + b;
    case 1:
        return a - b;
    case 2:
        return a * b;
    default:
        return (b < kDivisionGuard && b > -kDivisionGuard) ? 1.0 : a / b;
    }
}

/// Scalar application. Boolean operands are 0 or 1 and so is the result.
double apply_function(const FunctionSet& set, std::size_t index, double a, double b);

/// Input rows a program is evaluated on. Boolean sets enumerate all 2^n
/// patterns; input i of pattern j is bit i of j.
class PatternSet {
public:
    static PatternSet all_boolean(std::size_t num_inputs);
    /// One column per input, all of equal length.
    static PatternSet real(std::vector<std::vector<double>> columns);

    [[nodiscard]] Domain domain() const noexcept { return domain_; }
    [[nodiscard]] std::size_t num_inputs() const noexcept { return num_inputs_; }
    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t words() const noexcept { return (rows_ + 63) / 64; }

    /// Packed pattern bits of a boolean input.
    [[nodiscard]] std::span<const std::uint64_t> bits(std::size_t input) const noexcept
    {
        return {bits_.data() + input * words(), words()};
    }
    [[nodiscard]] std::span<const double> column(std::size_t input) const noexcept { return columns_[input]; }

    /// Values of one row as doubles (0/1 for boolean sets).
    [[nodiscard]] std::vector<double> row(std::size_t index) const;

private:
    Domain domain_{Domain::boolean};
    std::size_t num_inputs_{};
    std::size_t rows_{};
    std::vector<std::uint64_t> bits_;
    std::vector<std::vector<double>> columns_;
};

/// Output of a program over a whole pattern set.
struct OutputTable {
    Domain domain{Domain::boolean};
    std::size_t rows{};
    std::size_t outputs{};
    /// Boolean: per output, ceil(rows/64) words; padding bits are zero.
    std::vector<std::uint64_t> bits;
    /// Real: per output, `rows` values.
    std::vector<double> values;

    [[nodiscard]] std::size_t words() const noexcept { return (rows + 63) / 64; }
    [[nodiscard]] bool bit(std::size_t output, std::size_t row) const noexcept
    {
        return (bits[output * words() + row / 64] >> (row % 64)) & 1U;
    }
    [[nodiscard]] double value(std::size_t output, std::size_t row) const noexcept
    {
        return values[output * rows + row];
    }
    [[nodiscard]] std::span<const std::uint64_t> output_bits(std::size_t output) const noexcept
    {
        return {bits.data() + output * words(), words()};
    }
    [[nodiscard]] std::span<const double> output_values(std::size_t output) const noexcept
    {
        return {values.data() + output * rows, rows};
    }

    /// Deterministic 64-bit digest of the row sequence.
    [[nodiscard]] std::uint64_t fingerprint() const noexcept;

    /// Row-sequence equality; real values compare by bit pattern.
    bool operator==(const OutputTable& other) const noexcept;
};

struct OutputTableHash {
    std::size_t operator()(const OutputTable& t) const noexcept { return static_cast<std::size_t>(t.fingerprint()); }
};

/// Evaluates one input tuple through the active nodes only.
std::vector<double> evaluate_single(const Chromosome& chromosome, const Phenotype& phenotype,
                                    std::span<const double> inputs);

/// Fast path: bit-parallel for boolean sets, column-wise for real sets.
OutputTable evaluate_all(const Chromosome& chromosome, const Phenotype& phenotype, const PatternSet& patterns);
OutputTable evaluate_all(const Chromosome& chromosome, const PatternSet& patterns);

/// Row-by-row evaluation through evaluate_single; reference for the fast path.
OutputTable evaluate_all_scalar(const Chromosome& chromosome, const Phenotype& phenotype,
                                const PatternSet& patterns);

} // namespace plcgp
