#pragma once

/// @file problems.hpp
/// Benchmark problems: n-bit even parity, randomly drawn (and perturbable)
/// binary classification, and Pagie symbolic regression.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "plcgp/exec.hpp"
#include "plcgp/genome.hpp"
#include "plcgp/random.hpp"

namespace plcgp {

enum class Direction : std::uint8_t { maximize, minimize };

struct Fitness {
    double value{0.0};
    Direction direction{Direction::maximize};

    /// Strictly better in this fitness' direction.
    [[nodiscard]] bool better_than(const Fitness& other) const noexcept
    {
        return direction == Direction::maximize ? value > other.value : value < other.value;
    }
    [[nodiscard]] bool at_least_as_good_as(const Fitness& other) const noexcept { return !other.better_than(*this); }

    [[nodiscard]] static Fitness worst(Direction direction) noexcept;

    bool operator==(const Fitness&) const = default;
};

/// Bit-packed desired outputs, one bit per input pattern.
class TargetTable {
public:
    TargetTable() = default;
    explicit TargetTable(std::size_t size);
    static TargetTable from_bits(std::span<const std::uint8_t> bits);

    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] bool operator[](std::size_t j) const noexcept { return (words_[j / 64] >> (j % 64)) & 1U; }
    void set(std::size_t j, bool value) noexcept;
    void flip(std::size_t j) noexcept { words_[j / 64] ^= std::uint64_t{1} << (j % 64); }

    [[nodiscard]] std::span<const std::uint64_t> words() const noexcept { return words_; }
    [[nodiscard]] std::size_t count_ones() const noexcept;
    [[nodiscard]] std::size_t hamming_distance(const TargetTable& other) const;

    bool operator==(const TargetTable&) const = default;

private:
    std::size_t size_{};
    std::vector<std::uint64_t> words_;
};

/// Target j is 1 iff popcount(j) is even. Throws ConfigError unless 2 <= n <= 16.
TargetTable parity_targets(std::size_t n);

/// F = 1 - (wrong bits) / (rows * outputs), maximized. Throws std::logic_error on
/// a length mismatch.
Fitness fitness_boolean(const OutputTable& outputs, const TargetTable& targets);

/// 2^n independent fair bits.
TargetTable dynamic_targets(std::size_t num_inputs, Rng& rng);

/// Copy with the listed positions flipped.
TargetTable flip_positions(const TargetTable& targets, std::span<const std::size_t> positions);

/// Flips exactly k distinct, uniformly chosen positions. Throws ConfigError
/// unless 1 <= k <= size.
TargetTable perturb_targets(const TargetTable& targets, std::size_t k, Rng& rng);

/// 1/(1+x1^-4) + 1/(1+x2^-4). Throws std::domain_error on a zero argument.
double pagie_value(double x1, double x2);

inline constexpr std::size_t kPagieSamples = 676;
inline constexpr double kPagieRange = 5.0;
/// Coordinates closer to zero than this are redrawn.
inline constexpr double kPagieZeroExclusion = 1e-6;
/// Regression runs count as solved below this summed absolute error.
inline constexpr double kRegressionOptimalError = 1e-4;

enum class SamplingMode : std::uint8_t { random, grid };

std::string_view to_string(SamplingMode mode) noexcept;
SamplingMode parse_sampling_mode(std::string_view name);

struct RegressionProblem {
    std::vector<double> x1;
    std::vector<double> x2;
    std::vector<double> targets;

    [[nodiscard]] std::size_t size() const noexcept { return targets.size(); }
};

/// 676 samples over [-5,5]^2: uniform random, or a 26x26 evenly spaced grid.
RegressionProblem pagie_dataset(Rng& rng, SamplingMode mode = SamplingMode::random);

/// Sum of absolute errors, minimized; +inf if any output is non-finite.
Fitness regression_error(const OutputTable& outputs, const RegressionProblem& problem);

/// "x1,x2,target" header plus one row per sample, round-trip precision.
void write_dataset_csv(std::ostream& out, const RegressionProblem& problem);

enum class ProblemKind : std::uint8_t { parity, dynamic, pagie };

std::string_view to_string(ProblemKind kind) noexcept;
ProblemKind parse_problem_kind(std::string_view name);

/// Evaluation context shared by the evolutionary loop and the analysis probes.
/// Immutable; the dynamic problem produces a new instance per target change.
class Problem {
public:
    static Problem parity(std::size_t bits);
    static Problem dynamic(std::size_t num_inputs, Rng& rng);
    static Problem boolean(ProblemKind kind, TargetTable targets);
    static Problem pagie(Rng& rng, SamplingMode mode = SamplingMode::random);
    static Problem regression(RegressionProblem data);

    [[nodiscard]] ProblemKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t num_inputs() const noexcept { return patterns_->num_inputs(); }
    [[nodiscard]] std::size_t num_outputs() const noexcept { return 1; }
    [[nodiscard]] FunctionSetId function_set() const noexcept;
    [[nodiscard]] Direction direction() const noexcept;
    [[nodiscard]] const PatternSet& patterns() const noexcept { return *patterns_; }

    /// Genome shape matching this problem's arity and function set.
    [[nodiscard]] GenomeSpec genome_spec(std::size_t num_nodes) const noexcept;

    [[nodiscard]] Fitness fitness(const OutputTable& outputs) const;
    [[nodiscard]] Fitness evaluate(const Chromosome& chromosome, const Phenotype& phenotype) const;
    [[nodiscard]] Fitness evaluate(const Chromosome& chromosome) const;

    /// Boolean: F == 1 exactly. Regression: error < 1e-4.
    [[nodiscard]] bool is_optimal(const Fitness& fitness) const noexcept;

    /// Same patterns, new boolean targets.
    [[nodiscard]] Problem with_targets(TargetTable targets) const;

    [[nodiscard]] const TargetTable* targets() const noexcept { return std::get_if<TargetTable>(&data_); }
    [[nodiscard]] const RegressionProblem* regression_data() const noexcept
    {
        return std::get_if<RegressionProblem>(&data_);
    }

private:
    Problem(ProblemKind kind, std::shared_ptr<const PatternSet> patterns, std::variant<TargetTable, RegressionProblem> data)
        : kind_(kind), patterns_(std::move(patterns)), data_(std::move(data))
    {
    }

    ProblemKind kind_;
    std::shared_ptr<const PatternSet> patterns_;
    std::variant<TargetTable, RegressionProblem> data_;
};

} // namespace plcgp
