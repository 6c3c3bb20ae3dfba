#include "plcgp/problems.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "plcgp/error.hpp"

namespace plcgp {

Fitness Fitness::worst(Direction direction) noexcept
{
    constexpr auto inf = std::numeric_limits<double>::infinity();
    return {direction == Direction::maximize ? -inf : inf, direction};
}

TargetTable::TargetTable(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

TargetTable TargetTable::from_bits(std::span<const std::uint8_t> bits)
{
    TargetTable t(bits.size());
    for (std::size_t j = 0; j < bits.size(); ++j) {
        t.set(j, bits[j] != 0);
    }
    return t;
}

void TargetTable::set(std::size_t j, bool value) noexcept
{
    const auto mask = std::uint64_t{1} << (j % 64);
    if (value) {
        words_[j / 64] |= mask;
    } else {
        words_[j / 64] &= ~mask;
    }
}

std::size_t TargetTable::count_ones() const noexcept
{
    std::size_t n = 0;
    for (auto w : words_) {
        n += static_cast<std::size_t>(std::popcount(w));
    }
    return n;
}

std::size_t TargetTable::hamming_distance(const TargetTable& other) const
{
    if (other.size_ != size_) {
        throw std::logic_error("hamming distance between tables of different length");
    }
    std::size_t n = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        n += static_cast<std::size_t>(std::popcount(words_[w] ^ other.words_[w]));
    }
    return n;
}

TargetTable parity_targets(std::size_t n)
{
    if (n < 2 || n > 16) {
        throw ConfigError(fmt::format("parity supports 2..16 bits, got {}", n));
    }
    TargetTable t(std::size_t{1} << n);
    for (std::size_t j = 0; j < t.size(); ++j) {
        t.set(j, std::popcount(j) % 2 == 0);
    }
    return t;
}

Fitness fitness_boolean(const OutputTable& outputs, const TargetTable& targets)
{
    if (outputs.domain != Domain::boolean || outputs.rows != targets.size()) {
        throw std::logic_error(fmt::format("output table has {} rows, targets have {}", outputs.rows, targets.size()));
    }
    const auto words = targets.words();
    std::size_t wrong = 0;
    for (std::size_t o = 0; o < outputs.outputs; ++o) {
        const auto out = outputs.output_bits(o);
        for (std::size_t w = 0; w < words.size(); ++w) {
            wrong += static_cast<std::size_t>(std::popcount(out[w] ^ words[w]));
        }
    }
    const auto total = static_cast<double>(outputs.rows * outputs.outputs);
    return {1.0 - static_cast<double>(wrong) / total, Direction::maximize};
}

TargetTable dynamic_targets(std::size_t num_inputs, Rng& rng)
{
    if (num_inputs == 0 || num_inputs > 24) {
        throw ConfigError(fmt::format("dynamic problem supports 1..24 inputs, got {}", num_inputs));
    }
    TargetTable t(std::size_t{1} << num_inputs);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t j = 0; j < t.size(); ++j) {
        t.set(j, coin(rng));
    }
    return t;
}

TargetTable flip_positions(const TargetTable& targets, std::span<const std::size_t> positions)
{
    auto result = targets;
    for (auto p : positions) {
        if (p >= targets.size()) {
            throw ConfigError(fmt::format("flip position {} outside table of {}", p, targets.size()));
        }
        result.flip(p);
    }
    return result;
}

TargetTable perturb_targets(const TargetTable& targets, std::size_t k, Rng& rng)
{
    if (k < 1 || k > targets.size()) {
        throw ConfigError(fmt::format("cannot flip {} of {} targets", k, targets.size()));
    }
    std::vector<std::size_t> order(targets.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    // Partial Fisher-Yates: the first k entries become a uniform k-subset.
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> dist(i, order.size() - 1);
        std::swap(order[i], order[dist(rng)]);
    }
    order.resize(k);
    return flip_positions(targets, order);
}

double pagie_value(double x1, double x2)
{
    if (x1 == 0.0 || x2 == 0.0) {
        throw std::domain_error("pagie function is singular at a zero coordinate");
    }
    const auto term = [](double x) {
        const double x2 = x * x;
        return 1.0 / (1.0 + 1.0 / (x2 * x2));
    };
    return term(x1) + term(x2);
}

std::string_view to_string(SamplingMode mode) noexcept
{
    return mode == SamplingMode::grid ? "grid" : "random";
}

SamplingMode parse_sampling_mode(std::string_view name)
{
    if (name == "random") {
        return SamplingMode::random;
    }
    if (name == "grid") {
        return SamplingMode::grid;
    }
    throw ConfigError(fmt::format("unknown sampling mode '{}'", name));
}

RegressionProblem pagie_dataset(Rng& rng, SamplingMode mode)
{
    RegressionProblem data;
    data.x1.reserve(kPagieSamples);
    data.x2.reserve(kPagieSamples);
    if (mode == SamplingMode::grid) {
        constexpr std::size_t side = 26;
        const double step = 2.0 * kPagieRange / static_cast<double>(side - 1);
        for (std::size_t i = 0; i < side; ++i) {
            for (std::size_t j = 0; j < side; ++j) {
                data.x1.push_back(-kPagieRange + step * static_cast<double>(i));
                data.x2.push_back(-kPagieRange + step * static_cast<double>(j));
            }
        }
    } else {
        std::uniform_real_distribution<double> dist(-kPagieRange, kPagieRange);
        const auto draw = [&] {
            double x = 0.0;
            do {
                x = dist(rng);
            } while (std::abs(x) < kPagieZeroExclusion);
            return x;
        };
        for (std::size_t i = 0; i < kPagieSamples; ++i) {
            data.x1.push_back(draw());
            data.x2.push_back(draw());
        }
    }
    data.targets.reserve(kPagieSamples);
    for (std::size_t i = 0; i < data.x1.size(); ++i) {
        data.targets.push_back(pagie_value(data.x1[i], data.x2[i]));
    }
    return data;
}

Fitness regression_error(const OutputTable& outputs, const RegressionProblem& problem)
{
    if (outputs.domain != Domain::real || outputs.rows != problem.size()) {
        throw std::logic_error(
            fmt::format("output table has {} rows, dataset has {}", outputs.rows, problem.size()));
    }
    double error = 0.0;
    for (std::size_t o = 0; o < outputs.outputs; ++o) {
        const auto values = outputs.output_values(o);
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!std::isfinite(values[i])) {
                return Fitness::worst(Direction::minimize);
            }
            error += std::abs(values[i] - problem.targets[i]);
        }
    }
    if (!std::isfinite(error)) {
        return Fitness::worst(Direction::minimize);
    }
    return {error, Direction::minimize};
}

void write_dataset_csv(std::ostream& out, const RegressionProblem& problem)
{
    out << "x1,x2,target\n";
    for (std::size_t i = 0; i < problem.size(); ++i) {
        out << fmt::format("{},{},{}\n", problem.x1[i], problem.x2[i], problem.targets[i]);
    }
}

std::string_view to_string(ProblemKind kind) noexcept
{
    switch (kind) {
    case ProblemKind::parity:
        return "parity";
    case ProblemKind::dynamic:
        return "dynamic";
    case ProblemKind::pagie:
        return "pagie";
    }
    return "unknown";
}

ProblemKind parse_problem_kind(std::string_view name)
{
    if (name == "parity") {
        return ProblemKind::parity;
    }
    if (name == "dynamic") {
        return ProblemKind::dynamic;
    }
    if (name == "pagie") {
        return ProblemKind::pagie;
    }
    throw ConfigError(fmt::format("unknown problem '{}'", name));
}

Problem Problem::parity(std::size_t bits)
{
    return boolean(ProblemKind::parity, parity_targets(bits));
}

Problem Problem::dynamic(std::size_t num_inputs, Rng& rng)
{
    return boolean(ProblemKind::dynamic, dynamic_targets(num_inputs, rng));
}

Problem Problem::boolean(ProblemKind kind, TargetTable targets)
{
    const auto rows = targets.size();
    if (kind == ProblemKind::pagie || rows < 2 || !std::has_single_bit(rows)) {
        throw ConfigError("boolean problem needs a parity/dynamic kind and 2^n targets");
    }
    const auto n = static_cast<std::size_t>(std::countr_zero(rows));
    return {kind, std::make_shared<const PatternSet>(PatternSet::all_boolean(n)), std::move(targets)};
}

Problem Problem::pagie(Rng& rng, SamplingMode mode)
{
    return regression(pagie_dataset(rng, mode));
}

Problem Problem::regression(RegressionProblem data)
{
    if (data.x1.size() != data.targets.size() || data.x2.size() != data.targets.size() || data.targets.empty()) {
        throw ConfigError("regression dataset columns differ in length");
    }
    auto patterns = std::make_shared<const PatternSet>(PatternSet::real({data.x1, data.x2}));
    return {ProblemKind::pagie, std::move(patterns), std::move(data)};
}

FunctionSetId Problem::function_set() const noexcept
{
    return kind_ == ProblemKind::pagie ? FunctionSetId::real : FunctionSetId::boolean;
}

Direction Problem::direction() const noexcept
{
    return kind_ == ProblemKind::pagie ? Direction::minimize : Direction::maximize;
}

GenomeSpec Problem::genome_spec(std::size_t num_nodes) const noexcept
{
    return {num_inputs(), num_nodes, num_outputs(), function_set(), kNodeArity};
}

Fitness Problem::fitness(const OutputTable& outputs) const
{
    if (const auto* t = targets()) {
        return fitness_boolean(outputs, *t);
    }
    return regression_error(outputs, std::get<RegressionProblem>(data_));
}

Fitness Problem::evaluate(const Chromosome& chromosome, const Phenotype& phenotype) const
{
    return fitness(evaluate_all(chromosome, phenotype, *patterns_));
}

Fitness Problem::evaluate(const Chromosome& chromosome) const
{
    return evaluate(chromosome, decode(chromosome));
}

bool Problem::is_optimal(const Fitness& fitness) const noexcept
{
    if (kind_ == ProblemKind::pagie) {
        return fitness.value < kRegressionOptimalError;
    }
    return fitness.value == 1.0;
}

Problem Problem::with_targets(TargetTable targets) const
{
    if (!this->targets() || targets.size() != patterns_->rows()) {
        throw ConfigError("replacement targets must match a boolean problem's pattern count");
    }
    return {kind_, patterns_, std::move(targets)};
}

} // namespace plcgp
