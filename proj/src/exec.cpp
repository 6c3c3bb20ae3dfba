#include "plcgp/exec.hpp"

#include <bit>
#include <cassert>
#include <cstring>

#include <fmt/format.h>

#include "plcgp/error.hpp"

namespace plcgp {

namespace {
    const FunctionSet kBooleanSet{FunctionSetId::boolean, Domain::boolean, {"AND", "NAND", "OR", "NOR"}};
    const FunctionSet kRealSet{FunctionSetId::real, Domain::real, {"ADD", "SUB", "MUL", "DIV"}};

    void check_patterns(const Chromosome& chromosome, const PatternSet& patterns)
    {
        const auto& spec = chromosome.spec();
        if (spec.num_inputs != patterns.num_inputs()) {
            throw ConfigError(fmt::format("chromosome has {} inputs but patterns have {}", spec.num_inputs,
                                          patterns.num_inputs()));
        }
        if (function_set(spec.function_set).domain != patterns.domain()) {
            throw ConfigError("function set domain does not match the pattern set");
        }
    }

    constexpr std::uint64_t padding_mask(std::size_t rows) noexcept
    {
        const auto tail = rows % 64;
        return tail == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << tail) - 1;
    }

    // Reused across evaluations on the same thread.
    thread_local std::vector<std::uint64_t> bool_scratch;
    thread_local std::vector<double> real_scratch;
    thread_local std::vector<std::size_t> slot_of;

    OutputTable evaluate_boolean(const Chromosome& chromosome, const Phenotype& phenotype, const PatternSet& patterns)
    {
        const auto& spec = chromosome.spec();
        const auto words = patterns.words();
        const auto n_in = spec.num_inputs;

        // Address -> row in the scratch buffer: inputs first, then active nodes.
        slot_of.resize(spec.address_count());
        bool_scratch.resize((n_in + phenotype.active_nodes.size()) * words);
        for (std::size_t i = 0; i < n_in; ++i) {
            slot_of[i] = i;
            const auto src = patterns.bits(i);
            std::copy(src.begin(), src.end(), bool_scratch.begin() + static_cast<std::ptrdiff_t>(i * words));
        }
        std::size_t next = n_in;
        for (auto node : phenotype.active_nodes) {
            const auto fn = chromosome.function(node);
            const auto* a = bool_scratch.data() + slot_of[chromosome.input(node, 0)] * words;
            const auto* b = bool_scratch.data() + slot_of[chromosome.input(node, 1)] * words;
            auto* out = bool_scratch.data() + next * words;
            for (std::size_t w = 0; w < words; ++w) {
                out[w] = apply_boolean(fn, a[w], b[w]);
            }
            slot_of[n_in + node] = next++;
        }

        OutputTable table;
        table.domain = Domain::boolean;
        table.rows = patterns.rows();
        table.outputs = spec.num_outputs;
        table.bits.resize(spec.num_outputs * words);
        const auto mask = padding_mask(table.rows);
        for (std::size_t o = 0; o < spec.num_outputs; ++o) {
            const auto* src = bool_scratch.data() + slot_of[chromosome.output(o)] * words;
            std::copy(src, src + words, table.bits.begin() + static_cast<std::ptrdiff_t>(o * words));
            table.bits[o * words + words - 1] &= mask;
        }
        return table;
    }

    OutputTable evaluate_real(const Chromosome& chromosome, const Phenotype& phenotype, const PatternSet& patterns)
    {
        const auto& spec = chromosome.spec();
        const auto rows = patterns.rows();
        const auto n_in = spec.num_inputs;

        real_scratch.resize(phenotype.active_nodes.size() * rows);
        // Column pointers are resolved after the scratch buffer stops growing.
        std::vector<const double*> column(spec.address_count(), nullptr);
        for (std::size_t i = 0; i < n_in; ++i) {
            column[i] = patterns.column(i).data();
        }
        std::size_t next = 0;
        for (auto node : phenotype.active_nodes) {
            const auto fn = chromosome.function(node);
            const double* a = column[chromosome.input(node, 0)];
            const double* b = column[chromosome.input(node, 1)];
            double* out = real_scratch.data() + next * rows;
            switch (fn) {
            case 0:
                for (std::size_t r = 0; r < rows; ++r) out[r] = a[r] + b[r];
                break;
            case 1:
                for (std::size_t r = 0; r < rows; ++r) out[r] = a[r] - b[r];
                break;
            case 2:
                for (std::size_t r = 0; r < rows; ++r) out[r] = a[r] * b[r];
                break;
            default:
                for (std::size_t r = 0; r < rows; ++r) out[r] = apply_real(3, a[r], b[r]);
                break;
            }
            column[n_in + node] = out;
            ++next;
        }

        OutputTable table;
        table.domain = Domain::real;
        table.rows = rows;
        table.outputs = spec.num_outputs;
        table.values.resize(spec.num_outputs * rows);
        for (std::size_t o = 0; o < spec.num_outputs; ++o) {
            const double* src = column[chromosome.output(o)];
            std::copy(src, src + rows, table.values.begin() + static_cast<std::ptrdiff_t>(o * rows));
        }
        return table;
    }
} // namespace

const FunctionSet& function_set(FunctionSetId id) noexcept
{
    return id == FunctionSetId::boolean ? kBooleanSet : kRealSet;
}

double apply_function(const FunctionSet& set, std::size_t index, double a, double b)
{
    if (index >= set.size()) {
        throw ConfigError(fmt::format("function index {} outside set of {}", index, set.size()));
    }
    if (set.domain == Domain::boolean) {
        const auto bits = apply_boolean(index, a != 0.0 ? 1U : 0U, b != 0.0 ? 1U : 0U);
        return static_cast<double>(bits & 1U);
    }
    return apply_real(index, a, b);
}

PatternSet PatternSet::all_boolean(std::size_t num_inputs)
{
    if (num_inputs == 0 || num_inputs > 24) {
        throw ConfigError(fmt::format("boolean pattern sets support 1..24 inputs, got {}", num_inputs));
    }
    PatternSet set;
    set.domain_ = Domain::boolean;
    set.num_inputs_ = num_inputs;
    set.rows_ = std::size_t{1} << num_inputs;
    const auto words = set.words();
    set.bits_.assign(num_inputs * words, 0);
    for (std::size_t j = 0; j < set.rows_; ++j) {
        for (std::size_t i = 0; i < num_inputs; ++i) {
            if ((j >> i) & 1U) {
                set.bits_[i * words + j / 64] |= std::uint64_t{1} << (j % 64);
            }
        }
    }
    return set;
}

PatternSet PatternSet::real(std::vector<std::vector<double>> columns)
{
    if (columns.empty()) {
        throw ConfigError("real pattern set needs at least one column");
    }
    for (const auto& c : columns) {
        if (c.size() != columns.front().size()) {
            throw ConfigError("pattern columns differ in length");
        }
    }
    PatternSet set;
    set.domain_ = Domain::real;
    set.num_inputs_ = columns.size();
    set.rows_ = columns.front().size();
    set.columns_ = std::move(columns);
    return set;
}

std::vector<double> PatternSet::row(std::size_t index) const
{
    std::vector<double> values(num_inputs_);
    for (std::size_t i = 0; i < num_inputs_; ++i) {
        if (domain_ == Domain::boolean) {
            values[i] = static_cast<double>((bits_[i * words() + index / 64] >> (index % 64)) & 1U);
        } else {
            values[i] = columns_[i][index];
        }
    }
    return values;
}

std::uint64_t OutputTable::fingerprint() const noexcept
{
    // FNV-1a over 64-bit lanes, finalized with splitmix.
    std::uint64_t h = 0xcbf29ce484222325ULL ^ (rows * 0x100000001b3ULL) ^ outputs;
    const auto mix = [&h](std::uint64_t lane) {
        h ^= lane;
        h *= 0x100000001b3ULL;
        h ^= h >> 29;
    };
    if (domain == Domain::boolean) {
        for (auto w : bits) {
            mix(w);
        }
    } else {
        for (auto v : values) {
            mix(std::bit_cast<std::uint64_t>(v));
        }
    }
    return splitmix64(h);
}

bool OutputTable::operator==(const OutputTable& other) const noexcept
{
    if (domain != other.domain || rows != other.rows || outputs != other.outputs) {
        return false;
    }
    if (domain == Domain::boolean) {
        return bits == other.bits;
    }
    return values.size() == other.values.size() &&
           (values.empty() || std::memcmp(values.data(), other.values.data(), values.size() * sizeof(double)) == 0);
}

std::vector<double> evaluate_single(const Chromosome& chromosome, const Phenotype& phenotype,
                                    std::span<const double> inputs)
{
    const auto& spec = chromosome.spec();
    if (inputs.size() != spec.num_inputs) {
        throw ConfigError(fmt::format("expected {} inputs, got {}", spec.num_inputs, inputs.size()));
    }
    const auto& set = function_set(spec.function_set);
    std::vector<double> value(spec.address_count(), 0.0);
    std::copy(inputs.begin(), inputs.end(), value.begin());
    for (auto node : phenotype.active_nodes) {
        value[spec.num_inputs + node] =
            apply_function(set, chromosome.function(node), value[chromosome.input(node, 0)],
                           value[chromosome.input(node, 1)]);
    }
    std::vector<double> outputs(spec.num_outputs);
    for (std::size_t o = 0; o < spec.num_outputs; ++o) {
        outputs[o] = value[chromosome.output(o)];
    }
    return outputs;
}

OutputTable evaluate_all(const Chromosome& chromosome, const Phenotype& phenotype, const PatternSet& patterns)
{
    check_patterns(chromosome, patterns);
    return patterns.domain() == Domain::boolean ? evaluate_boolean(chromosome, phenotype, patterns)
                                                : evaluate_real(chromosome, phenotype, patterns);
}

OutputTable evaluate_all(const Chromosome& chromosome, const PatternSet& patterns)
{
    return evaluate_all(chromosome, decode(chromosome), patterns);
}

OutputTable evaluate_all_scalar(const Chromosome& chromosome, const Phenotype& phenotype, const PatternSet& patterns)
{
    check_patterns(chromosome, patterns);
    const auto& spec = chromosome.spec();
    OutputTable table;
    table.domain = patterns.domain();
    table.rows = patterns.rows();
    table.outputs = spec.num_outputs;
    if (table.domain == Domain::boolean) {
        table.bits.assign(spec.num_outputs * table.words(), 0);
    } else {
        table.values.assign(spec.num_outputs * table.rows, 0.0);
    }
    for (std::size_t r = 0; r < table.rows; ++r) {
        const auto out = evaluate_single(chromosome, phenotype, patterns.row(r));
        for (std::size_t o = 0; o < spec.num_outputs; ++o) {
            if (table.domain == Domain::boolean) {
                if (out[o] != 0.0) {
                    table.bits[o * table.words() + r / 64] |= std::uint64_t{1} << (r % 64);
                }
            } else {
                table.values[o * table.rows + r] = out[o];
            }
        }
    }
    return table;
}

} // namespace plcgp
