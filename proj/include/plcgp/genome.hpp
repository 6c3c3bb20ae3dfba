#pragma once

/// @file genome.hpp
/// Fixed-length integer chromosome encoding a feed-forward graph of binary
/// function nodes, plus initialization, mutation and active-subgraph decoding.
///
/// Gene layout: node i occupies genes [3i, 3i+3) as (function, input0, input1),
/// followed by one gene per program output. Addresses 0..num_inputs-1 name the
/// program inputs and address num_inputs+i names node i, so node i may read any
/// input or any node j < i.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plcgp/random.hpp"

namespace plcgp {

enum class FunctionSetId : std::uint8_t { boolean, real };

std::string_view to_string(FunctionSetId id) noexcept;
FunctionSetId parse_function_set(std::string_view name);

inline constexpr std::size_t kNodeArity = 2;

struct GenomeSpec {
    std::size_t num_inputs{};
    std::size_t num_nodes{};
    std::size_t num_outputs{};
    FunctionSetId function_set{FunctionSetId::boolean};
    std::size_t node_arity{kNodeArity};

    [[nodiscard]] std::size_t function_count() const noexcept;
    [[nodiscard]] std::size_t genes_per_node() const noexcept { return 1 + node_arity; }
    [[nodiscard]] std::size_t gene_count() const noexcept { return num_nodes * genes_per_node() + num_outputs; }
    [[nodiscard]] std::size_t address_count() const noexcept { return num_inputs + num_nodes; }

    /// Throws ConfigError on zero counts or an arity other than 2.
    void validate() const;

    bool operator==(const GenomeSpec&) const = default;
};

using Gene = std::uint32_t;

enum class GeneRole : std::uint8_t { function, input, output };

/// Role of the gene at `position`.
GeneRole gene_role(const GenomeSpec& spec, std::size_t position) noexcept;

/// Number of legal values of the gene at `position`; legal values are [0, bound).
Gene gene_bound(const GenomeSpec& spec, std::size_t position) noexcept;

/// Node owning a node gene. Undefined for output genes.
inline std::size_t gene_node(const GenomeSpec& spec, std::size_t position) noexcept
{
    return position / spec.genes_per_node();
}

struct MutationResult;

class Chromosome {
public:
    Chromosome() = default;

    /// Validates every gene against its legal range; throws ConfigError otherwise.
    Chromosome(GenomeSpec spec, std::vector<Gene> genes);

    [[nodiscard]] const GenomeSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] std::span<const Gene> genes() const noexcept { return genes_; }
    [[nodiscard]] std::size_t size() const noexcept { return genes_.size(); }

    [[nodiscard]] Gene function(std::size_t node) const noexcept { return genes_[node * spec_.genes_per_node()]; }
    [[nodiscard]] Gene input(std::size_t node, std::size_t slot) const noexcept
    {
        return genes_[node * spec_.genes_per_node() + 1 + slot];
    }
    [[nodiscard]] Gene output(std::size_t index) const noexcept
    {
        return genes_[spec_.num_nodes * spec_.genes_per_node() + index];
    }

    /// Copy with one gene replaced. Throws ConfigError if `value` is illegal there.
    [[nodiscard]] Chromosome with_gene(std::size_t position, Gene value) const;

    bool operator==(const Chromosome&) const = default;

private:
    struct Unchecked {};
    Chromosome(GenomeSpec spec, std::vector<Gene> genes, Unchecked) : spec_(spec), genes_(std::move(genes)) {}

    friend Chromosome random_chromosome(const GenomeSpec&, Rng&);
    friend MutationResult mutate_tracked(const Chromosome&, double, Rng&);

    GenomeSpec spec_{};
    std::vector<Gene> genes_;
};

/// Uniformly random chromosome over the legal gene ranges.
Chromosome random_chromosome(const GenomeSpec& spec, Rng& rng);

/// Number of genes redrawn by one mutation: max(1, round(rate * genes)).
std::size_t mutation_count(std::size_t gene_count, double rate);

struct MutationResult {
    Chromosome child;
    /// Redrawn positions in ascending order. A redraw may keep the old value.
    std::vector<std::size_t> positions;
};

/// Redraws exactly mutation_count(genes, rate) distinct positions uniformly from
/// their legal ranges. Throws ConfigError unless 0 < rate <= 1.
MutationResult mutate_tracked(const Chromosome& parent, double rate, Rng& rng);

inline Chromosome mutate(const Chromosome& parent, double rate, Rng& rng)
{
    return mutate_tracked(parent, rate, rng).child;
}

/// Decoded active subgraph.
struct Phenotype {
    /// Active node indices in ascending order, which is a valid evaluation order.
    std::vector<std::size_t> active_nodes;
    /// One flag per node.
    std::vector<std::uint8_t> node_active;
    std::size_t functional_size{};
    std::size_t active_links{};

    [[nodiscard]] bool is_active(std::size_t node) const noexcept { return node_active[node] != 0; }

    bool operator==(const Phenotype&) const = default;
};

/// Backward reachability from the output genes.
Phenotype decode(const Chromosome& chromosome);

/// True if the gene at `position` can influence the program outputs, i.e. it is
/// an output gene or belongs to an active node.
bool is_active_gene(const Phenotype& phenotype, const GenomeSpec& spec, std::size_t position) noexcept;

/// True if `child` differs from `parent` at some active gene of `parent`
/// among the given positions. When false, the child has the parent's phenotype.
bool changes_active_genes(const Chromosome& parent, const Phenotype& parent_phenotype, const Chromosome& child,
                          std::span<const std::size_t> positions) noexcept;

// Text records: "num_inputs num_nodes num_outputs node_arity function_set gene...",
// one chromosome per line.
std::string to_record(const Chromosome& chromosome);
Chromosome parse_record(std::string_view line);
void write_chromosomes(std::ostream& out, std::span<const Chromosome> chromosomes);
std::vector<Chromosome> read_chromosomes(std::istream& in);

} // namespace plcgp
