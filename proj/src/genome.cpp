#include "plcgp/genome.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "plcgp/error.hpp"

namespace plcgp {

std::string_view to_string(FunctionSetId id) noexcept
{
    switch (id) {
    case FunctionSetId::boolean:
        return "boolean";
    case FunctionSetId::real:
        return "real";
    }
    return "unknown";
}

FunctionSetId parse_function_set(std::string_view name)
{
    if (name == "boolean") {
        return FunctionSetId::boolean;
    }
    if (name == "real") {
        return FunctionSetId::real;
    }
    throw ConfigError(fmt::format("unknown function set '{}'", name));
}

std::size_t GenomeSpec::function_count() const noexcept
{
    // Both sets hold four binary operators.
    return 4;
}

void GenomeSpec::validate() const
{
    if (num_inputs == 0 || num_nodes == 0 || num_outputs == 0) {
        throw ConfigError(fmt::format("genome spec needs at least one input, node and output (got {}/{}/{})",
                                      num_inputs, num_nodes, num_outputs));
    }
    if (node_arity != kNodeArity) {
        throw ConfigError(fmt::format("node arity must be {} (got {})", kNodeArity, node_arity));
    }
}

GeneRole gene_role(const GenomeSpec& spec, std::size_t position) noexcept
{
    const auto node_genes = spec.num_nodes * spec.genes_per_node();
    if (position >= node_genes) {
        return GeneRole::output;
    }
    return position % spec.genes_per_node() == 0 ? GeneRole::function : GeneRole::input;
}

Gene gene_bound(const GenomeSpec& spec, std::size_t position) noexcept
{
    switch (gene_role(spec, position)) {
    case GeneRole::function:
        return static_cast<Gene>(spec.function_count());
    case GeneRole::input:
        return static_cast<Gene>(spec.num_inputs + gene_node(spec, position));
    case GeneRole::output:
        return static_cast<Gene>(spec.address_count());
    }
    return 0;
}

Chromosome::Chromosome(GenomeSpec spec, std::vector<Gene> genes) : spec_(spec), genes_(std::move(genes))
{
    spec_.validate();
    if (genes_.size() != spec_.gene_count()) {
        throw ConfigError(fmt::format("chromosome has {} genes, spec requires {}", genes_.size(), spec_.gene_count()));
    }
    for (std::size_t i = 0; i < genes_.size(); ++i) {
        if (genes_[i] >= gene_bound(spec_, i)) {
            throw ConfigError(fmt::format("gene {} = {} outside [0, {})", i, genes_[i], gene_bound(spec_, i)));
        }
    }
}

Chromosome Chromosome::with_gene(std::size_t position, Gene value) const
{
    if (position >= genes_.size() || value >= gene_bound(spec_, position)) {
        throw ConfigError(fmt::format("cannot set gene {} to {}", position, value));
    }
    auto genes = genes_;
    genes[position] = value;
    return {spec_, std::move(genes), Unchecked{}};
}

namespace {
    Gene draw_gene(const GenomeSpec& spec, std::size_t position, Rng& rng)
    {
        std::uniform_int_distribution<Gene> dist(0, gene_bound(spec, position) - 1);
        return dist(rng);
    }
} // namespace

Chromosome random_chromosome(const GenomeSpec& spec, Rng& rng)
{
    spec.validate();
    std::vector<Gene> genes(spec.gene_count());
    for (std::size_t i = 0; i < genes.size(); ++i) {
        genes[i] = draw_gene(spec, i, rng);
    }
    return {spec, std::move(genes), Chromosome::Unchecked{}};
}

std::size_t mutation_count(std::size_t gene_count, double rate)
{
    if (!(rate > 0.0 && rate <= 1.0)) {
        throw ConfigError(fmt::format("mutation rate must lie in (0, 1], got {}", rate));
    }
    const auto k = static_cast<std::size_t>(std::llround(rate * static_cast<double>(gene_count)));
    return std::clamp<std::size_t>(k, 1, gene_count);
}

MutationResult mutate_tracked(const Chromosome& parent, double rate, Rng& rng)
{
    const auto n = parent.size();
    const auto k = mutation_count(n, rate);

    // Floyd's sampling of k distinct positions.
    std::vector<std::size_t> positions;
    positions.reserve(k);
    for (std::size_t j = n - k; j < n; ++j) {
        std::uniform_int_distribution<std::size_t> dist(0, j);
        const auto t = dist(rng);
        if (std::find(positions.begin(), positions.end(), t) == positions.end()) {
            positions.push_back(t);
        } else {
            positions.push_back(j);
        }
    }
    std::sort(positions.begin(), positions.end());

    auto genes = parent.genes_;
    for (auto p : positions) {
        genes[p] = draw_gene(parent.spec(), p, rng);
    }
    return {Chromosome(parent.spec(), std::move(genes), Chromosome::Unchecked{}), std::move(positions)};
}

Phenotype decode(const Chromosome& chromosome)
{
    const auto& spec = chromosome.spec();
    Phenotype phenotype;
    phenotype.node_active.assign(spec.num_nodes, 0);

    for (std::size_t o = 0; o < spec.num_outputs; ++o) {
        const auto address = chromosome.output(o);
        if (address >= spec.num_inputs) {
            phenotype.node_active[address - spec.num_inputs] = 1;
        }
    }
    // Inputs only reference lower addresses, so one descending sweep closes the set.
    for (std::size_t node = spec.num_nodes; node-- > 0;) {
        if (!phenotype.node_active[node]) {
            continue;
        }
        for (std::size_t slot = 0; slot < spec.node_arity; ++slot) {
            const auto address = chromosome.input(node, slot);
            if (address >= spec.num_inputs) {
                phenotype.node_active[address - spec.num_inputs] = 1;
            }
        }
    }
    for (std::size_t node = 0; node < spec.num_nodes; ++node) {
        if (phenotype.node_active[node]) {
            phenotype.active_nodes.push_back(node);
        }
    }
    phenotype.functional_size = phenotype.active_nodes.size();
    phenotype.active_links = phenotype.functional_size * spec.node_arity;
    return phenotype;
}

bool is_active_gene(const Phenotype& phenotype, const GenomeSpec& spec, std::size_t position) noexcept
{
    if (gene_role(spec, position) == GeneRole::output) {
        return true;
    }
    return phenotype.is_active(gene_node(spec, position));
}

bool changes_active_genes(const Chromosome& parent, const Phenotype& parent_phenotype, const Chromosome& child,
                          std::span<const std::size_t> positions) noexcept
{
    const auto parent_genes = parent.genes();
    const auto child_genes = child.genes();
    return std::any_of(positions.begin(), positions.end(), [&](std::size_t p) {
        return parent_genes[p] != child_genes[p] && is_active_gene(parent_phenotype, parent.spec(), p);
    });
}

std::string to_record(const Chromosome& chromosome)
{
    const auto& spec = chromosome.spec();
    auto out = fmt::format("{} {} {} {} {}", spec.num_inputs, spec.num_nodes, spec.num_outputs, spec.node_arity,
                           to_string(spec.function_set));
    for (auto g : chromosome.genes()) {
        fmt::format_to(std::back_inserter(out), " {}", g);
    }
    return out;
}

Chromosome parse_record(std::string_view line)
{
    std::istringstream in{std::string(line)};
    GenomeSpec spec;
    std::string set_name;
    if (!(in >> spec.num_inputs >> spec.num_nodes >> spec.num_outputs >> spec.node_arity >> set_name)) {
        throw ConfigError("malformed chromosome record header");
    }
    spec.function_set = parse_function_set(set_name);
    spec.validate();

    std::vector<Gene> genes;
    genes.reserve(spec.gene_count());
    long long value = 0;
    while (in >> value) {
        if (value < 0) {
            throw ConfigError(fmt::format("negative gene value {}", value));
        }
        genes.push_back(static_cast<Gene>(value));
    }
    if (!in.eof()) {
        throw ConfigError("malformed gene in chromosome record");
    }
    return {spec, std::move(genes)};
}

void write_chromosomes(std::ostream& out, std::span<const Chromosome> chromosomes)
{
    for (const auto& c : chromosomes) {
        out << to_record(c) << '\n';
    }
}

std::vector<Chromosome> read_chromosomes(std::istream& in)
{
    std::vector<Chromosome> result;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line.front() == '#') {
            continue;
        }
        result.push_back(parse_record(line));
    }
    return result;
}

} // namespace plcgp
