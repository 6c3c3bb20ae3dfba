#include "plcgp/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "plcgp/error.hpp"

namespace plcgp {

namespace {
    std::string_view trim(std::string_view s)
    {
        const auto first = s.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) {
            return {};
        }
        const auto last = s.find_last_not_of(" \t\r");
        return s.substr(first, last - first + 1);
    }

    template <typename T>
    T parse_unsigned(std::string_view key, std::string_view value)
    {
        T out{};
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc{} || ptr != value.data() + value.size()) {
            throw ConfigError(fmt::format("{}: expected a non-negative integer, got '{}'", key, value));
        }
        return out;
    }

    double parse_double(std::string_view key, std::string_view value)
    {
        // from_chars for double is missing from older standard libraries.
        const std::string text(value);
        std::size_t used = 0;
        double out = 0.0;
        try {
            out = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size()) {
            throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, value));
        }
        return out;
    }

    bool parse_bool(std::string_view key, std::string_view value)
    {
        if (value == "true" || value == "1" || value == "yes" || value == "on") {
            return true;
        }
        if (value == "false" || value == "0" || value == "no" || value == "off") {
            return false;
        }
        throw ConfigError(fmt::format("{}: expected a boolean, got '{}'", key, value));
    }

    std::string bool_text(bool b)
    {
        return b ? "true" : "false";
    }
} // namespace

void ExperimentConfig::validate() const
{
    policy.validate();
    if (num_nodes == 0) {
        throw ConfigError("genome.nodes must be positive");
    }
    if (replications == 0) {
        throw ConfigError("run.replications must be positive");
    }
    switch (problem.kind) {
    case ProblemKind::parity:
        if (problem.parity_bits < 2 || problem.parity_bits > 16) {
            throw ConfigError(fmt::format("problem.bits must lie in 2..16, got {}", problem.parity_bits));
        }
        break;
    case ProblemKind::dynamic:
        if (problem.dynamic_inputs == 0 || problem.dynamic_inputs > 16) {
            throw ConfigError(fmt::format("problem.dynamic_inputs must lie in 1..16, got {}", problem.dynamic_inputs));
        }
        if (problem.epochs == 0 || problem.epoch_length == 0) {
            throw ConfigError("problem.epochs and problem.epoch_length must be positive");
        }
        if (problem.flips > (std::size_t{1} << problem.dynamic_inputs)) {
            throw ConfigError("problem.flips exceeds the number of patterns");
        }
        break;
    case ProblemKind::pagie:
        break;
    }
    if (problem.kind != ProblemKind::dynamic && budget < policy.lambda) {
        throw ConfigError(fmt::format("run.budget {} is smaller than es.lambda {}", budget, policy.lambda));
    }
}

KeyValues to_key_values(const ExperimentConfig& c)
{
    return {
        {"problem.kind", std::string(to_string(c.problem.kind))},
        {"problem.bits", fmt::format("{}", c.problem.parity_bits)},
        {"problem.dynamic_inputs", fmt::format("{}", c.problem.dynamic_inputs)},
        {"problem.epochs", fmt::format("{}", c.problem.epochs)},
        {"problem.epoch_length", fmt::format("{}", c.problem.epoch_length)},
        {"problem.flips", fmt::format("{}", c.problem.flips)},
        {"problem.sampling", std::string(to_string(c.problem.sampling))},
        {"genome.nodes", fmt::format("{}", c.num_nodes)},
        {"es.lambda", fmt::format("{}", c.policy.lambda)},
        {"es.prefer_larger", bool_text(c.policy.prefer_larger)},
        {"es.quasi_band", fmt::format("{}", c.policy.quasi_band)},
        {"es.adaptive_mutation", bool_text(c.policy.adaptive_mutation)},
        {"es.mutation_rate", fmt::format("{}", c.policy.initial_mutation_rate)},
        {"es.min_mutation_rate", fmt::format("{}", c.policy.min_mutation_rate)},
        {"es.max_mutation_rate", fmt::format("{}", c.policy.max_mutation_rate)},
        {"run.replications", fmt::format("{}", c.replications)},
        {"run.budget", fmt::format("{}", c.budget)},
        {"run.seed", fmt::format("{}", c.base_seed)},
        {"run.workers", fmt::format("{}", c.workers)},
        {"run.output_dir", c.output_dir},
        {"run.traces", bool_text(c.record_traces)},
    };
}

void apply_key_value(ExperimentConfig& c, std::string_view key, std::string_view value)
{
    value = trim(value);
    if (key == "problem.kind") {
        c.problem.kind = parse_problem_kind(value);
    } else if (key == "problem.bits") {
        c.problem.parity_bits = parse_unsigned<std::size_t>(key, value);
    } else if (key == "problem.dynamic_inputs") {
        c.problem.dynamic_inputs = parse_unsigned<std::size_t>(key, value);
    } else if (key == "problem.epochs") {
        c.problem.epochs = parse_unsigned<std::size_t>(key, value);
    } else if (key == "problem.epoch_length") {
        c.problem.epoch_length = parse_unsigned<std::uint64_t>(key, value);
    } else if (key == "problem.flips") {
        c.problem.flips = parse_unsigned<std::size_t>(key, value);
    } else if (key == "problem.sampling") {
        c.problem.sampling = parse_sampling_mode(value);
    } else if (key == "genome.nodes") {
        c.num_nodes = parse_unsigned<std::size_t>(key, value);
    } else if (key == "es.lambda") {
        c.policy.lambda = parse_unsigned<std::size_t>(key, value);
    } else if (key == "es.prefer_larger") {
        c.policy.prefer_larger = parse_bool(key, value);
    } else if (key == "es.quasi_band") {
        c.policy.quasi_band = parse_double(key, value);
    } else if (key == "es.adaptive_mutation") {
        c.policy.adaptive_mutation = parse_bool(key, value);
    } else if (key == "es.mutation_rate") {
        c.policy.initial_mutation_rate = parse_double(key, value);
    } else if (key == "es.min_mutation_rate") {
        c.policy.min_mutation_rate = parse_double(key, value);
    } else if (key == "es.max_mutation_rate") {
        c.policy.max_mutation_rate = parse_double(key, value);
    } else if (key == "run.replications") {
        c.replications = parse_unsigned<std::size_t>(key, value);
    } else if (key == "run.budget") {
        c.budget = parse_unsigned<std::uint64_t>(key, value);
    } else if (key == "run.seed") {
        c.base_seed = parse_unsigned<std::uint64_t>(key, value);
    } else if (key == "run.workers") {
        c.workers = parse_unsigned<std::size_t>(key, value);
    } else if (key == "run.output_dir") {
        c.output_dir = std::string(value);
    } else if (key == "run.traces") {
        c.record_traces = parse_bool(key, value);
    } else {
        throw ConfigError(fmt::format("unknown configuration key '{}'", key));
    }
}

void write_config(std::ostream& out, const ExperimentConfig& config)
{
    for (const auto& [key, value] : to_key_values(config)) {
        out << key << " = " << value << '\n';
    }
}

ExperimentConfig read_config(std::istream& in, ExperimentConfig base)
{
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(fmt::format("line {}: expected 'key = value'", number));
        }
        apply_key_value(base, trim(text.substr(0, eq)), text.substr(eq + 1));
    }
    return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError(fmt::format("cannot open config file {}", path.string()));
    }
    return read_config(in, std::move(base));
}

} // namespace plcgp
