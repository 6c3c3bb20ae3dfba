#pragma once

/// @file config.hpp
/// Experiment configuration and its flat "section.key = value" text form.
/// Blank lines and lines starting with '#' are ignored.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "plcgp/genome.hpp"
#include "plcgp/problems.hpp"
#include "plcgp/selection.hpp"

namespace plcgp {

struct ProblemConfig {
    ProblemKind kind{ProblemKind::parity};
    std::size_t parity_bits{6};
    std::size_t dynamic_inputs{5};
    std::size_t epochs{10};
    std::uint64_t epoch_length{100'000};
    std::size_t flips{4};
    SamplingMode sampling{SamplingMode::random};

    bool operator==(const ProblemConfig&) const = default;
};

struct ExperimentConfig {
    ProblemConfig problem;
    std::size_t num_nodes{100};
    SelectionPolicy policy;
    std::size_t replications{30};
    std::uint64_t budget{1'000'000};
    std::uint64_t base_seed{1};
    /// 0 selects the hardware concurrency.
    std::size_t workers{0};
    /// Empty: nothing is written.
    std::string output_dir;
    bool record_traces{false};

    /// Throws ConfigError.
    void validate() const;

    bool operator==(const ExperimentConfig&) const = default;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Every key with its current value, in a fixed order.
KeyValues to_key_values(const ExperimentConfig& config);

/// Throws ConfigError on an unknown key or a malformed value.
void apply_key_value(ExperimentConfig& config, std::string_view key, std::string_view value);

void write_config(std::ostream& out, const ExperimentConfig& config);
/// Starts from `base` and applies every key found in the stream.
ExperimentConfig read_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

} // namespace plcgp
