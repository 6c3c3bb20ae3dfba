#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace plcgp {

enum class RankSumMethod : std::uint8_t { automatic, exact, asymptotic };

struct RankSumResult {
    /// U statistic of the first sample: rank sum minus n_a(n_a+1)/2.
    double u{};
    /// Two-sided p-value.
    double p{};
    bool exact{};
};

/// Two-sided Mann-Whitney U test with midranks for ties. `automatic` uses the
/// exact permutation distribution unless both samples have more than 8 values,
/// in which case it uses the tie-corrected normal approximation with
/// continuity correction. Throws std::invalid_argument on an empty sample.
RankSumResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                             RankSumMethod method = RankSumMethod::automatic);

/// Linear-interpolation quantile (type 7) of unsorted data; NaN when empty.
double quantile(std::span<const double> values, double q);
double median(std::span<const double> values);
double mean(std::span<const double> values);

} // namespace plcgp
