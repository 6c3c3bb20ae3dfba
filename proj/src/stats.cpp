#include "plcgp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace plcgp {

namespace {
    struct Ranked {
        // Twice the midrank of each pooled value, so ties stay integral.
        std::vector<std::int64_t> doubled_rank;
        double tie_term{}; // sum of t^3 - t over tie groups
    };

    Ranked rank_pooled(std::span<const double> pooled)
    {
        const auto n = pooled.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });

        Ranked r;
        r.doubled_rank.resize(n);
        for (std::size_t start = 0; start < n;) {
            auto end = start + 1;
            while (end < n && pooled[order[end]] == pooled[order[start]]) {
                ++end;
            }
            // 1-based ranks start+1 .. end share the midrank (start+1+end)/2.
            const auto doubled = static_cast<std::int64_t>(start + 1 + end);
            for (auto k = start; k < end; ++k) {
                r.doubled_rank[order[k]] = doubled;
            }
            const auto t = static_cast<double>(end - start);
            r.tie_term += t * t * t - t;
            start = end;
        }
        return r;
    }

    // P(|2U - n_a n_b| >= observed) under random assignment of the pooled ranks,
    // enumerating subsets of the smaller group by rank sum.
    double exact_p(const std::vector<std::int64_t>& doubled_rank, std::size_t m, std::int64_t observed_deviation,
                   std::size_t n_a, std::size_t n_b)
    {
        auto largest = doubled_rank;
        std::sort(largest.begin(), largest.end(), std::greater<>{});
        const auto max_sum = std::accumulate(largest.begin(), largest.begin() + static_cast<std::ptrdiff_t>(m),
                                             std::int64_t{0});
        const auto width = static_cast<std::size_t>(max_sum + 1);
        // ways[c][s]: number of c-subsets with doubled rank sum s.
        std::vector<std::vector<double>> ways(m + 1, std::vector<double>(width, 0.0));
        ways[0][0] = 1.0;
        for (std::size_t item = 0; item < doubled_rank.size(); ++item) {
            const auto r = static_cast<std::size_t>(doubled_rank[item]);
            for (std::size_t c = std::min(m, item + 1); c >= 1; --c) {
                auto& dst = ways[c];
                const auto& src = ways[c - 1];
                for (std::size_t s = width; s-- > r;) {
                    dst[s] += src[s - r];
                }
            }
        }
        const auto base = static_cast<std::int64_t>(m * (m + 1));
        const auto centre = static_cast<std::int64_t>(n_a * n_b);
        double total = 0.0;
        double extreme = 0.0;
        for (std::size_t s = 0; s < width; ++s) {
            const auto count = ways[m][s];
            if (count == 0.0) {
                continue;
            }
            total += count;
            const auto doubled_u = static_cast<std::int64_t>(s) - base;
            if (std::llabs(doubled_u - centre) >= observed_deviation) {
                extreme += count;
            }
        }
        return std::min(1.0, extreme / total);
    }
} // namespace

RankSumResult mann_whitney_u(std::span<const double> a, std::span<const double> b, RankSumMethod method)
{
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("rank-sum test needs two non-empty samples");
    }
    const auto n_a = a.size();
    const auto n_b = b.size();
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranked = rank_pooled(pooled);

    std::int64_t doubled_rank_sum_a = 0;
    for (std::size_t i = 0; i < n_a; ++i) {
        doubled_rank_sum_a += ranked.doubled_rank[i];
    }
    const auto doubled_u = doubled_rank_sum_a - static_cast<std::int64_t>(n_a * (n_a + 1));
    const auto deviation = std::llabs(doubled_u - static_cast<std::int64_t>(n_a * n_b));

    RankSumResult result;
    result.u = static_cast<double>(doubled_u) / 2.0;

    const bool use_exact =
        method == RankSumMethod::exact || (method == RankSumMethod::automatic && (n_a <= 8 || n_b <= 8));
    if (use_exact) {
        // Enumerate the smaller group; |U - mu| is the same for either group.
        result.p = exact_p(ranked.doubled_rank, std::min(n_a, n_b), deviation, n_a, n_b);
        result.exact = true;
        return result;
    }

    const auto na = static_cast<double>(n_a);
    const auto nb = static_cast<double>(n_b);
    const auto n = na + nb;
    const double variance = na * nb / 12.0 * ((n + 1.0) - ranked.tie_term / (n * (n - 1.0)));
    if (variance <= 0.0) {
        result.p = 1.0;
        return result;
    }
    const double z = std::max(0.0, static_cast<double>(deviation) / 2.0 - 0.5) / std::sqrt(variance);
    result.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return result;
}

double quantile(std::span<const double> values, double q)
{
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    if (sorted[lo] == sorted[hi]) {
        return sorted[lo];
    }
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median(std::span<const double> values)
{
    return quantile(values, 0.5);
}

double mean(std::span<const double> values)
{
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

} // namespace plcgp
