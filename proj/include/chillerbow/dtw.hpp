#pragma once

#include "chillerbow/error.hpp"
#include "chillerbow/hcluster.hpp"
#include "chillerbow/parallel.hpp"
#include "chillerbow/sax.hpp"
#include "chillerbow/segmentation.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chillerbow {

enum class LocalCost { absolute, squared };
enum class ChannelPolicy { single_channel, sum_over_channels };

struct DtwConfig {
    std::optional<std::size_t> window; ///< Sakoe-Chiba radius in ticks; empty = unconstrained
    ChannelPolicy channel_policy = ChannelPolicy::single_channel;
    std::vector<std::string> channels; ///< one name for single_channel, one or more for sum_over_channels
    LocalCost local_cost = LocalCost::absolute;
};

namespace detail {

inline double local_cost(double a, double b, LocalCost kind) noexcept
{
    double d = a - b;
    return kind == LocalCost::absolute ? std::abs(d) : d * d;
}

} // namespace detail

/**
 * @brief DTW over multichannel sequences.
 *
 * x[c] and y[c] are channel c of the two sequences; the local cost of aligning
 * tick i with tick j is the sum of per-channel costs. With a window w only
 * cells with |i - j| <= w are reachable.
 */
inline double dtw_distance_multi(std::span<const std::vector<double>> x, std::span<const std::vector<double>> y,
                                 LocalCost cost, std::optional<std::size_t> window = std::nullopt)
{
    if (x.empty() || y.empty() || x.size() != y.size())
        throw Error(Errc::InvalidArgument, "dtw", "channel counts differ");
    const std::size_t n = x.front().size();
    const std::size_t m = y.front().size();
    if (n == 0 || m == 0)
        throw Error(Errc::EmptySequence, "dtw", "dtw of an empty sequence");
    for (std::size_t c = 0; c < x.size(); ++c)
        if (x[c].size() != n || y[c].size() != m)
            throw Error(Errc::InvalidArgument, "dtw", "channels of one sequence differ in length");
    if (window && (n > m ? n - m : m - n) > *window)
        throw Error(Errc::WindowInfeasible, "dtw",
                    "lengths " + std::to_string(n) + " and " + std::to_string(m) + " exceed window " +
                        std::to_string(*window));

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        std::fill(cur.begin(), cur.end(), inf);
        std::size_t lo = 1, hi = m;
        if (window) {
            lo = i > *window ? std::max<std::size_t>(1, i - *window) : 1;
            hi = std::min(m, i + *window);
        }
        for (std::size_t j = lo; j <= hi; ++j) {
            double c = 0;
            for (std::size_t ch = 0; ch < x.size(); ++ch)
                c += detail::local_cost(x[ch][i - 1], y[ch][j - 1], cost);
            double best = std::min({prev[j], cur[j - 1], prev[j - 1]});
            cur[j] = c + best;
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

inline double dtw_distance(std::span<const double> x, std::span<const double> y, LocalCost cost = LocalCost::absolute,
                           std::optional<std::size_t> window = std::nullopt)
{
    std::vector<std::vector<double>> xs{std::vector<double>(x.begin(), x.end())};
    std::vector<std::vector<double>> ys{std::vector<double>(y.begin(), y.end())};
    return dtw_distance_multi(xs, ys, cost, window);
}

inline double dtw_distance(std::span<const double> x, std::span<const double> y, const DtwConfig& config)
{
    return dtw_distance(x, y, config.local_cost, config.window);
}

/// Per-cycle z-scored channel data used by the DTW baseline. Ticks missing
/// any selected channel are dropped.
inline std::vector<std::vector<double>> dtw_features(const OnCycle& cycle, const DtwConfig& config)
{
    if (config.channels.empty())
        throw Error(Errc::InvalidArgument, "dtw", "no DTW channel configured");
    std::vector<std::string> names = config.channels;
    if (config.channel_policy == ChannelPolicy::single_channel)
        names.resize(1);

    std::vector<const std::vector<double>*> raw;
    for (const auto& name : names)
        raw.push_back(&cycle.channel(name));
    std::vector<std::vector<double>> kept(names.size());
    for (std::size_t t = 0; t < cycle.tick_count(); ++t) {
        bool ok = true;
        for (auto* r : raw)
            ok = ok && !is_missing((*r)[t]);
        if (!ok)
            continue;
        for (std::size_t c = 0; c < raw.size(); ++c)
            kept[c].push_back((*raw[c])[t]);
    }
    if (kept.front().empty())
        throw Error(Errc::EmptyCycle, "dtw", "no complete ticks", cycle.cycle_id);
    for (auto& k : kept)
        k = zscore(k);
    return kept;
}

/// All-pairs DTW distances between z-scored cycles.
inline DistanceMatrix dtw_matrix(std::span<const OnCycle> cycles, const DtwConfig& config, std::size_t workers = 1)
{
    if (cycles.empty())
        throw Error(Errc::EmptyInput, "dtw", "no cycles");
    std::vector<std::vector<std::vector<double>>> features(cycles.size());
    parallel_for(cycles.size(), workers, [&](std::size_t i) { features[i] = dtw_features(cycles[i], config); });

    const std::size_t n = cycles.size();
    DistanceMatrix m(n);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            pairs.emplace_back(i, j);
    std::vector<double> out(pairs.size());
    parallel_for(pairs.size(), workers, [&](std::size_t p) {
        auto [i, j] = pairs[p];
        try {
            out[p] = dtw_distance_multi(features[i], features[j], config.local_cost, config.window);
        } catch (const Error& e) {
            throw e.with_cycle(cycles[j].cycle_id);
        }
    });
    for (std::size_t p = 0; p < pairs.size(); ++p)
        m.set(pairs[p].first, pairs[p].second, out[p]);
    return m;
}

} // namespace chillerbow
