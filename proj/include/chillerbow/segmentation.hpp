#pragma once

#include "chillerbow/kmeans.hpp"
#include "chillerbow/timeseries.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace chillerbow {

/// Per-row operational state, true = ON.
struct StateMask {
    std::vector<bool> states;

    std::size_t size() const noexcept { return states.size(); }
    std::size_t on_count() const noexcept { return static_cast<std::size_t>(std::count(states.begin(), states.end(), true)); }
};

/**
 * @brief One contiguous operational segment of a table.
 *
 * Holds a copy of every channel over rows [start, end] of the source table so
 * later stages do not need the table itself.
 */
struct OnCycle {
    int cycle_id = 0;
    std::size_t start = 0;
    std::size_t end = 0;
    Seconds dt = 0;
    std::vector<Instant> timestamps;
    std::vector<ChannelSpec> channels;
    std::vector<std::vector<double>> data; ///< one sequence per channel

    std::size_t tick_count() const noexcept { return end - start + 1; }

    std::optional<std::size_t> channel_index(std::string_view name) const noexcept
    {
        for (std::size_t i = 0; i < channels.size(); ++i)
            if (channels[i].name == name)
                return i;
        return std::nullopt;
    }

    const std::vector<double>& channel(std::string_view name) const
    {
        if (auto idx = channel_index(name))
            return data[*idx];
        throw Error(Errc::UnknownChannel, "segmentation", std::string(name), cycle_id);
    }
};

/// Copies rows [start, end] of the table into a cycle.
inline OnCycle make_cycle(const TimeSeriesTable& table, int id, std::size_t start, std::size_t end)
{
    OnCycle c;
    c.cycle_id = id;
    c.start = start;
    c.end = end;
    c.dt = table.dt();
    auto ts = table.timestamps();
    c.timestamps.assign(ts.begin() + static_cast<std::ptrdiff_t>(start), ts.begin() + static_cast<std::ptrdiff_t>(end) + 1);
    c.channels.assign(table.channels().begin(), table.channels().end());
    c.data.assign(table.cols(), {});
    for (std::size_t col = 0; col < table.cols(); ++col) {
        auto& seq = c.data[col];
        seq.reserve(end - start + 1);
        for (std::size_t r = start; r <= end; ++r)
            seq.push_back(table.at(r, col));
    }
    return c;
}

/// Flow and power channels, the default features for state detection.
inline std::vector<std::string> default_state_features(const TimeSeriesTable& table)
{
    std::vector<std::string> names;
    for (const auto& c : table.channels())
        if (c.kind == ChannelKind::flow || c.kind == ChannelKind::power)
            names.push_back(c.name);
    return names;
}

/**
 * @brief Labels every row ON or OFF by 2-means over standardized features.
 *
 * Each feature channel is z-scored over the rows where all features are
 * present; those rows are clustered with k = 2 and the cluster whose centroid
 * has the larger mean standardized value is ON. Rows with a missing feature
 * are OFF. A table with fewer than two distinct feature vectors yields an
 * all-OFF mask.
 */
inline StateMask detect_states(const TimeSeriesTable& table, const KMeansConfig& config)
{
    if (config.k != 2)
        throw Error(Errc::InvalidArgument, "segmentation", "state detection uses k = 2");
    auto features = config.feature_channels.empty() ? default_state_features(table) : config.feature_channels;
    if (features.empty())
        throw Error(Errc::InvalidArgument, "segmentation", "no feature channels (table has no flow/power channels)");

    std::vector<std::size_t> cols;
    for (const auto& f : features)
        cols.push_back(table.require_channel(f));

    std::vector<std::size_t> complete;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        bool ok = true;
        for (auto c : cols)
            ok = ok && !is_missing(table.at(r, c));
        if (ok)
            complete.push_back(r);
    }
    if (complete.size() < 2)
        throw Error(Errc::NoCompleteRows, "segmentation",
                    std::to_string(complete.size()) + " rows with complete features");

    std::vector<Point> points(complete.size(), Point(cols.size()));
    for (std::size_t f = 0; f < cols.size(); ++f) {
        double mean = 0;
        for (auto r : complete)
            mean += table.at(r, cols[f]);
        mean /= static_cast<double>(complete.size());
        double var = 0;
        for (auto r : complete) {
            double d = table.at(r, cols[f]) - mean;
            var += d * d;
        }
        double sd = std::sqrt(var / static_cast<double>(complete.size()));
        for (std::size_t i = 0; i < complete.size(); ++i)
            points[i][f] = sd > 0 ? (table.at(complete[i], cols[f]) - mean) / sd : 0.0;
    }

    StateMask mask;
    mask.states.assign(table.rows(), false);
    KMeansResult km;
    try {
        km = kmeans(points, config);
    } catch (const Error& e) {
        if (e.code() == Errc::DegenerateInit)
            return mask;
        throw;
    }
    auto centroid_mean = [&](std::size_t c) {
        double s = 0;
        for (double v : km.centroids[c])
            s += v;
        return s / static_cast<double>(km.centroids[c].size());
    };
    std::size_t on_cluster = centroid_mean(1) > centroid_mean(0) ? 1 : 0;
    for (std::size_t i = 0; i < complete.size(); ++i)
        mask.states[complete[i]] = km.assignments[i] == on_cluster;
    return mask;
}

struct CycleOptions {
    std::size_t min_length = 3; ///< runs shorter than this many ticks are dropped
    /// Consecutive timestamps further apart than this split a run; 0 = 2 x dt.
    Seconds split_gap = 0;
};

/// Maximal ON runs, split at recording gaps, numbered in time order from 0.
inline std::vector<OnCycle> extract_cycles(const TimeSeriesTable& table, const StateMask& mask,
                                           const CycleOptions& options = {})
{
    if (mask.size() != table.rows())
        throw Error(Errc::InvalidArgument, "segmentation", "mask length does not match table");
    Seconds split_gap = options.split_gap > 0 ? options.split_gap : 2 * table.dt();
    auto ts = table.timestamps();
    std::size_t min_length = std::max<std::size_t>(1, options.min_length);

    std::vector<OnCycle> cycles;
    auto emit = [&](std::size_t start, std::size_t end) {
        if (end - start + 1 >= min_length)
            cycles.push_back(make_cycle(table, static_cast<int>(cycles.size()), start, end));
    };

    std::size_t r = 0;
    while (r < mask.size()) {
        if (!mask.states[r]) {
            ++r;
            continue;
        }
        std::size_t start = r;
        while (r + 1 < mask.size() && mask.states[r + 1]) {
            if (split_gap > 0 && ts[r + 1] - ts[r] > split_gap) {
                emit(start, r);
                start = r + 1;
            }
            ++r;
        }
        emit(start, r);
        ++r;
    }
    return cycles;
}

} // namespace chillerbow
