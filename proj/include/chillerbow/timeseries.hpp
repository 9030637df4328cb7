#pragma once

#include "chillerbow/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace chillerbow {

/// Seconds since the Unix epoch.
using Instant = std::int64_t;
/// Length of time in seconds.
using Seconds = std::int64_t;

enum class ChannelKind { temperature_supply, temperature_return, flow, power, energy_meter, other };

constexpr std::string_view to_string(ChannelKind k) noexcept
{
    switch (k) {
    case ChannelKind::temperature_supply: return "temperature_supply";
    case ChannelKind::temperature_return: return "temperature_return";
    case ChannelKind::flow: return "flow";
    case ChannelKind::power: return "power";
    case ChannelKind::energy_meter: return "energy_meter";
    case ChannelKind::other: return "other";
    }
    return "other";
}

inline std::optional<ChannelKind> parse_channel_kind(std::string_view s)
{
    for (auto k : {ChannelKind::temperature_supply, ChannelKind::temperature_return, ChannelKind::flow,
                   ChannelKind::power, ChannelKind::energy_meter, ChannelKind::other})
        if (to_string(k) == s)
            return k;
    return std::nullopt;
}

constexpr bool is_temperature(ChannelKind k) noexcept
{
    return k == ChannelKind::temperature_supply || k == ChannelKind::temperature_return;
}

inline bool is_temperature_unit(std::string_view unit) noexcept
{
    return unit == "degC" || unit == "K";
}

struct ChannelSpec {
    std::string name;
    ChannelKind kind = ChannelKind::other;
    std::string unit;

    bool operator==(const ChannelSpec&) const = default;
};

/// Missing cells are stored as quiet NaN.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) noexcept { return std::isnan(v); }

inline void validate_schema(std::span<const ChannelSpec> channels)
{
    std::unordered_set<std::string> seen;
    for (const auto& c : channels) {
        if (c.name.empty())
            throw Error(Errc::InvalidSchema, "timeseries-core", "channel name must be nonempty");
        if (c.name == "timestamp")
            throw Error(Errc::InvalidSchema, "timeseries-core", "'timestamp' is reserved");
        if (!seen.insert(c.name).second)
            throw Error(Errc::InvalidSchema, "timeseries-core", "duplicate channel '" + c.name + "'");
        if (is_temperature(c.kind) && !is_temperature_unit(c.unit))
            throw Error(Errc::InvalidSchema, "timeseries-core",
                        "temperature channel '" + c.name + "' has non-temperature unit '" + c.unit + "'");
    }
}

/**
 * @brief Timestamped multi-channel sensor matrix.
 *
 * Rows are time ticks (strictly increasing integer seconds), columns are
 * channels. Values are row-major. The table is immutable once built, so it
 * may be shared between threads for reading.
 */
class TimeSeriesTable {
public:
    TimeSeriesTable() = default;

    /// nominal_dt == 0 infers the interval from the timestamps.
    TimeSeriesTable(std::vector<Instant> timestamps, std::vector<ChannelSpec> channels,
                    std::vector<double> values, Seconds nominal_dt = 0)
        : timestamps_(std::move(timestamps))
        , channels_(std::move(channels))
        , values_(std::move(values))
    {
        validate_schema(channels_);
        if (values_.size() != timestamps_.size() * channels_.size())
            throw Error(Errc::InvalidArgument, "timeseries-core", "value matrix does not match shape");
        for (std::size_t i = 1; i < timestamps_.size(); ++i)
            if (timestamps_[i] <= timestamps_[i - 1])
                throw Error(Errc::InvalidArgument, "timeseries-core", "timestamps must be strictly increasing");
        if (nominal_dt < 0)
            throw Error(Errc::InvalidArgument, "timeseries-core", "negative nominal interval");
        dt_ = nominal_dt > 0 ? nominal_dt : median_spacing(timestamps_);
    }

    std::size_t rows() const noexcept { return timestamps_.size(); }
    std::size_t cols() const noexcept { return channels_.size(); }
    bool empty() const noexcept { return timestamps_.empty(); }

    std::span<const Instant> timestamps() const noexcept { return timestamps_; }
    std::span<const ChannelSpec> channels() const noexcept { return channels_; }
    std::span<const double> values() const noexcept { return values_; }

    /// Nominal sampling interval. Inferred as the median spacing unless given
    /// explicitly; 0 for an inferred single-row table.
    Seconds dt() const noexcept { return dt_; }

    double at(std::size_t row, std::size_t col) const noexcept { return values_[row * channels_.size() + col]; }

    std::span<const double> row(std::size_t r) const noexcept
    {
        return std::span<const double>(values_).subspan(r * channels_.size(), channels_.size());
    }

    std::optional<std::size_t> channel_index(std::string_view name) const noexcept
    {
        for (std::size_t i = 0; i < channels_.size(); ++i)
            if (channels_[i].name == name)
                return i;
        return std::nullopt;
    }

    std::size_t require_channel(std::string_view name) const
    {
        if (auto idx = channel_index(name))
            return *idx;
        throw Error(Errc::UnknownChannel, "timeseries-core", std::string(name));
    }

    std::vector<double> column(std::size_t col) const
    {
        std::vector<double> out(rows());
        for (std::size_t r = 0; r < rows(); ++r)
            out[r] = at(r, col);
        return out;
    }

    std::vector<double> column(std::string_view name) const { return column(require_channel(name)); }

    /// Cell-wise equality treating two missing markers as equal.
    bool operator==(const TimeSeriesTable& other) const
    {
        if (timestamps_ != other.timestamps_ || channels_ != other.channels_)
            return false;
        return std::equal(values_.begin(), values_.end(), other.values_.begin(), other.values_.end(),
                          [](double a, double b) { return (is_missing(a) && is_missing(b)) || a == b; });
    }

    static Seconds median_spacing(std::span<const Instant> ts)
    {
        if (ts.size() < 2)
            return 0;
        std::vector<Seconds> gaps(ts.size() - 1);
        for (std::size_t i = 1; i < ts.size(); ++i)
            gaps[i - 1] = ts[i] - ts[i - 1];
        auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
        std::nth_element(gaps.begin(), mid, gaps.end());
        if (gaps.size() % 2 == 1)
            return *mid;
        auto upper = *mid;
        auto lower = *std::max_element(gaps.begin(), mid);
        return (lower + upper) / 2;
    }

private:
    std::vector<Instant> timestamps_;
    std::vector<ChannelSpec> channels_;
    std::vector<double> values_;
    Seconds dt_ = 0;
};

struct Gap {
    std::size_t start_index = 0; ///< last row before the gap
    std::size_t end_index = 0;   ///< first row after the gap
    Seconds duration = 0;

    bool operator==(const Gap&) const = default;
};

struct GapReport {
    std::vector<Gap> gaps;
    double coverage_fraction = 1.0;
};

/// Reports every consecutive timestamp pair whose spacing exceeds max_gap.
inline GapReport detect_gaps(const TimeSeriesTable& table, Seconds max_gap)
{
    if (table.empty())
        throw Error(Errc::EmptyTable, "timeseries-core", "detect_gaps on empty table");
    if (max_gap < table.dt() || max_gap <= 0)
        throw Error(Errc::InvalidArgument, "timeseries-core", "max_gap must be >= dt");

    GapReport report;
    auto ts = table.timestamps();
    Seconds gap_span = 0;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        Seconds spacing = ts[i] - ts[i - 1];
        if (spacing > max_gap) {
            report.gaps.push_back({i - 1, i, spacing});
            gap_span += spacing;
        }
    }
    Seconds span = ts.back() - ts.front();
    if (span > 0)
        report.coverage_fraction = static_cast<double>(span - gap_span) / static_cast<double>(span);
    return report;
}

/// Copy of rows [start, end] (inclusive) restricted to the named channels, in the order given.
inline TimeSeriesTable slice(const TimeSeriesTable& table, std::size_t start, std::size_t end,
                             std::span<const std::string> channel_names)
{
    if (start > end || end >= table.rows())
        throw Error(Errc::IndexOutOfRange, "timeseries-core",
                    "slice [" + std::to_string(start) + ", " + std::to_string(end) + "] of " +
                        std::to_string(table.rows()) + " rows");
    std::vector<std::size_t> cols;
    std::vector<ChannelSpec> specs;
    for (const auto& name : channel_names) {
        auto idx = table.channel_index(name);
        if (!idx)
            throw Error(Errc::UnknownChannel, "timeseries-core", name);
        cols.push_back(*idx);
        specs.push_back(table.channels()[*idx]);
    }
    auto ts = table.timestamps();
    std::vector<Instant> out_ts(ts.begin() + static_cast<std::ptrdiff_t>(start),
                                ts.begin() + static_cast<std::ptrdiff_t>(end) + 1);
    std::vector<double> values;
    values.reserve(out_ts.size() * cols.size());
    for (std::size_t r = start; r <= end; ++r)
        for (auto c : cols)
            values.push_back(table.at(r, c));
    return TimeSeriesTable(std::move(out_ts), std::move(specs), std::move(values), table.dt());
}

inline std::vector<std::string> channel_names(const TimeSeriesTable& table)
{
    std::vector<std::string> names;
    for (const auto& c : table.channels())
        names.push_back(c.name);
    return names;
}

} // namespace chillerbow
