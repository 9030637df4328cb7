#pragma once

#include "chillerbow/error.hpp"
#include "chillerbow/segmentation.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace chillerbow {

inline constexpr double kKelvinOffset = 273.15;
/// Ticks with |T_MTsu - T_LTre| below this are skipped.
inline constexpr double kMinLiftKelvin = 0.01;

/**
 * Ideal (Carnot) COP of a heat-driven chiller from the hot supply, medium
 * (re-cooling) supply and chilled-water return temperatures, all in Kelvin:
 *
 *   ((T_hot - T_medium) / T_hot) * (T_low / (T_medium - T_low))
 */
inline double cop_carnot(double t_ht_supply, double t_mt_supply, double t_lt_return)
{
    if (!(t_ht_supply > 0 && t_mt_supply > 0 && t_lt_return > 0))
        throw Error(Errc::NonPhysicalTemperature, "perf-metrics", "temperatures must be > 0 K");
    double lift = t_mt_supply - t_lt_return;
    if (std::abs(lift) < kMinLiftKelvin)
        throw Error(Errc::DivisionDegenerate, "perf-metrics", "T_MTsu and T_LTre closer than 0.01 K");
    return ((t_ht_supply - t_mt_supply) / t_ht_supply) * (t_lt_return / lift);
}

/// Thermal COP: chilled-water power over driving heat.
inline double cop_therm(double q_chilled_kw, double q_driving_kw)
{
    if (!(q_driving_kw > 0))
        throw Error(Errc::ZeroDrivingHeat, "perf-metrics", "driving heat must be positive");
    return q_chilled_kw / q_driving_kw;
}

enum class Band { good, average, bad };

constexpr std::string_view to_string(Band b) noexcept
{
    switch (b) {
    case Band::good: return "good";
    case Band::average: return "average";
    case Band::bad: return "bad";
    }
    return "average";
}

struct EfficiencyBands {
    double good_min = 0.50;
    double bad_max = 0.30;

    void validate() const
    {
        if (!(0 <= bad_max && bad_max < good_min && good_min <= 1))
            throw Error(Errc::InvalidArgument, "perf-metrics", "bands need 0 <= bad_max < good_min <= 1");
    }

    /// [good_min, inf) good, [bad_max, good_min) average, below bad_max bad.
    Band classify(double efficiency) const
    {
        if (!std::isfinite(efficiency))
            throw Error(Errc::InvalidArgument, "perf-metrics", "efficiency is not finite");
        if (efficiency >= good_min)
            return Band::good;
        if (efficiency < bad_max)
            return Band::bad;
        return Band::average;
    }
};

/// inverted = thermal / Carnot (default); as_written = Carnot / thermal.
enum class EfficiencyConvention { inverted, as_written };

constexpr std::string_view to_string(EfficiencyConvention c) noexcept
{
    return c == EfficiencyConvention::inverted ? "inverted" : "as_written";
}

inline std::optional<EfficiencyConvention> parse_efficiency_convention(std::string_view s)
{
    if (s == "inverted")
        return EfficiencyConvention::inverted;
    if (s == "as_written")
        return EfficiencyConvention::as_written;
    return std::nullopt;
}

inline double efficiency_from(double carnot, double therm, EfficiencyConvention c)
{
    double num = c == EfficiencyConvention::inverted ? therm : carnot;
    double den = c == EfficiencyConvention::inverted ? carnot : therm;
    if (den == 0)
        throw Error(Errc::DivisionDegenerate, "perf-metrics", "efficiency denominator is zero");
    return num / den;
}

/// Channel names feeding the COP formulas.
struct EfficiencyChannels {
    std::string ht_supply = "T_HTsu";
    std::string mt_supply = "T_MTsu";
    std::string lt_return = "T_LTre";
    std::string chilled_power = "Q7_KW";
    std::string driving_power = "Q6a_KW";
};

struct CycleEfficiency {
    int cycle_id = 0;
    double cop_carnot = 0;
    double cop_therm = 0;
    double efficiency = 0;
    Band band = Band::average;
    std::size_t valid_ticks = 0;
};

inline double to_kelvin(double value, const ChannelSpec& spec)
{
    if (spec.unit == "degC")
        return value + kKelvinOffset;
    if (spec.unit == "K")
        return value;
    throw Error(Errc::InvalidSchema, "perf-metrics", "channel '" + spec.name + "' has no temperature unit");
}

/**
 * @brief Time-averaged COPs and efficiency band of one cycle.
 *
 * Carnot and thermal COP are evaluated per tick and averaged over the ticks
 * where every input is present, the Carnot expression is not degenerate and
 * driving heat is positive. Temperatures in degC are converted to Kelvin.
 */
inline CycleEfficiency cycle_efficiency(const OnCycle& cycle, const EfficiencyBands& bands = {},
                                        EfficiencyConvention convention = EfficiencyConvention::inverted,
                                        const EfficiencyChannels& names = {})
{
    bands.validate();
    auto require = [&](const std::string& name) -> std::size_t {
        if (auto idx = cycle.channel_index(name))
            return *idx;
        throw Error(Errc::MissingChannel, "perf-metrics", name, cycle.cycle_id);
    };
    auto ht = require(names.ht_supply);
    auto mt = require(names.mt_supply);
    auto lt = require(names.lt_return);
    auto q7 = require(names.chilled_power);
    auto q6 = require(names.driving_power);

    CycleEfficiency out;
    out.cycle_id = cycle.cycle_id;
    double carnot_sum = 0, therm_sum = 0;
    for (std::size_t t = 0; t < cycle.tick_count(); ++t) {
        double vals[] = {cycle.data[ht][t], cycle.data[mt][t], cycle.data[lt][t], cycle.data[q7][t], cycle.data[q6][t]};
        bool complete = true;
        for (double v : vals)
            complete = complete && !is_missing(v);
        if (!complete || !(vals[4] > 0))
            continue;
        double carnot;
        try {
            carnot = cop_carnot(to_kelvin(vals[0], cycle.channels[ht]), to_kelvin(vals[1], cycle.channels[mt]),
                                to_kelvin(vals[2], cycle.channels[lt]));
        } catch (const Error& e) {
            if (e.code() == Errc::DivisionDegenerate)
                continue;
            throw e.with_cycle(cycle.cycle_id);
        }
        carnot_sum += carnot;
        therm_sum += cop_therm(vals[3], vals[4]);
        ++out.valid_ticks;
    }
    if (out.valid_ticks == 0)
        throw Error(Errc::AllTicksDegenerate, "perf-metrics", "no tick yields a finite COP", cycle.cycle_id);

    out.cop_carnot = carnot_sum / static_cast<double>(out.valid_ticks);
    out.cop_therm = therm_sum / static_cast<double>(out.valid_ticks);
    try {
        out.efficiency = efficiency_from(out.cop_carnot, out.cop_therm, convention);
    } catch (const Error& e) {
        throw e.with_cycle(cycle.cycle_id);
    }
    out.band = bands.classify(out.efficiency);
    return out;
}

} // namespace chillerbow
