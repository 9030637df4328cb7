#pragma once

#include "chillerbow/efficiency.hpp"
#include "chillerbow/error.hpp"
#include "chillerbow/timeseries.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace chillerbow {

/**
 * Ramp-hold-decay envelope of the driving heat over one cycle, on the unit
 * interval u = t / (N - 1): linear rise from base to 1 over rise_fraction,
 * flat hold for hold_fraction, then exponential decay back toward base.
 * rise 0 / hold 1 gives a rectangular pulse.
 */
struct Waveform {
    double rise_fraction = 0.0;
    double hold_fraction = 1.0;
    double decay_rate = 3.0;
    double base_fraction = 0.3;

    double operator()(double u) const
    {
        const double r = rise_fraction;
        const double h = hold_fraction;
        if (u < r)
            return base_fraction + (1 - base_fraction) * u / r;
        if (u <= r + h || r + h >= 1)
            return 1.0;
        double v = (u - r - h) / (1 - r - h);
        return base_fraction + (1 - base_fraction) * std::exp(-decay_rate * v);
    }
};

struct CycleTemplate {
    int class_id = 0;
    std::size_t count = 1;
    std::size_t min_ticks = 40;
    std::size_t max_ticks = 60;
    double target_efficiency = 0.6;
    Waveform waveform;
    double peak_driving_kw = 20.0;
    double ht_flow_m3h = 3.0;
    double mt_flow_m3h = 6.0;
    double lt_flow_m3h = 2.5;
    double t_ht_supply = 75.0; ///< degC
    double t_mt_supply = 30.0; ///< degC
    double t_lt_return = 16.0; ///< degC
};

/// Rows [start_tick, start_tick + tick_count) of the regular grid are dropped.
struct GapSpec {
    std::size_t start_tick = 0;
    std::size_t tick_count = 0;
};

struct ScenarioSpec {
    std::uint64_t seed = 1;
    std::size_t day_count = 0; ///< 0 sizes the series to fit the schedule
    Seconds dt = 240;
    Instant start = 1277942400; ///< 2010-07-01T00:00:00Z
    std::vector<CycleTemplate> templates;
    std::vector<GapSpec> gaps;
    std::size_t idle_min_ticks = 20;
    std::size_t idle_max_ticks = 40;
    bool shuffle = true;
    /// Absolute Gaussian noise per channel name.
    std::map<std::string, double> noise_sigma;
    /// Noise as a fraction of each non-meter channel's noise-free range;
    /// added on top of noise_sigma.
    double noise_fraction = 0.0;
    double max_cop_therm = 2.0;

    void validate() const
    {
        if (dt <= 0)
            throw Error(Errc::InvalidArgument, "syngen", "dt must be positive");
        if (idle_min_ticks < 1 || idle_max_ticks < idle_min_ticks)
            throw Error(Errc::InvalidArgument, "syngen", "idle tick range invalid");
        if (noise_fraction < 0)
            throw Error(Errc::InvalidArgument, "syngen", "noise fraction must be >= 0");
        for (const auto& [name, s] : noise_sigma)
            if (!(s >= 0))
                throw Error(Errc::InvalidArgument, "syngen", "noise sigma for '" + name + "' must be >= 0");
        for (const auto& t : templates) {
            if (t.min_ticks < 2 || t.max_ticks < t.min_ticks)
                throw Error(Errc::InvalidArgument, "syngen", "cycle duration range invalid");
            if (!(t.target_efficiency > 0 && t.target_efficiency < 1.5))
                throw Error(Errc::InfeasibleTarget, "syngen", "target efficiency outside (0, 1.5)");
        }
    }
};

/// Chiller channel set: temperatures in degC, flows in m3/h, powers in kW,
/// cumulative electricity meters in kWh.
inline std::vector<ChannelSpec> chiller_schema()
{
    using K = ChannelKind;
    return {
        {"T_HTsu", K::temperature_supply, "degC"}, {"T_HTre", K::temperature_return, "degC"},
        {"T_MTsu", K::temperature_supply, "degC"}, {"T_MTre", K::temperature_return, "degC"},
        {"T_LTsu", K::temperature_supply, "degC"}, {"T_LTre", K::temperature_return, "degC"},
        {"Q6a_m3h", K::flow, "m3/h"},              {"Q12_m3h", K::flow, "m3/h"},
        {"Q7_m3h", K::flow, "m3/h"},               {"Q6a_KW", K::power, "kW"},
        {"Q12_KW", K::power, "kW"},                {"Q7_KW", K::power, "kW"},
        {"E6", K::energy_meter, "kWh"},            {"E7", K::energy_meter, "kWh"},
        {"E8", K::energy_meter, "kWh"},
    };
}

struct TruthCycle {
    std::size_t start = 0; ///< first table row
    std::size_t end = 0;   ///< last table row
    int class_id = 0;
    double target_efficiency = 0;
    double cop_carnot = 0; ///< noise-free value
    double cop_therm = 0;  ///< noise-free value
};

struct GroundTruth {
    std::vector<bool> on;
    std::vector<TruthCycle> cycles; ///< in time order
    std::vector<Gap> gaps;          ///< as detect_gaps should report them
};

struct Scenario {
    TimeSeriesTable table;
    GroundTruth truth;
};

namespace detail {

class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed)
        : rng_(seed)
    {
    }

    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::size_t uniform_int(std::size_t lo, std::size_t hi)
    {
        return lo + static_cast<std::size_t>(uniform() * static_cast<double>(hi - lo + 1));
    }

    /// Box-Muller; spelled out so streams match across standard libraries.
    double gaussian()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0;
        while (u1 <= 0)
            u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2 * std::log(u1));
        spare_ = r * std::sin(2 * M_PI * u2);
        has_spare_ = true;
        return r * std::cos(2 * M_PI * u2);
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0;
    bool has_spare_ = false;
};

} // namespace detail

/// Thermal COP the generator must realize to hit a target efficiency.
inline double required_cop_therm(const CycleTemplate& t, double max_cop_therm)
{
    double carnot;
    try {
        carnot = cop_carnot(t.t_ht_supply + kKelvinOffset, t.t_mt_supply + kKelvinOffset, t.t_lt_return + kKelvinOffset);
    } catch (const Error&) {
        throw Error(Errc::InfeasibleTarget, "syngen", "template temperatures give a degenerate Carnot COP");
    }
    double therm = t.target_efficiency * carnot;
    if (!(carnot > 0) || therm > max_cop_therm)
        throw Error(Errc::InfeasibleTarget, "syngen",
                    "target " + std::to_string(t.target_efficiency) + " needs thermal COP " + std::to_string(therm));
    return therm;
}

/**
 * @brief Deterministic synthetic chiller telemetry with ground truth.
 *
 * Cycles from the templates are laid out (optionally shuffled) with random
 * idle stretches between them. During a cycle flows are rectangular, the
 * driving heat follows the template waveform and the chilled-water power is
 * the driving heat times the thermal COP that realizes the target efficiency
 * against the template temperatures. Idle rows carry zero flow and power.
 */
inline Scenario generate(const ScenarioSpec& spec)
{
    spec.validate();
    detail::NoiseSource rng(spec.seed);

    std::vector<std::size_t> order;
    for (std::size_t t = 0; t < spec.templates.size(); ++t)
        for (std::size_t i = 0; i < spec.templates[t].count; ++i)
            order.push_back(t);
    if (spec.shuffle)
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform_int(0, i - 1)]);

    struct Placed {
        std::size_t tmpl, start, ticks;
        double therm;
    };
    std::vector<Placed> placed;
    std::size_t cursor = rng.uniform_int(spec.idle_min_ticks, spec.idle_max_ticks);
    for (auto t : order) {
        const auto& tpl = spec.templates[t];
        std::size_t ticks = rng.uniform_int(tpl.min_ticks, tpl.max_ticks);
        placed.push_back({t, cursor, ticks, required_cop_therm(tpl, spec.max_cop_therm)});
        cursor += ticks + rng.uniform_int(spec.idle_min_ticks, spec.idle_max_ticks);
    }
    std::size_t total = cursor;
    if (spec.day_count > 0) {
        std::size_t day_ticks = static_cast<std::size_t>(spec.day_count * 86400 / spec.dt);
        if (day_ticks < total)
            throw Error(Errc::InvalidArgument, "syngen",
                        "schedule needs " + std::to_string(total) + " ticks, " + std::to_string(spec.day_count) +
                            " days hold " + std::to_string(day_ticks));
        total = day_ticks;
    }

    auto schema = chiller_schema();
    const std::size_t cols = schema.size();
    enum Col { T_HTsu, T_HTre, T_MTsu, T_MTre, T_LTsu, T_LTre, Q6a_m3h, Q12_m3h, Q7_m3h, Q6a_KW, Q12_KW, Q7_KW, E6, E7, E8 };

    std::vector<double> grid(total * cols, 0.0);
    std::vector<bool> on(total, false);
    auto cell = [&](std::size_t r, int c) -> double& { return grid[r * cols + static_cast<std::size_t>(c)]; };
    for (std::size_t r = 0; r < total; ++r) {
        cell(r, T_HTsu) = 45.0;
        cell(r, T_HTre) = 45.0;
        cell(r, T_MTsu) = 26.0;
        cell(r, T_MTre) = 26.0;
        cell(r, T_LTsu) = 21.0;
        cell(r, T_LTre) = 21.0;
    }
    for (const auto& p : placed) {
        const auto& tpl = spec.templates[p.tmpl];
        for (std::size_t k = 0; k < p.ticks; ++k) {
            std::size_t r = p.start + k;
            double env = tpl.waveform(static_cast<double>(k) / static_cast<double>(p.ticks - 1));
            on[r] = true;
            double driving = tpl.peak_driving_kw * env;
            double chilled = p.therm * driving;
            cell(r, T_HTsu) = tpl.t_ht_supply;
            cell(r, T_HTre) = tpl.t_ht_supply - 5.0 * env;
            cell(r, T_MTsu) = tpl.t_mt_supply;
            cell(r, T_MTre) = tpl.t_mt_supply + 4.0 * env;
            cell(r, T_LTre) = tpl.t_lt_return;
            cell(r, T_LTsu) = tpl.t_lt_return - 3.0 * env;
            cell(r, Q6a_m3h) = tpl.ht_flow_m3h;
            cell(r, Q12_m3h) = tpl.mt_flow_m3h;
            cell(r, Q7_m3h) = tpl.lt_flow_m3h;
            cell(r, Q6a_KW) = driving;
            cell(r, Q7_KW) = chilled;
            cell(r, Q12_KW) = driving + chilled;
        }
    }
    // Meters integrate pump/auxiliary electricity: a small standby draw plus
    // an operating draw while ON.
    double meter[3] = {0, 0, 0};
    const double hours = static_cast<double>(spec.dt) / 3600.0;
    for (std::size_t r = 0; r < total; ++r) {
        const double draw[3] = {on[r] ? 0.4 : 0.02, on[r] ? 0.9 : 0.02, on[r] ? 0.3 : 0.02};
        for (int m = 0; m < 3; ++m) {
            meter[m] += draw[m] * hours;
            cell(r, E6 + m) = meter[m];
        }
    }

    // Noise, channel by channel in schema order.
    for (std::size_t c = 0; c < cols; ++c) {
        double sigma = 0;
        if (auto it = spec.noise_sigma.find(schema[c].name); it != spec.noise_sigma.end())
            sigma = it->second;
        if (spec.noise_fraction > 0 && schema[c].kind != ChannelKind::energy_meter) {
            double lo = grid[c], hi = grid[c];
            for (std::size_t r = 0; r < total; ++r) {
                lo = std::min(lo, grid[r * cols + c]);
                hi = std::max(hi, grid[r * cols + c]);
            }
            sigma += spec.noise_fraction * (hi - lo);
        }
        if (sigma > 0)
            for (std::size_t r = 0; r < total; ++r)
                grid[r * cols + c] += sigma * rng.gaussian();
    }

    // Drop gap rows and map grid rows to table rows.
    std::vector<bool> dropped(total, false);
    for (const auto& g : spec.gaps) {
        if (g.tick_count == 0 || g.start_tick == 0 || g.start_tick + g.tick_count >= total)
            throw Error(Errc::InvalidArgument, "syngen", "gap must lie strictly inside the series");
        for (std::size_t r = g.start_tick; r < g.start_tick + g.tick_count; ++r)
            dropped[r] = true;
    }
    std::vector<std::size_t> row_of(total, 0);
    std::vector<Instant> timestamps;
    std::vector<double> values;
    Scenario out;
    for (std::size_t r = 0; r < total; ++r) {
        row_of[r] = timestamps.size();
        if (dropped[r])
            continue;
        timestamps.push_back(spec.start + static_cast<Instant>(r) * spec.dt);
        values.insert(values.end(), grid.begin() + static_cast<std::ptrdiff_t>(r * cols),
                      grid.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols));
        out.truth.on.push_back(on[r]);
    }
    for (std::size_t i = 1; i < timestamps.size(); ++i)
        if (timestamps[i] - timestamps[i - 1] > spec.dt)
            out.truth.gaps.push_back({i - 1, i, timestamps[i] - timestamps[i - 1]});

    std::vector<std::size_t> by_time(placed.size());
    std::iota(by_time.begin(), by_time.end(), 0);
    std::sort(by_time.begin(), by_time.end(), [&](auto a, auto b) { return placed[a].start < placed[b].start; });
    for (auto i : by_time) {
        const auto& p = placed[i];
        const auto& tpl = spec.templates[p.tmpl];
        TruthCycle tc;
        tc.start = row_of[p.start];
        std::size_t last = p.start + p.ticks - 1;
        while (last > p.start && dropped[last])
            --last;
        tc.end = row_of[last];
        tc.class_id = tpl.class_id;
        tc.target_efficiency = tpl.target_efficiency;
        tc.cop_therm = p.therm;
        tc.cop_carnot = p.therm / tpl.target_efficiency;
        out.truth.cycles.push_back(tc);
    }
    out.table = TimeSeriesTable(std::move(timestamps), std::move(schema), std::move(values), spec.dt);
    return out;
}

inline nlohmann::json ground_truth_to_json(const GroundTruth& truth)
{
    nlohmann::json j;
    std::string mask;
    for (bool b : truth.on)
        mask.push_back(b ? '1' : '0');
    j["on_mask"] = mask;
    j["cycles"] = nlohmann::json::array();
    for (const auto& c : truth.cycles)
        j["cycles"].push_back({{"start", c.start},
                               {"end", c.end},
                               {"class_id", c.class_id},
                               {"target_efficiency", c.target_efficiency},
                               {"cop_carnot", c.cop_carnot},
                               {"cop_therm", c.cop_therm}});
    j["gaps"] = nlohmann::json::array();
    for (const auto& g : truth.gaps)
        j["gaps"].push_back({{"start_index", g.start_index}, {"end_index", g.end_index}, {"duration", g.duration}});
    return j;
}

/// Three well-separated cycle shapes: a fast rise with a long plateau, a slow
/// linear ramp, and a short peak with a long decay tail. Targets sit inside
/// the good / average / bad efficiency bands.
inline std::vector<CycleTemplate> three_class_templates(std::size_t per_class = 5)
{
    CycleTemplate plateau;
    plateau.class_id = 0;
    plateau.count = per_class;
    plateau.min_ticks = 100;
    plateau.max_ticks = 160;
    plateau.target_efficiency = 0.6;
    plateau.waveform = {0.05, 0.85, 4.0, 0.3};
    plateau.peak_driving_kw = 22.0;

    CycleTemplate ramp = plateau;
    ramp.class_id = 1;
    ramp.target_efficiency = 0.4;
    ramp.waveform = {0.95, 0.05, 4.0, 0.3};
    ramp.peak_driving_kw = 21.0;
    ramp.t_ht_supply = 70.0;

    CycleTemplate decay = plateau;
    decay.class_id = 2;
    decay.target_efficiency = 0.2;
    decay.waveform = {0.03, 0.02, 8.0, 0.3};
    decay.peak_driving_kw = 20.0;
    decay.t_ht_supply = 65.0;
    decay.min_ticks = 70;
    decay.max_ticks = 120;

    return {plateau, ramp, decay};
}

/// One class of rectangular pulses: constant flows and power while ON.
inline std::vector<CycleTemplate> pulse_templates(std::size_t count = 5)
{
    CycleTemplate pulse;
    pulse.count = count;
    pulse.waveform = {0.0, 1.0, 0.0, 1.0};
    return {pulse};
}

} // namespace chillerbow
