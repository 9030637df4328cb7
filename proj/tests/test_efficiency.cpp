#include "chillerbow/efficiency.hpp"
#include "chillerbow/syngen.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace chillerbow;

namespace {

struct Tick {
    double t_ht, t_mt, t_lt, q7, q6;
};

OnCycle efficiency_cycle(const std::vector<Tick>& ticks, std::string temp_unit = "degC")
{
    std::vector<ChannelSpec> schema = {{"T_HTsu", ChannelKind::temperature_supply, temp_unit},
                                       {"T_MTsu", ChannelKind::temperature_supply, temp_unit},
                                       {"T_LTre", ChannelKind::temperature_return, temp_unit},
                                       {"Q7_KW", ChannelKind::power, "kW"},
                                       {"Q6a_KW", ChannelKind::power, "kW"}};
    std::vector<Instant> ts;
    std::vector<double> values;
    for (std::size_t i = 0; i < ticks.size(); ++i) {
        ts.push_back(static_cast<Instant>(i) * 240);
        values.insert(values.end(), {ticks[i].t_ht, ticks[i].t_mt, ticks[i].t_lt, ticks[i].q7, ticks[i].q6});
    }
    TimeSeriesTable t(ts, schema, values);
    return make_cycle(t, 3, 0, ticks.size() - 1);
}

} // namespace

TEST(CopCarnot, HandArithmetic)
{
    double expected = (50.0 / 353.15) * (288.15 / 15.0);
    EXPECT_NEAR(cop_carnot(353.15, 303.15, 288.15), expected, 1e-12);
    EXPECT_NEAR(cop_carnot(353.15, 303.15, 288.15), 2.7198, 1e-3);
}

TEST(CopCarnot, ZeroNumerator)
{
    EXPECT_EQ(cop_carnot(303.15, 303.15, 288.15), 0.0);
}

TEST(CopCarnot, Guards)
{
    EXPECT_ERRC(cop_carnot(353.15, 288.155, 288.15), Errc::DivisionDegenerate);
    EXPECT_ERRC(cop_carnot(353.15, 288.15, 288.15), Errc::DivisionDegenerate);
    EXPECT_NO_THROW(cop_carnot(353.15, 288.17, 288.15));
    EXPECT_ERRC(cop_carnot(0.0, 303.15, 288.15), Errc::NonPhysicalTemperature);
    EXPECT_ERRC(cop_carnot(80.0, 30.0, -15.0), Errc::NonPhysicalTemperature);
}

TEST(CopCarnot, KelvinConversionMatters)
{
    double celsius = cop_carnot(80.0, 30.0, 15.0);
    double kelvin = cop_carnot(80.0 + kKelvinOffset, 30.0 + kKelvinOffset, 15.0 + kKelvinOffset);
    EXPECT_GT(std::abs(celsius - kelvin), 0.1);

    auto in_c = cycle_efficiency(efficiency_cycle({{80, 30, 15, 10, 20}}));
    auto in_k = cycle_efficiency(efficiency_cycle({{353.15, 303.15, 288.15, 10, 20}}, "K"));
    EXPECT_NEAR(in_c.cop_carnot, kelvin, 1e-12);
    EXPECT_NEAR(in_k.cop_carnot, kelvin, 1e-12);
}

TEST(CopTherm, Examples)
{
    EXPECT_EQ(cop_therm(10, 20), 0.5);
    EXPECT_EQ(cop_therm(0, 20), 0.0);
    EXPECT_ERRC(cop_therm(10, 0), Errc::ZeroDrivingHeat);
}

TEST(CycleEfficiency, ConstantPowerMatchesRatioOfMeans)
{
    auto e = cycle_efficiency(efficiency_cycle(std::vector<Tick>(6, {75, 30, 16, 9, 18})));
    EXPECT_NEAR(e.cop_therm, 9.0 / 18.0, 1e-15);
    EXPECT_NEAR(e.efficiency, e.cop_therm / e.cop_carnot, 1e-15);
    EXPECT_EQ(e.valid_ticks, 6u);
    EXPECT_EQ(e.cycle_id, 3);
}

TEST(CycleEfficiency, DegenerateTicksAreSkipped)
{
    auto e = cycle_efficiency(efficiency_cycle({{75, 16, 16, 9, 18}, {75, 30, 16, 9, 18}, {75, 30, 16, 9, 0}}));
    EXPECT_EQ(e.valid_ticks, 1u);
    EXPECT_NEAR(e.cop_carnot, cop_carnot(348.15, 303.15, 289.15), 1e-12);
}

TEST(CycleEfficiency, Errors)
{
    try {
        cycle_efficiency(efficiency_cycle({{75, 16, 16, 9, 18}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::AllTicksDegenerate);
        EXPECT_EQ(e.cycle_id(), 3);
    }
    EfficiencyChannels names;
    names.driving_power = "Q12_KW";
    EXPECT_ERRC(cycle_efficiency(efficiency_cycle({{75, 30, 16, 9, 18}}), {}, EfficiencyConvention::inverted, names),
                Errc::MissingChannel);
}

TEST(CycleEfficiency, Conventions)
{
    auto cycle = efficiency_cycle({{75, 30, 16, 9, 18}});
    auto inv = cycle_efficiency(cycle);
    auto raw = cycle_efficiency(cycle, {}, EfficiencyConvention::as_written);
    EXPECT_NEAR(inv.efficiency * raw.efficiency, 1.0, 1e-12);
    EXPECT_LE(inv.efficiency, 1.0);
}

TEST(Bands, Boundaries)
{
    EfficiencyBands bands;
    EXPECT_EQ(bands.classify(0.50), Band::good);
    EXPECT_EQ(bands.classify(0.4999), Band::average);
    EXPECT_EQ(bands.classify(0.30), Band::average);
    EXPECT_EQ(bands.classify(0.299), Band::bad);
    EXPECT_EQ(bands.classify(1.7), Band::good);
    EXPECT_EQ(bands.classify(-0.2), Band::bad);
    EXPECT_ERRC(bands.classify(std::nan("")), Errc::InvalidArgument);
    EXPECT_ERRC((EfficiencyBands{0.3, 0.5}.validate()), Errc::InvalidArgument);
}

TEST(Bands, TotalOverFiniteValues)
{
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(-2, 3);
    EfficiencyBands bands;
    for (int i = 0; i < 10000; ++i) {
        double e = u(rng);
        Band b = bands.classify(e);
        int hits = (e >= 0.5) + (e >= 0.3 && e < 0.5) + (e < 0.3);
        EXPECT_EQ(hits, 1);
        EXPECT_EQ(b, e >= 0.5 ? Band::good : (e < 0.3 ? Band::bad : Band::average));
    }
}

TEST(CycleEfficiency, GeneratedCyclesHitTarget)
{
    ScenarioSpec spec;
    spec.templates = three_class_templates(3);
    auto scenario = generate(spec);
    for (std::size_t i = 0; i < scenario.truth.cycles.size(); ++i) {
        const auto& t = scenario.truth.cycles[i];
        auto e = cycle_efficiency(make_cycle(scenario.table, static_cast<int>(i), t.start, t.end));
        EXPECT_NEAR(e.efficiency, t.target_efficiency, 0.02 * t.target_efficiency);
        EXPECT_LE(e.cop_therm, e.cop_carnot);
    }
}
