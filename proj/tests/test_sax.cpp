#include "chillerbow/sax.hpp"

#include "oracles.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace chillerbow;

namespace {

OnCycle cycle_of(const std::vector<double>& values, Seconds dt = 240)
{
    std::vector<Instant> ts;
    for (std::size_t i = 0; i < values.size(); ++i)
        ts.push_back(static_cast<Instant>(i) * dt);
    std::vector<ChannelSpec> schema = {{"x", ChannelKind::power, "kW"}};
    TimeSeriesTable t(ts, schema, values, dt);
    return make_cycle(t, 0, 0, values.size() - 1);
}

SaxConfig per_tick(std::size_t a)
{
    SaxConfig c;
    c.alphabet_size = a;
    return c;
}

double pop_mean(const std::vector<double>& v) { return oracle::mean(v); }

double pop_sd(const std::vector<double>& v)
{
    double m = pop_mean(v);
    double s = 0;
    for (double x : v)
        s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

} // namespace

TEST(ZScore, ConstantSeriesIsZero)
{
    std::vector<double> x = {5, 5, 5};
    EXPECT_EQ(zscore(x), (std::vector<double>{0, 0, 0}));
    std::vector<double> big = {0.1 + 0.2, 0.3, 0.30000000000000004};
    for (double v : zscore(big))
        EXPECT_EQ(v, 0.0);
}

TEST(ZScore, HandArithmetic)
{
    std::vector<double> x = {1, 2, 3};
    auto z = zscore(x);
    double s = std::sqrt(2.0 / 3.0);
    EXPECT_NEAR(z[0], -1.0 / s, 1e-12);
    EXPECT_DOUBLE_EQ(z[1], 0.0);
    EXPECT_NEAR(z[2], 1.0 / s, 1e-12);
    EXPECT_NEAR(z[2], 1.2247, 1e-4);
}

TEST(ZScore, MomentsAndIdempotence)
{
    std::mt19937_64 rng(1);
    std::lognormal_distribution<double> dist(1.0, 1.5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(2 + trial * 7);
        for (auto& v : x)
            v = dist(rng) * (trial % 2 ? 1e4 : 1e-3) - 3.0;
        auto z = zscore(x);
        EXPECT_NEAR(pop_mean(z), 0.0, 1e-9);
        EXPECT_NEAR(pop_sd(z), 1.0, 1e-9);
        auto zz = zscore(z);
        for (std::size_t i = 0; i < z.size(); ++i)
            EXPECT_NEAR(zz[i], z[i], 1e-12);
    }
}

TEST(ZScore, EmptyIsError)
{
    EXPECT_ERRC(zscore(std::vector<double>{}), Errc::EmptySeries);
}

TEST(Breakpoints, SmallAlphabets)
{
    EXPECT_EQ(gaussian_breakpoints(2), (std::vector<double>{0.0}));

    auto b3 = gaussian_breakpoints(3);
    ASSERT_EQ(b3.size(), 2u);
    EXPECT_NEAR(b3[0], -0.4307, 1e-3);
    EXPECT_NEAR(b3[1], 0.4307, 1e-3);

    auto b4 = gaussian_breakpoints(4);
    ASSERT_EQ(b4.size(), 3u);
    EXPECT_NEAR(b4[0], -0.6745, 1e-3);
    EXPECT_EQ(b4[1], 0.0);
    EXPECT_NEAR(b4[2], 0.6745, 1e-3);
}

TEST(Breakpoints, MatchBisectionOracle)
{
    for (std::size_t a = 2; a <= 52; ++a) {
        auto beta = gaussian_breakpoints(a);
        ASSERT_EQ(beta.size(), a - 1);
        for (std::size_t i = 1; i < a; ++i) {
            EXPECT_NEAR(beta[i - 1], oracle::normal_quantile(static_cast<double>(i) / static_cast<double>(a)), 1e-12)
                << "a=" << a << " i=" << i;
            if (i > 1) {
                EXPECT_LT(beta[i - 2], beta[i - 1]);
            }
            EXPECT_EQ(beta[i - 1], -beta[a - i - 1]);
        }
    }
}

TEST(Breakpoints, QuantileTails)
{
    for (double p : {1e-12, 1e-6, 0.01, 0.02425, 0.3, 0.5, 0.97575, 0.999999})
        EXPECT_NEAR(normal_quantile(p), oracle::normal_quantile(p), 1e-9 * std::max(1.0, std::abs(oracle::normal_quantile(p))));
    EXPECT_ERRC(normal_quantile(0.0), Errc::InvalidArgument);
    EXPECT_ERRC(gaussian_breakpoints(1), Errc::AlphabetTooSmall);
}

TEST(Breakpoints, LeftClosedRegions)
{
    auto beta = gaussian_breakpoints(4);
    EXPECT_EQ(symbol_for(-10.0, beta), 0);
    EXPECT_EQ(symbol_for(beta[0], beta), 1);
    EXPECT_EQ(symbol_for(0.0, beta), 2);
    EXPECT_EQ(symbol_for(std::nextafter(0.0, -1.0), beta), 1);
    EXPECT_EQ(symbol_for(10.0, beta), 3);
}

TEST(Paa, Examples)
{
    std::vector<double> x = {3, 1, 4, 1, 5};
    EXPECT_EQ(paa(x, 5), x);

    std::vector<double> halves = {1, 1, 3, 3};
    EXPECT_EQ(paa(halves, 2), (std::vector<double>{1, 3}));

    // Frame width 1.5: frame 0 = (1 + 0.5*2)/1.5, frame 1 = (0.5*2 + 3)/1.5.
    std::vector<double> three = {1, 2, 3};
    auto p = paa(three, 2);
    EXPECT_NEAR(p[0], 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(p[1], 8.0 / 3.0, 1e-12);

    EXPECT_ERRC(paa(three, 4), Errc::TooManyFrames);
    EXPECT_ERRC(paa(three, 0), Errc::InvalidArgument);
}

TEST(Paa, PreservesMeanAndMatchesTallyOracle)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 1 + trial % 37;
        std::size_t f = 1 + static_cast<std::size_t>(trial) % n;
        std::vector<double> x(n);
        for (auto& v : x)
            v = u(rng);
        auto frames = paa(x, f);
        ASSERT_EQ(frames.size(), f);
        EXPECT_NEAR(pop_mean(frames), pop_mean(x), 1e-12);

        // Upsample by f so every frame covers exactly n whole sub-samples.
        std::vector<double> fine;
        for (double v : x)
            fine.insert(fine.end(), f, v);
        for (std::size_t i = 0; i < f; ++i) {
            double s = 0;
            for (std::size_t k = i * n; k < (i + 1) * n; ++k)
                s += fine[k];
            EXPECT_NEAR(frames[i], s / static_cast<double>(n), 1e-12);
        }
    }
}

TEST(Symbolize, ConstantCycleMapsToMiddleRegion)
{
    auto seq = symbolize(cycle_of({7, 7, 7, 7}), "x", per_tick(4));
    EXPECT_EQ(seq.symbols, (std::vector<int>{2, 2, 2, 2}));
    EXPECT_EQ(seq.alphabet_size, 4u);
}

TEST(Symbolize, SignOfZScoreWithBinaryAlphabet)
{
    auto seq = symbolize(cycle_of({1, 2, 3, 4}), "x", per_tick(2));
    EXPECT_EQ(seq.symbols, (std::vector<int>{0, 0, 1, 1}));
    EXPECT_EQ(to_letters(seq.symbols, 2), "aabb");
}

TEST(Symbolize, RampIsNonDecreasing)
{
    std::vector<double> ramp;
    for (int i = 0; i < 100; ++i)
        ramp.push_back(std::exp(0.03 * i));
    for (std::size_t a : {2u, 5u, 20u, 52u}) {
        auto seq = symbolize(cycle_of(ramp), "x", per_tick(a));
        for (std::size_t i = 1; i < seq.symbols.size(); ++i)
            EXPECT_LE(seq.symbols[i - 1], seq.symbols[i]);
        auto z = zscore(ramp);
        auto expected_symbol = [a](double v) {
            int below = 0;
            for (std::size_t i = 1; i < a; ++i)
                below += oracle::normal_quantile(static_cast<double>(i) / static_cast<double>(a)) <= v;
            return below;
        };
        EXPECT_EQ(seq.symbols.front(), expected_symbol(z.front())) << "a=" << a;
        EXPECT_EQ(seq.symbols.back(), expected_symbol(z.back())) << "a=" << a;
    }
}

TEST(Symbolize, AffineInvariance)
{
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0, 1);
    std::uniform_real_distribution<double> scale(0.01, 100), shift(-1000, 1000);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(60);
        for (auto& v : x)
            v = g(rng);
        double alpha = scale(rng);
        double beta = shift(rng);
        std::vector<double> y;
        for (double v : x)
            y.push_back(alpha * v + beta);
        SaxConfig cfg = per_tick(20);
        cfg.chunk_period = 240 * (1 + trial % 4);
        cfg.paa_segments = 1 + trial % 2;
        EXPECT_EQ(symbolize(cycle_of(x), "x", cfg).symbols, symbolize(cycle_of(y), "x", cfg).symbols);
    }
}

TEST(Symbolize, OutputLengthFormula)
{
    for (std::size_t n = 1; n <= 30; ++n)
        for (Seconds period : {240, 480, 720, 1200})
            for (std::size_t q : {1u, 2u, 3u}) {
                SaxConfig cfg = per_tick(6);
                cfg.chunk_period = period;
                cfg.paa_segments = q;
                std::vector<double> x(n);
                for (std::size_t i = 0; i < n; ++i)
                    x[i] = std::sin(static_cast<double>(i));
                auto seq = symbolize(cycle_of(x), "x", cfg);
                auto chunks = (n * 240 + static_cast<std::size_t>(period) - 1) / static_cast<std::size_t>(period);
                EXPECT_EQ(seq.symbols.size(), chunks * q) << n << " " << period << " " << q;
                for (int s : seq.symbols) {
                    EXPECT_GE(s, 0);
                    EXPECT_LT(s, 6);
                }
            }
}

TEST(Symbolize, MissingTicksAreDropped)
{
    auto seq = symbolize(cycle_of({1, kMissing, 2, 3, 4}), "x", per_tick(2));
    EXPECT_EQ(seq.symbols, (std::vector<int>{0, 0, 1, 1}));
}

TEST(Symbolize, Errors)
{
    EXPECT_ERRC(symbolize(cycle_of({1, 2}), "y", per_tick(4)), Errc::UnknownChannel);
    EXPECT_ERRC(symbolize(cycle_of({kMissing, kMissing}), "x", per_tick(4)), Errc::EmptyCycle);
    EXPECT_ERRC(symbolize(cycle_of({1, 2}), "x", per_tick(1)), Errc::AlphabetTooSmall);
    SaxConfig short_period = per_tick(4);
    short_period.chunk_period = 60;
    EXPECT_ERRC(symbolize(cycle_of({1, 2}), "x", short_period), Errc::InvalidArgument);
}

TEST(Symbolize, ErrorCarriesCycleId)
{
    auto c = cycle_of({kMissing});
    c.cycle_id = 7;
    try {
        symbolize(c, "x", per_tick(4));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.cycle_id(), 7);
    }
}
