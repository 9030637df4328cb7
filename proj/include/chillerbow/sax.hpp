#pragma once

#include "chillerbow/error.hpp"
#include "chillerbow/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace chillerbow {

struct SaxConfig {
    Seconds chunk_period = 240;      ///< P, in seconds
    std::size_t paa_segments = 1;    ///< Q, PAA frames per chunk
    std::size_t alphabet_size = 20;  ///< a
    std::size_t word_length = 1;

    void validate(Seconds dt) const
    {
        if (alphabet_size < 2)
            throw Error(Errc::AlphabetTooSmall, "symbolic", "alphabet size " + std::to_string(alphabet_size));
        if (alphabet_size > 52)
            throw Error(Errc::InvalidArgument, "symbolic", "alphabet size above 52");
        if (paa_segments < 1 || word_length < 1)
            throw Error(Errc::InvalidArgument, "symbolic", "paa_segments and word_length must be >= 1");
        if (chunk_period <= 0 || (dt > 0 && chunk_period < dt))
            throw Error(Errc::InvalidArgument, "symbolic", "chunk period must be >= sampling interval");
    }
};

struct SymbolSequence {
    int cycle_id = 0;
    std::vector<int> symbols; ///< each in [0, alphabet_size)
    std::size_t alphabet_size = 0;

    bool operator==(const SymbolSequence&) const = default;
};

/// Z-normalization with the population standard deviation. A series whose
/// spread is at rounding level maps to all zeros.
inline std::vector<double> zscore(std::span<const double> series)
{
    if (series.empty())
        throw Error(Errc::EmptySeries, "symbolic", "zscore of empty series");
    const double n = static_cast<double>(series.size());
    double mean = 0;
    double scale = 0;
    for (double v : series) {
        mean += v;
        scale = std::max(scale, std::abs(v));
    }
    mean /= n;
    double var = 0;
    for (double v : series)
        var += (v - mean) * (v - mean);
    double sd = std::sqrt(var / n);

    std::vector<double> out(series.size(), 0.0);
    if (sd <= 8 * std::numeric_limits<double>::epsilon() * scale || sd == 0)
        return out;
    for (std::size_t i = 0; i < series.size(); ++i)
        out[i] = (series[i] - mean) / sd;
    return out;
}

/// Standard normal quantile: Acklam's rational approximation polished by one
/// Halley step against erfc (relative error near machine precision).
inline double normal_quantile(double p)
{
    if (!(p > 0 && p < 1))
        throw Error(Errc::InvalidArgument, "symbolic", "quantile probability outside (0, 1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549671667544010e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        double q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (p <= 1 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        double q = std::sqrt(-2 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
    return x - u / (1 + x * u / 2);
}

/// The a-1 cut points splitting N(0,1) into a equiprobable regions.
/// Exactly antisymmetric, with an exact 0 for even a.
inline std::vector<double> gaussian_breakpoints(std::size_t alphabet_size)
{
    if (alphabet_size < 2)
        throw Error(Errc::AlphabetTooSmall, "symbolic", "alphabet size " + std::to_string(alphabet_size));
    const std::size_t a = alphabet_size;
    std::vector<double> beta(a - 1);
    for (std::size_t i = 1; i < a; ++i) {
        if (2 * i == a)
            beta[i - 1] = 0.0;
        else if (2 * i < a)
            beta[i - 1] = normal_quantile(static_cast<double>(i) / static_cast<double>(a));
    }
    for (std::size_t i = 1; i < a; ++i)
        if (2 * i > a)
            beta[i - 1] = -beta[a - i - 1];
    return beta;
}

/// Index s of the region with beta[s-1] <= v < beta[s] (left-closed).
inline int symbol_for(double v, std::span<const double> breakpoints)
{
    return static_cast<int>(std::upper_bound(breakpoints.begin(), breakpoints.end(), v) - breakpoints.begin());
}

namespace detail {

// Sample k covers [k, k+1) on a continuous axis; frame i covers
// [i*n/F, (i+1)*n/F). Boundary samples contribute by overlap length.
inline std::vector<double> paa_weighted(std::span<const double> series, std::size_t frames)
{
    const double n = static_cast<double>(series.size());
    const double width = n / static_cast<double>(frames);
    std::vector<double> out(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        double lo = width * static_cast<double>(f);
        double hi = f + 1 == frames ? n : width * static_cast<double>(f + 1);
        auto k0 = static_cast<std::size_t>(std::floor(lo));
        double sum = 0;
        for (std::size_t k = k0; k < series.size() && static_cast<double>(k) < hi; ++k) {
            double overlap = std::min(hi, static_cast<double>(k + 1)) - std::max(lo, static_cast<double>(k));
            if (overlap > 0)
                sum += overlap * series[k];
        }
        out[f] = sum / (hi - lo);
    }
    return out;
}

} // namespace detail

/// Piecewise aggregate approximation into frame_count frames; samples that
/// straddle a frame boundary are weight-split between the two frames.
inline std::vector<double> paa(std::span<const double> series, std::size_t frame_count)
{
    if (frame_count == 0)
        throw Error(Errc::InvalidArgument, "symbolic", "frame count must be positive");
    if (frame_count > series.size())
        throw Error(Errc::TooManyFrames, "symbolic",
                    std::to_string(frame_count) + " frames for " + std::to_string(series.size()) + " samples");
    if (frame_count == series.size())
        return {series.begin(), series.end()};
    return detail::paa_weighted(series, frame_count);
}

/// Ticks per chunk: the chunk period rounded to whole sampling intervals.
inline std::size_t chunk_ticks(const SaxConfig& config, Seconds dt)
{
    if (dt <= 0)
        return 1;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(config.chunk_period) /
                                                                          static_cast<double>(dt))));
}

/**
 * @brief SAX transform of one channel of an ON cycle.
 *
 * Missing ticks are dropped, the remainder is z-scored over the cycle,
 * cut into consecutive chunks of the chunk period (the final partial chunk
 * is kept), each chunk is reduced to paa_segments frames and every frame is
 * mapped to its Gaussian breakpoint region.
 */
inline SymbolSequence symbolize(const OnCycle& cycle, std::string_view channel, const SaxConfig& config)
{
    config.validate(cycle.dt);
    const auto& raw = cycle.channel(channel);
    std::vector<double> present;
    present.reserve(raw.size());
    for (double v : raw)
        if (!is_missing(v))
            present.push_back(v);
    if (present.empty())
        throw Error(Errc::EmptyCycle, "symbolic", "no values on channel " + std::string(channel), cycle.cycle_id);

    auto z = zscore(present);
    auto beta = gaussian_breakpoints(config.alphabet_size);
    const std::size_t step = chunk_ticks(config, cycle.dt);

    SymbolSequence seq;
    seq.cycle_id = cycle.cycle_id;
    seq.alphabet_size = config.alphabet_size;
    for (std::size_t begin = 0; begin < z.size(); begin += step) {
        std::size_t len = std::min(step, z.size() - begin);
        auto chunk = std::span<const double>(z).subspan(begin, len);
        auto frames = config.paa_segments == len ? std::vector<double>(chunk.begin(), chunk.end())
                                                 : detail::paa_weighted(chunk, config.paa_segments);
        for (double v : frames)
            seq.symbols.push_back(symbol_for(v, beta));
    }
    return seq;
}

/// Letter string ('a' = 0) for alphabets up to 26 symbols, else an empty string.
inline std::string to_letters(std::span<const int> symbols, std::size_t alphabet_size)
{
    if (alphabet_size > 26)
        return {};
    std::string s;
    s.reserve(symbols.size());
    for (int v : symbols)
        s.push_back(static_cast<char>('a' + v));
    return s;
}

} // namespace chillerbow
