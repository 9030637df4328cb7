#pragma once

#include "chillerbow/error.hpp"
#include "chillerbow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace chillerbow {

using Point = std::vector<double>;

struct KMeansConfig {
    std::size_t k = 2;
    std::size_t max_iterations = 100;
    double tolerance = 1e-9;           ///< stop once no centroid moves further than this
    std::uint64_t seed = 42;
    std::vector<std::string> feature_channels; ///< used by detect_states; empty = defaults
    std::size_t workers = 1;

    void validate() const
    {
        if (k < 1)
            throw Error(Errc::InvalidArgument, "segmentation", "k must be >= 1");
        if (max_iterations < 1)
            throw Error(Errc::InvalidArgument, "segmentation", "max_iterations must be >= 1");
        if (!(tolerance >= 0))
            throw Error(Errc::InvalidArgument, "segmentation", "tolerance must be >= 0");
    }
};

struct KMeansResult {
    std::vector<std::size_t> assignments;
    std::vector<Point> centroids;
    /// Within-cluster SSE after each assignment step, in iteration order.
    std::vector<double> sse_history;
    std::size_t iterations = 0;
    bool converged = false;

    double sse() const { return sse_history.empty() ? 0.0 : sse_history.back(); }
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept
{
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::size_t nearest(std::span<const Point> centroids, std::span<const double> p, double& best_d)
{
    std::size_t best = 0;
    best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        double d = squared_distance(p, centroids[c]);
        if (d < best_d) { // strict: ties go to the lower index
            best_d = d;
            best = c;
        }
    }
    return best;
}

} // namespace detail

/// k-means++ seeding driven by a 64-bit Mersenne twister.
inline std::vector<Point> kmeans_plus_plus(std::span<const Point> points, std::size_t k, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<Point> centroids;
    auto first = static_cast<std::size_t>(detail::unit_draw(rng) * static_cast<double>(points.size()));
    centroids.push_back(points[std::min(first, points.size() - 1)]);

    std::vector<double> d2(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        d2[i] = detail::squared_distance(points[i], centroids[0]);

    while (centroids.size() < k) {
        double total = 0;
        for (double d : d2)
            total += d;
        double target = detail::unit_draw(rng) * total;
        std::size_t pick = points.size() - 1;
        double acc = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            acc += d2[i];
            if (d2[i] > 0 && acc > target) {
                pick = i;
                break;
            }
        }
        while (d2[pick] == 0 && pick > 0) // guard against rounding at the tail
            --pick;
        centroids.push_back(points[pick]);
        for (std::size_t i = 0; i < points.size(); ++i)
            d2[i] = std::min(d2[i], detail::squared_distance(points[i], centroids.back()));
    }
    return centroids;
}

/**
 * @brief Lloyd's k-means with k-means++ initialization.
 *
 * Iterates assignment and centroid update until no centroid moves by more
 * than config.tolerance or max_iterations is reached, then performs a final
 * assignment so every point sits with its nearest centroid. An emptied
 * cluster keeps its previous centroid. Results depend only on the input and
 * the seed, not on config.workers.
 */
inline KMeansResult kmeans(std::span<const Point> points, const KMeansConfig& config)
{
    config.validate();
    if (points.empty())
        throw Error(Errc::EmptyInput, "segmentation", "kmeans on empty point set");
    const std::size_t dim = points.front().size();
    for (const auto& p : points)
        if (p.size() != dim)
            throw Error(Errc::InvalidArgument, "segmentation", "points differ in dimension");

    {
        std::set<Point> distinct;
        for (const auto& p : points) {
            distinct.insert(p);
            if (distinct.size() >= config.k)
                break;
        }
        if (distinct.size() < config.k)
            throw Error(Errc::DegenerateInit, "segmentation",
                        std::to_string(distinct.size()) + " distinct points for k=" + std::to_string(config.k));
    }

    KMeansResult result;
    result.centroids = kmeans_plus_plus(points, config.k, config.seed);
    result.assignments.assign(points.size(), 0);
    std::vector<double> dist(points.size());

    auto assign = [&] {
        constexpr std::size_t block = 4096;
        std::size_t blocks = (points.size() + block - 1) / block;
        parallel_for(blocks, config.workers, [&](std::size_t b) {
            std::size_t end = std::min(points.size(), (b + 1) * block);
            for (std::size_t i = b * block; i < end; ++i)
                result.assignments[i] = detail::nearest(result.centroids, points[i], dist[i]);
        });
        double sse = 0;
        for (double d : dist)
            sse += d;
        return sse;
    };

    for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
        result.sse_history.push_back(assign());
        result.iterations = iter + 1;

        std::vector<Point> sums(config.k, Point(dim, 0.0));
        std::vector<std::size_t> counts(config.k, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            auto c = result.assignments[i];
            ++counts[c];
            for (std::size_t d = 0; d < dim; ++d)
                sums[c][d] += points[i][d];
        }
        double shift = 0;
        for (std::size_t c = 0; c < config.k; ++c) {
            if (counts[c] == 0)
                continue;
            for (auto& v : sums[c])
                v /= static_cast<double>(counts[c]);
            shift = std::max(shift, std::sqrt(detail::squared_distance(sums[c], result.centroids[c])));
            result.centroids[c] = std::move(sums[c]);
        }
        if (shift <= config.tolerance) {
            result.converged = true;
            break;
        }
    }
    double final_sse = assign();
    if (final_sse != result.sse_history.back())
        result.sse_history.push_back(final_sse);
    return result;
}

} // namespace chillerbow
