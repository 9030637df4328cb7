#pragma once

#include "chillerbow/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chillerbow {

/// Symmetric distances between n items stored as the condensed upper triangle
/// (row-major over i < j). d(i, i) is implicitly 0.
class DistanceMatrix {
public:
    DistanceMatrix() = default;

    explicit DistanceMatrix(std::size_t n)
        : n_(n)
        , d_(n < 2 ? 0 : n * (n - 1) / 2, 0.0)
    {
    }

    DistanceMatrix(std::size_t n, std::vector<double> condensed)
        : n_(n)
        , d_(std::move(condensed))
    {
        if (d_.size() != (n < 2 ? 0 : n * (n - 1) / 2))
            throw Error(Errc::InvalidArgument, "hcluster", "condensed vector has wrong length");
    }

    /// Builds from a full square matrix using its upper triangle.
    static DistanceMatrix from_square(const std::vector<std::vector<double>>& square)
    {
        DistanceMatrix m(square.size());
        for (std::size_t i = 0; i < square.size(); ++i)
            for (std::size_t j = i + 1; j < square.size(); ++j)
                m.set(i, j, square[i][j]);
        return m;
    }

    std::size_t size() const noexcept { return n_; }
    std::span<const double> condensed() const noexcept { return d_; }

    double operator()(std::size_t i, std::size_t j) const noexcept
    {
        if (i == j)
            return 0.0;
        return d_[offset(i, j)];
    }

    void set(std::size_t i, std::size_t j, double v) noexcept
    {
        if (i != j)
            d_[offset(i, j)] = v;
    }

    bool operator==(const DistanceMatrix&) const = default;

private:
    std::size_t offset(std::size_t i, std::size_t j) const noexcept
    {
        if (i > j)
            std::swap(i, j);
        return n_ * i - i * (i + 1) / 2 + (j - i - 1);
    }

    std::size_t n_ = 0;
    std::vector<double> d_;
};

enum class LinkageMethod { average, centroid, complete, median, single, ward, weighted };

inline constexpr std::array<LinkageMethod, 7> kAllLinkageMethods = {
    LinkageMethod::average, LinkageMethod::centroid, LinkageMethod::complete, LinkageMethod::median,
    LinkageMethod::single,  LinkageMethod::ward,     LinkageMethod::weighted};

constexpr std::string_view to_string(LinkageMethod m) noexcept
{
    switch (m) {
    case LinkageMethod::average: return "average";
    case LinkageMethod::centroid: return "centroid";
    case LinkageMethod::complete: return "complete";
    case LinkageMethod::median: return "median";
    case LinkageMethod::single: return "single";
    case LinkageMethod::ward: return "ward";
    case LinkageMethod::weighted: return "weighted";
    }
    return "average";
}

inline std::optional<LinkageMethod> parse_linkage_method(std::string_view s)
{
    for (auto m : kAllLinkageMethods)
        if (to_string(m) == s)
            return m;
    return std::nullopt;
}

/// Centroid, median and ward are defined on squared Euclidean distances.
constexpr bool uses_squared_distances(LinkageMethod m) noexcept
{
    return m == LinkageMethod::centroid || m == LinkageMethod::median || m == LinkageMethod::ward;
}

/// Methods whose merge heights never decrease.
constexpr bool is_monotone(LinkageMethod m) noexcept
{
    return m != LinkageMethod::centroid && m != LinkageMethod::median;
}

/// One agglomeration step. Leaves are nodes 0..n-1; merge k creates node n+k.
struct Merge {
    std::size_t left = 0;  ///< smaller node id
    std::size_t right = 0; ///< larger node id
    double height = 0;
    std::size_t size = 0;  ///< leaves under the new node

    bool operator==(const Merge&) const = default;
};

struct Dendrogram {
    std::size_t leaves = 0;
    std::vector<Merge> merges; ///< n - 1 entries in merge order
};

/**
 * @brief Lance-Williams distance from cluster (a u b) to c.
 *
 * dac, dbc, dab are in the method's working scale (squared for centroid,
 * median and ward).
 */
inline double lance_williams(LinkageMethod m, double dac, double dbc, double dab, double na, double nb, double nc)
{
    switch (m) {
    case LinkageMethod::single: return std::min(dac, dbc);
    case LinkageMethod::complete: return std::max(dac, dbc);
    case LinkageMethod::average: return (na * dac + nb * dbc) / (na + nb);
    case LinkageMethod::weighted: return 0.5 * (dac + dbc);
    case LinkageMethod::centroid:
        return (na * dac + nb * dbc) / (na + nb) - na * nb * dab / ((na + nb) * (na + nb));
    case LinkageMethod::median: return 0.5 * dac + 0.5 * dbc - 0.25 * dab;
    case LinkageMethod::ward: return ((na + nc) * dac + (nb + nc) * dbc - nc * dab) / (na + nb + nc);
    }
    return 0.0;
}

/**
 * @brief Agglomerative hierarchical clustering.
 *
 * Straightforward O(n^3) scan: each step merges the closest active pair
 * (ties go to the lexicographically smallest (smaller id, larger id) pair of
 * node ids) and updates distances with the Lance-Williams recurrence.
 * Centroid, median and ward work on squared distances and report heights
 * back on the input scale.
 */
inline Dendrogram linkage(const DistanceMatrix& dist, LinkageMethod method)
{
    const std::size_t n = dist.size();
    if (n < 2)
        throw Error(Errc::TooFewItems, "hcluster", "linkage needs at least 2 items, got " + std::to_string(n));
    for (double v : dist.condensed())
        if (!std::isfinite(v) || v < 0)
            throw Error(Errc::NonFiniteDistance, "hcluster", "distances must be finite and nonnegative");

    const bool squared = uses_squared_distances(method);
    std::vector<double> w(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) {
                double v = dist(i, j);
                w[i * n + j] = squared ? v * v : v;
            }

    std::vector<std::size_t> node(n);       // slot -> node id
    std::vector<std::size_t> size(n, 1);    // slot -> leaf count
    std::vector<bool> active(n, true);
    std::iota(node.begin(), node.end(), 0);

    Dendrogram tree;
    tree.leaves = n;
    tree.merges.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t best_a = n, best_b = n;
        double best = 0;
        std::pair<std::size_t, std::size_t> best_ids{};
        for (std::size_t a = 0; a < n; ++a) {
            if (!active[a])
                continue;
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!active[b])
                    continue;
                double v = w[a * n + b];
                std::pair<std::size_t, std::size_t> ids{std::min(node[a], node[b]), std::max(node[a], node[b])};
                if (best_a == n || v < best || (v == best && ids < best_ids)) {
                    best = v;
                    best_a = a;
                    best_b = b;
                    best_ids = ids;
                }
            }
        }

        const double na = static_cast<double>(size[best_a]);
        const double nb = static_cast<double>(size[best_b]);
        for (std::size_t c = 0; c < n; ++c) {
            if (!active[c] || c == best_a || c == best_b)
                continue;
            double v = lance_williams(method, w[best_a * n + c], w[best_b * n + c], best, na, nb,
                                      static_cast<double>(size[c]));
            w[best_a * n + c] = w[c * n + best_a] = v;
        }

        double height = squared ? std::sqrt(std::max(0.0, best)) : best;
        tree.merges.push_back({best_ids.first, best_ids.second, height, size[best_a] + size[best_b]});
        node[best_a] = n + step;
        size[best_a] += size[best_b];
        active[best_b] = false;
    }
    return tree;
}

/// Leaf ids under every node, indexed by node id (leaves first, then merges).
inline std::vector<std::vector<std::size_t>> node_members(const Dendrogram& tree)
{
    std::vector<std::vector<std::size_t>> members(tree.leaves + tree.merges.size());
    for (std::size_t i = 0; i < tree.leaves; ++i)
        members[i] = {i};
    for (std::size_t k = 0; k < tree.merges.size(); ++k) {
        auto& m = members[tree.leaves + k];
        m = members[tree.merges[k].left];
        m.insert(m.end(), members[tree.merges[k].right].begin(), members[tree.merges[k].right].end());
    }
    return members;
}

/// c(i, j) = height of the merge that first joins i and j.
inline DistanceMatrix cophenetic_distances(const Dendrogram& tree)
{
    DistanceMatrix c(tree.leaves);
    auto members = node_members(tree);
    for (const auto& m : tree.merges)
        for (auto i : members[m.left])
            for (auto j : members[m.right])
                c.set(i, j, m.height);
    return c;
}

/// Pearson correlation between two condensed distance vectors.
inline double cophenetic_correlation(const DistanceMatrix& original, const DistanceMatrix& coph)
{
    if (original.size() != coph.size())
        throw Error(Errc::InvalidArgument, "hcluster", "matrices differ in size");
    auto x = original.condensed();
    auto y = coph.condensed();
    if (x.empty())
        throw Error(Errc::ZeroVariance, "hcluster", "no pairs to correlate");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0)
        throw Error(Errc::ZeroVariance, "hcluster", "original distances are constant");
    if (syy == 0)
        throw Error(Errc::ZeroVariance, "hcluster", "cophenetic distances are constant");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Flat clusters from the first n - k merges. Labels are numbered by the
/// first leaf (in index order) that carries them.
inline std::vector<int> cut_tree(const Dendrogram& tree, std::size_t k)
{
    const std::size_t n = tree.leaves;
    if (k < 1 || k > n)
        throw Error(Errc::InvalidK, "hcluster", "k = " + std::to_string(k) + " for " + std::to_string(n) + " leaves");

    std::vector<std::size_t> parent(n + tree.merges.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t s = 0; s < n - k; ++s) {
        const auto& m = tree.merges[s];
        parent[find(m.left)] = n + s;
        parent[find(m.right)] = n + s;
    }

    std::vector<int> labels(n);
    std::map<std::size_t, int> label_of_root;
    for (std::size_t i = 0; i < n; ++i) {
        auto root = find(i);
        auto [it, inserted] = label_of_root.emplace(root, static_cast<int>(label_of_root.size()));
        labels[i] = it->second;
    }
    return labels;
}

/// Hubert-Arabie adjusted Rand index between two labelings of the same items.
inline double adjusted_rand_index(std::span<const int> a, std::span<const int> b)
{
    if (a.size() != b.size())
        throw Error(Errc::InvalidArgument, "hcluster", "labelings differ in length");
    const std::size_t n = a.size();
    std::map<std::pair<int, int>, double> table;
    std::map<int, double> rows, cols;
    for (std::size_t i = 0; i < n; ++i) {
        table[{a[i], b[i]}] += 1;
        rows[a[i]] += 1;
        cols[b[i]] += 1;
    }
    auto comb2 = [](double x) { return x * (x - 1) / 2; };
    double index = 0, sum_rows = 0, sum_cols = 0;
    for (auto& [_, v] : table)
        index += comb2(v);
    for (auto& [_, v] : rows)
        sum_rows += comb2(v);
    for (auto& [_, v] : cols)
        sum_cols += comb2(v);
    double total = comb2(static_cast<double>(n));
    double expected = total > 0 ? sum_rows * sum_cols / total : 0;
    double max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index == expected)
        return 1.0;
    return (index - expected) / (max_index - expected);
}

/// Plot geometry for a dendrogram: leaves left to right in depth-first
/// order, each merge drawn as a horizontal bar joined to its children.
struct DendrogramLayout {
    std::vector<std::size_t> leaf_order;
    struct Segment {
        double x0, y0, x1, y1;
    };
    std::vector<Segment> segments;
};

inline DendrogramLayout layout_dendrogram(const Dendrogram& tree)
{
    DendrogramLayout out;
    const std::size_t n = tree.leaves;
    if (tree.merges.empty()) {
        for (std::size_t i = 0; i < n; ++i)
            out.leaf_order.push_back(i);
        return out;
    }
    std::vector<double> x(n + tree.merges.size(), 0.0), y(n + tree.merges.size(), 0.0);

    std::vector<std::size_t> stack{n + tree.merges.size() - 1};
    while (!stack.empty()) {
        auto id = stack.back();
        stack.pop_back();
        if (id < n) {
            x[id] = static_cast<double>(out.leaf_order.size());
            out.leaf_order.push_back(id);
            continue;
        }
        const auto& m = tree.merges[id - n];
        stack.push_back(m.right);
        stack.push_back(m.left);
    }
    for (std::size_t k = 0; k < tree.merges.size(); ++k) {
        const auto& m = tree.merges[k];
        auto id = n + k;
        x[id] = 0.5 * (x[m.left] + x[m.right]);
        y[id] = m.height;
        out.segments.push_back({x[m.left], y[m.left], x[m.left], m.height});
        out.segments.push_back({x[m.right], y[m.right], x[m.right], m.height});
        out.segments.push_back({x[m.left], m.height, x[m.right], m.height});
    }
    return out;
}

} // namespace chillerbow
