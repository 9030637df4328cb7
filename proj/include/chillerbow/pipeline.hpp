#pragma once

#include "chillerbow/bow.hpp"
#include "chillerbow/dtw.hpp"
#include "chillerbow/efficiency.hpp"
#include "chillerbow/hcluster.hpp"
#include "chillerbow/parallel.hpp"
#include "chillerbow/sax.hpp"
#include "chillerbow/segmentation.hpp"
#include "chillerbow/timeseries.hpp"
#include "chillerbow/timeseries_io.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace chillerbow {

struct PipelineConfig {
    std::string input;
    std::string schema;
    std::string timestamp_format = "epoch";

    KMeansConfig kmeans;
    CycleOptions cycle_options;
    /// Spacing above which detect_gaps reports a gap; 0 = 2 x dt.
    Seconds max_gap = 0;

    SaxConfig sax;
    std::string sax_channel = "Q6a_KW";
    BowMetric metric = BowMetric::euclidean;

    std::vector<LinkageMethod> methods{kAllLinkageMethods.begin(), kAllLinkageMethods.end()};

    bool run_dtw = true;
    DtwConfig dtw; ///< channels default to {sax_channel}

    EfficiencyBands bands;
    EfficiencyConvention convention = EfficiencyConvention::inverted;
    EfficiencyChannels efficiency_channels;

    std::size_t cut_k = 3;
    std::size_t workers = 1;
    std::string output_dir;
    bool dump_intermediates = true;

    DtwConfig effective_dtw() const
    {
        DtwConfig d = dtw;
        if (d.channels.empty())
            d.channels = {sax_channel};
        return d;
    }

    void validate() const
    {
        if (methods.empty())
            throw Error(Errc::InvalidArgument, "cli", "at least one linkage method is required");
        if (sax_channel.empty())
            throw Error(Errc::InvalidArgument, "cli", "a symbolization channel is required");
        if (cut_k < 1)
            throw Error(Errc::InvalidArgument, "cli", "cut k must be >= 1");
        bands.validate();
        kmeans.validate();
    }
};

// --- stage results ---------------------------------------------------------

struct SegmentationResult {
    Seconds dt = 0;
    StateMask mask;
    std::vector<OnCycle> cycles;
    GapReport gaps;
};

struct TransformResult {
    std::vector<SymbolSequence> symbols;
    Vocabulary vocabulary;
    std::vector<BowVector> bows;
};

struct MethodOutcome {
    LinkageMethod method = LinkageMethod::average;
    Dendrogram tree;
    std::optional<double> cophenetic; ///< empty when a distance vector has no variance
    std::vector<int> labels;          ///< cut at min(cut_k, n)
};

struct RepresentationOutcome {
    std::string name; ///< "bowr" or "dtw"
    std::vector<int> cycle_ids;
    DistanceMatrix distances;
    std::vector<MethodOutcome> methods;
};

struct CopheneticRow {
    std::string method;
    std::optional<double> bowr;
    std::optional<double> dtw;
};

struct RunReport {
    SegmentationResult segmentation;
    std::optional<TransformResult> transform;
    std::vector<std::optional<CycleEfficiency>> efficiency; ///< parallel to cycles
    std::optional<RepresentationOutcome> bowr;
    std::optional<RepresentationOutcome> dtw;
    std::vector<CopheneticRow> cophenetic_table;
    std::vector<std::string> notes;
};

// --- stages ----------------------------------------------------------------

inline SegmentationResult run_segmentation(const TimeSeriesTable& table, const PipelineConfig& config)
{
    SegmentationResult out;
    out.dt = table.dt();
    if (table.empty())
        throw Error(Errc::EmptyTable, "timeseries-core", "input has no rows");
    Seconds max_gap = config.max_gap > 0 ? config.max_gap : std::max<Seconds>(1, 2 * table.dt());
    out.gaps = detect_gaps(table, max_gap);
    KMeansConfig km = config.kmeans;
    km.workers = config.workers;
    out.mask = detect_states(table, km);
    out.cycles = extract_cycles(table, out.mask, config.cycle_options);
    return out;
}

/// Rebuilds cycles from stored spans (resume from a dumped segmentation).
inline std::vector<OnCycle> cycles_from_spans(const TimeSeriesTable& table,
                                              const std::vector<std::pair<std::size_t, std::size_t>>& spans)
{
    std::vector<OnCycle> cycles;
    for (const auto& [s, e] : spans) {
        if (s > e || e >= table.rows())
            throw Error(Errc::IndexOutOfRange, "segmentation", "cycle span outside table");
        cycles.push_back(make_cycle(table, static_cast<int>(cycles.size()), s, e));
    }
    return cycles;
}

inline TransformResult run_transform(std::span<const OnCycle> cycles, const PipelineConfig& config)
{
    TransformResult out;
    out.symbols.resize(cycles.size());
    parallel_for(cycles.size(), config.workers, [&](std::size_t i) {
        try {
            out.symbols[i] = symbolize(cycles[i], config.sax_channel, config.sax);
        } catch (const Error& e) {
            throw e.with_cycle(cycles[i].cycle_id);
        }
    });
    out.vocabulary = build_vocabulary(out.symbols, config.sax.word_length);
    out.bows.resize(cycles.size());
    parallel_for(cycles.size(), config.workers,
                 [&](std::size_t i) { out.bows[i] = build_bow(out.symbols[i], out.vocabulary, cycles[i].tick_count()); });
    return out;
}

inline DistanceMatrix bow_matrix(std::span<const BowVector> bows, BowMetric metric)
{
    DistanceMatrix m(bows.size());
    for (std::size_t i = 0; i < bows.size(); ++i)
        for (std::size_t j = i + 1; j < bows.size(); ++j)
            m.set(i, j, bow_distance(bows[i], bows[j], metric));
    return m;
}

/// Linkage, cophenetic correlation and flat cut for every configured method.
inline RepresentationOutcome cluster_representation(std::string name, std::vector<int> cycle_ids, DistanceMatrix distances,
                                                    const PipelineConfig& config)
{
    RepresentationOutcome out;
    out.name = std::move(name);
    out.cycle_ids = std::move(cycle_ids);
    out.distances = std::move(distances);
    out.methods.resize(config.methods.size());
    const std::size_t k = std::min(config.cut_k, out.distances.size());
    parallel_for(config.methods.size(), config.workers, [&](std::size_t m) {
        auto& o = out.methods[m];
        o.method = config.methods[m];
        o.tree = linkage(out.distances, o.method);
        try {
            o.cophenetic = cophenetic_correlation(out.distances, cophenetic_distances(o.tree));
        } catch (const Error& e) {
            if (e.code() != Errc::ZeroVariance)
                throw;
        }
        o.labels = cut_tree(o.tree, k);
    });
    return out;
}

inline std::vector<CopheneticRow> cophenetic_table(const std::vector<LinkageMethod>& methods,
                                                   const std::optional<RepresentationOutcome>& bowr,
                                                   const std::optional<RepresentationOutcome>& dtw)
{
    std::vector<CopheneticRow> rows;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        CopheneticRow row;
        row.method = std::string(to_string(methods[m]));
        if (bowr)
            row.bowr = bowr->methods[m].cophenetic;
        if (dtw)
            row.dtw = dtw->methods[m].cophenetic;
        rows.push_back(row);
    }
    return rows;
}

/**
 * @brief Analysis downstream of segmentation.
 *
 * efficiency -> symbolize -> bag of words -> linkage per method -> cophenetic
 * correlation, plus the DTW branch over the same cycles. A precomputed
 * transform (from a dumped intermediate) is used as-is. Numeric results do
 * not depend on config.workers.
 */
inline RunReport analyze_from(const TimeSeriesTable& table, SegmentationResult segmentation,
                              std::optional<TransformResult> transform, const PipelineConfig& config)
{
    config.validate();
    RunReport report;
    report.segmentation = std::move(segmentation);
    const auto& cycles = report.segmentation.cycles;

    if (cycles.empty()) {
        report.notes.push_back("no ON cycles detected; clustering skipped");
        return report;
    }

    const auto& ec = config.efficiency_channels;
    bool has_efficiency_channels = true;
    for (const auto* name : {&ec.ht_supply, &ec.mt_supply, &ec.lt_return, &ec.chilled_power, &ec.driving_power})
        has_efficiency_channels = has_efficiency_channels && table.channel_index(*name).has_value();
    report.efficiency.resize(cycles.size());
    if (has_efficiency_channels) {
        parallel_for(cycles.size(), config.workers, [&](std::size_t i) {
            report.efficiency[i] = cycle_efficiency(cycles[i], config.bands, config.convention, ec);
        });
    } else {
        report.notes.push_back("efficiency skipped: table lacks one of the COP input channels");
    }

    if (transform) {
        if (transform->bows.size() != cycles.size())
            throw Error(Errc::InvalidArgument, "bowr", "transform does not match the cycle list");
        report.transform = std::move(transform);
    } else {
        report.transform = run_transform(cycles, config);
    }

    if (cycles.size() < 2) {
        report.notes.push_back("fewer than two ON cycles; clustering skipped");
        return report;
    }

    std::vector<int> ids;
    for (const auto& c : cycles)
        ids.push_back(c.cycle_id);
    report.bowr = cluster_representation("bowr", ids, bow_matrix(report.transform->bows, config.metric), config);
    if (config.run_dtw)
        report.dtw = cluster_representation("dtw", ids, dtw_matrix(cycles, config.effective_dtw(), config.workers), config);
    report.cophenetic_table = cophenetic_table(config.methods, report.bowr, report.dtw);
    for (const auto& row : report.cophenetic_table)
        if ((report.bowr && !row.bowr) || (report.dtw && !row.dtw))
            report.notes.push_back("cophenetic correlation undefined (zero variance) for method " + row.method);
    return report;
}

/// Full batch analysis of one table: segmentation followed by analyze_from.
inline RunReport analyze(const TimeSeriesTable& table, const PipelineConfig& config)
{
    config.validate();
    return analyze_from(table, run_segmentation(table, config), std::nullopt, config);
}

// --- method comparison -----------------------------------------------------

struct RankedMethod {
    std::string method;
    double cophenetic = 0;
};

struct MethodRanking {
    std::vector<RankedMethod> bowr; ///< best first
    std::vector<RankedMethod> dtw;
    std::string best_representation;
    std::string best_method;
    double best_value = 0;
};

/// Ranks methods by cophenetic coefficient per representation; ties go to the
/// lexicographically first method name (and "bowr" before "dtw").
inline MethodRanking compare_methods(std::span<const CopheneticRow> rows)
{
    MethodRanking out;
    auto by_value = [](const RankedMethod& a, const RankedMethod& b) {
        if (a.cophenetic != b.cophenetic)
            return a.cophenetic > b.cophenetic;
        return a.method < b.method;
    };
    for (const auto& r : rows) {
        if (r.bowr)
            out.bowr.push_back({r.method, *r.bowr});
        if (r.dtw)
            out.dtw.push_back({r.method, *r.dtw});
    }
    if (out.bowr.empty() && out.dtw.empty())
        throw Error(Errc::EmptyReport, "cli", "no cophenetic coefficients to compare");
    std::sort(out.bowr.begin(), out.bowr.end(), by_value);
    std::sort(out.dtw.begin(), out.dtw.end(), by_value);

    std::vector<std::pair<std::string, RankedMethod>> heads;
    if (!out.bowr.empty())
        heads.emplace_back("bowr", out.bowr.front());
    if (!out.dtw.empty())
        heads.emplace_back("dtw", out.dtw.front());
    auto best = heads.front();
    for (const auto& h : heads)
        if (h.second.cophenetic > best.second.cophenetic ||
            (h.second.cophenetic == best.second.cophenetic &&
             std::tie(h.second.method, h.first) < std::tie(best.second.method, best.first)))
            best = h;
    out.best_representation = best.first;
    out.best_method = best.second.method;
    out.best_value = best.second.cophenetic;
    return out;
}

inline MethodRanking compare_methods(const RunReport& report) { return compare_methods(report.cophenetic_table); }

} // namespace chillerbow
