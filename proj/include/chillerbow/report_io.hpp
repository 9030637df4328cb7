#pragma once

#include "chillerbow/pipeline.hpp"
#include "chillerbow/timeseries_io.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>

namespace chillerbow {

inline constexpr std::string_view kToolName = "chillerbow";
inline constexpr std::string_view kToolVersion = "0.1.0";

// --- configuration ---------------------------------------------------------

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                                const std::string& where)
{
    for (const auto& [key, _] : j.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw Error(Errc::InvalidArgument, "cli", "unknown key '" + key + "' in " + where);
}

template <class T>
void read_if(const nlohmann::json& j, const char* key, T& out)
{
    if (j.contains(key) && !j[key].is_null())
        out = j[key].get<T>();
}

} // namespace detail

/**
 * @brief Reads a pipeline configuration document.
 *
 * Missing keys keep their defaults; unknown keys and type mismatches are
 * configuration errors.
 */
inline PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig cfg = {})
{
    using detail::read_if;
    try {
        if (!j.is_object())
            throw Error(Errc::InvalidArgument, "cli", "configuration must be a JSON object");
        detail::reject_unknown_keys(j,
                                    {"input", "schema", "timestamp_format", "output_dir", "workers", "segmentation",
                                     "sax", "bow", "methods", "dtw", "efficiency", "cut_k", "dump_intermediates"},
                                    "configuration");
        read_if(j, "input", cfg.input);
        read_if(j, "schema", cfg.schema);
        read_if(j, "timestamp_format", cfg.timestamp_format);
        read_if(j, "output_dir", cfg.output_dir);
        read_if(j, "workers", cfg.workers);
        read_if(j, "cut_k", cfg.cut_k);
        read_if(j, "dump_intermediates", cfg.dump_intermediates);

        if (j.contains("segmentation")) {
            const auto& s = j["segmentation"];
            detail::reject_unknown_keys(s, {"features", "k", "max_iterations", "tolerance", "seed", "min_length",
                                            "split_gap", "max_gap"},
                                        "segmentation");
            read_if(s, "features", cfg.kmeans.feature_channels);
            read_if(s, "k", cfg.kmeans.k);
            read_if(s, "max_iterations", cfg.kmeans.max_iterations);
            read_if(s, "tolerance", cfg.kmeans.tolerance);
            read_if(s, "seed", cfg.kmeans.seed);
            read_if(s, "min_length", cfg.cycle_options.min_length);
            read_if(s, "split_gap", cfg.cycle_options.split_gap);
            read_if(s, "max_gap", cfg.max_gap);
        }
        if (j.contains("sax")) {
            const auto& s = j["sax"];
            detail::reject_unknown_keys(s, {"channel", "chunk_period", "paa_segments", "alphabet_size", "word_length"},
                                        "sax");
            read_if(s, "channel", cfg.sax_channel);
            read_if(s, "chunk_period", cfg.sax.chunk_period);
            read_if(s, "paa_segments", cfg.sax.paa_segments);
            read_if(s, "alphabet_size", cfg.sax.alphabet_size);
            read_if(s, "word_length", cfg.sax.word_length);
        }
        if (j.contains("bow")) {
            const auto& b = j["bow"];
            detail::reject_unknown_keys(b, {"metric", "word_length"}, "bow");
            read_if(b, "word_length", cfg.sax.word_length);
            if (b.contains("metric")) {
                auto m = parse_bow_metric(b["metric"].get<std::string>());
                if (!m)
                    throw Error(Errc::InvalidArgument, "cli", "unknown metric " + b["metric"].dump());
                cfg.metric = *m;
            }
        }
        if (j.contains("methods")) {
            cfg.methods.clear();
            for (const auto& m : j["methods"]) {
                auto method = parse_linkage_method(m.get<std::string>());
                if (!method)
                    throw Error(Errc::InvalidArgument, "cli", "unknown linkage method " + m.dump());
                cfg.methods.push_back(*method);
            }
        }
        if (j.contains("dtw")) {
            const auto& d = j["dtw"];
            detail::reject_unknown_keys(d, {"enabled", "channels", "policy", "window", "local_cost"}, "dtw");
            read_if(d, "enabled", cfg.run_dtw);
            read_if(d, "channels", cfg.dtw.channels);
            if (d.contains("window"))
                cfg.dtw.window = d["window"].is_null() ? std::nullopt
                                                       : std::optional<std::size_t>(d["window"].get<std::size_t>());
            if (d.contains("policy")) {
                auto p = d["policy"].get<std::string>();
                if (p == "single_channel")
                    cfg.dtw.channel_policy = ChannelPolicy::single_channel;
                else if (p == "sum_over_channels")
                    cfg.dtw.channel_policy = ChannelPolicy::sum_over_channels;
                else
                    throw Error(Errc::InvalidArgument, "cli", "unknown DTW channel policy '" + p + "'");
            }
            if (d.contains("local_cost")) {
                auto c = d["local_cost"].get<std::string>();
                if (c == "absolute")
                    cfg.dtw.local_cost = LocalCost::absolute;
                else if (c == "squared")
                    cfg.dtw.local_cost = LocalCost::squared;
                else
                    throw Error(Errc::InvalidArgument, "cli", "unknown DTW local cost '" + c + "'");
            }
        }
        if (j.contains("efficiency")) {
            const auto& e = j["efficiency"];
            detail::reject_unknown_keys(e, {"good_min", "bad_max", "convention", "channels"}, "efficiency");
            read_if(e, "good_min", cfg.bands.good_min);
            read_if(e, "bad_max", cfg.bands.bad_max);
            if (e.contains("convention")) {
                auto c = parse_efficiency_convention(e["convention"].get<std::string>());
                if (!c)
                    throw Error(Errc::InvalidArgument, "cli", "unknown efficiency convention");
                cfg.convention = *c;
            }
            if (e.contains("channels")) {
                const auto& c = e["channels"];
                detail::reject_unknown_keys(
                    c, {"ht_supply", "mt_supply", "lt_return", "chilled_power", "driving_power"}, "efficiency.channels");
                read_if(c, "ht_supply", cfg.efficiency_channels.ht_supply);
                read_if(c, "mt_supply", cfg.efficiency_channels.mt_supply);
                read_if(c, "lt_return", cfg.efficiency_channels.lt_return);
                read_if(c, "chilled_power", cfg.efficiency_channels.chilled_power);
                read_if(c, "driving_power", cfg.efficiency_channels.driving_power);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, "cli", std::string("configuration: ") + e.what());
    }
    return cfg;
}

inline nlohmann::json config_to_json(const PipelineConfig& c)
{
    nlohmann::json methods = nlohmann::json::array();
    for (auto m : c.methods)
        methods.push_back(std::string(to_string(m)));
    auto dtw = c.effective_dtw();
    return {
        {"input", c.input},
        {"schema", c.schema},
        {"timestamp_format", c.timestamp_format},
        {"segmentation",
         {{"features", c.kmeans.feature_channels},
          {"k", c.kmeans.k},
          {"max_iterations", c.kmeans.max_iterations},
          {"tolerance", c.kmeans.tolerance},
          {"seed", c.kmeans.seed},
          {"min_length", c.cycle_options.min_length},
          {"split_gap", c.cycle_options.split_gap},
          {"max_gap", c.max_gap}}},
        {"sax",
         {{"channel", c.sax_channel},
          {"chunk_period", c.sax.chunk_period},
          {"paa_segments", c.sax.paa_segments},
          {"alphabet_size", c.sax.alphabet_size},
          {"word_length", c.sax.word_length}}},
        {"bow", {{"metric", std::string(to_string(c.metric))}}},
        {"methods", methods},
        {"dtw",
         {{"enabled", c.run_dtw},
          {"channels", dtw.channels},
          {"policy", dtw.channel_policy == ChannelPolicy::single_channel ? "single_channel" : "sum_over_channels"},
          {"window", dtw.window ? nlohmann::json(*dtw.window) : nlohmann::json(nullptr)},
          {"local_cost", dtw.local_cost == LocalCost::absolute ? "absolute" : "squared"}}},
        {"efficiency",
         {{"good_min", c.bands.good_min},
          {"bad_max", c.bands.bad_max},
          {"convention", std::string(to_string(c.convention))},
          {"channels",
           {{"ht_supply", c.efficiency_channels.ht_supply},
            {"mt_supply", c.efficiency_channels.mt_supply},
            {"lt_return", c.efficiency_channels.lt_return},
            {"chilled_power", c.efficiency_channels.chilled_power},
            {"driving_power", c.efficiency_channels.driving_power}}}}},
        {"cut_k", c.cut_k},
        {"output_dir", c.output_dir},
        {"dump_intermediates", c.dump_intermediates},
    };
}

inline PipelineConfig load_config(const std::string& path)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::InvalidArgument, "cli", path + ": " + e.what());
    } catch (const Error& e) {
        throw Error(Errc::InvalidArgument, "cli", e.what());
    }
    return config_from_json(j);
}

// --- intermediates ---------------------------------------------------------

inline nlohmann::json gaps_to_json(const GapReport& g)
{
    nlohmann::json list = nlohmann::json::array();
    for (const auto& gap : g.gaps)
        list.push_back({{"start_index", gap.start_index}, {"end_index", gap.end_index}, {"duration", gap.duration}});
    return {{"coverage_fraction", g.coverage_fraction}, {"gaps", list}};
}

inline GapReport gaps_from_json(const nlohmann::json& j)
{
    GapReport g;
    g.coverage_fraction = j.at("coverage_fraction").get<double>();
    for (const auto& item : j.at("gaps"))
        g.gaps.push_back({item.at("start_index").get<std::size_t>(), item.at("end_index").get<std::size_t>(),
                          item.at("duration").get<Seconds>()});
    return g;
}

inline nlohmann::json segmentation_to_json(const SegmentationResult& s)
{
    std::string mask;
    mask.reserve(s.mask.size());
    for (bool b : s.mask.states)
        mask.push_back(b ? '1' : '0');
    nlohmann::json cycles = nlohmann::json::array();
    for (const auto& c : s.cycles)
        cycles.push_back({{"cycle_id", c.cycle_id}, {"start", c.start}, {"end", c.end}});
    return {{"dt", s.dt}, {"mask", mask}, {"gaps", gaps_to_json(s.gaps)}, {"cycles", cycles}};
}

inline SegmentationResult segmentation_from_json(const nlohmann::json& j, const TimeSeriesTable& table)
{
    try {
        SegmentationResult s;
        s.dt = j.at("dt").get<Seconds>();
        auto mask = j.at("mask").get<std::string>();
        if (mask.size() != table.rows())
            throw Error(Errc::InvalidArgument, "segmentation", "dumped mask does not match the table");
        for (char c : mask)
            s.mask.states.push_back(c == '1');
        s.gaps = gaps_from_json(j.at("gaps"));
        std::vector<std::pair<std::size_t, std::size_t>> spans;
        for (const auto& c : j.at("cycles"))
            spans.emplace_back(c.at("start").get<std::size_t>(), c.at("end").get<std::size_t>());
        s.cycles = cycles_from_spans(table, spans);
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, "segmentation", std::string("segmentation dump: ") + e.what());
    }
}

inline nlohmann::json symbols_to_json(const SymbolSequence& s)
{
    if (s.alphabet_size <= 26)
        return to_letters(s.symbols, s.alphabet_size);
    return s.symbols;
}

inline nlohmann::json transform_to_json(const TransformResult& t)
{
    nlohmann::json words = nlohmann::json::array();
    for (const auto& w : t.vocabulary.words)
        words.push_back(w);
    nlohmann::json cycles = nlohmann::json::array();
    for (std::size_t i = 0; i < t.bows.size(); ++i)
        cycles.push_back({{"cycle_id", t.bows[i].cycle_id},
                          {"ticks", t.bows[i].ticks},
                          {"symbols", t.symbols[i].symbols},
                          {"counts", t.bows[i].counts},
                          {"weights", t.bows[i].weights}});
    return {{"alphabet_size", t.vocabulary.alphabet_size},
            {"word_length", t.vocabulary.word_length},
            {"vocabulary", words},
            {"cycles", cycles}};
}

/// Weights are recomputed from counts and tick counts, reproducing the original exactly.
inline TransformResult transform_from_json(const nlohmann::json& j)
{
    try {
        TransformResult t;
        auto a = j.at("alphabet_size").get<std::size_t>();
        auto wl = j.at("word_length").get<std::size_t>();
        std::set<Word> words;
        for (const auto& w : j.at("vocabulary"))
            words.insert(w.get<Word>());
        t.vocabulary = make_vocabulary(std::move(words), wl, a);
        for (const auto& c : j.at("cycles")) {
            SymbolSequence seq;
            seq.cycle_id = c.at("cycle_id").get<int>();
            seq.alphabet_size = a;
            seq.symbols = c.at("symbols").get<std::vector<int>>();
            t.bows.push_back(build_bow(seq, t.vocabulary, c.at("ticks").get<std::size_t>()));
            t.symbols.push_back(std::move(seq));
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, "bowr", std::string("transform dump: ") + e.what());
    }
}

// --- report ----------------------------------------------------------------

inline std::string iso_utc_now()
{
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::json dendrogram_to_json(const Dendrogram& tree)
{
    nlohmann::json merges = nlohmann::json::array();
    for (const auto& m : tree.merges)
        merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
    return {{"leaves", tree.leaves}, {"merges", merges}};
}

inline nlohmann::json ranking_to_json(const MethodRanking& r)
{
    auto list = [](const std::vector<RankedMethod>& v) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& m : v)
            out.push_back({{"method", m.method}, {"cophenetic", m.cophenetic}});
        return out;
    };
    return {{"bowr", list(r.bowr)},
            {"dtw", list(r.dtw)},
            {"best", {{"representation", r.best_representation}, {"method", r.best_method}, {"cophenetic", r.best_value}}}};
}

inline std::vector<CopheneticRow> cophenetic_rows_from_json(const nlohmann::json& report)
{
    std::vector<CopheneticRow> rows;
    try {
        for (const auto& r : report.at("cophenetic_table")) {
            CopheneticRow row;
            row.method = r.at("method").get<std::string>();
            if (r.contains("bowr") && r["bowr"].is_number())
                row.bowr = r["bowr"].get<double>();
            if (r.contains("dtw") && r["dtw"].is_number())
                row.dtw = r["dtw"].get<double>();
            rows.push_back(row);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::EmptyReport, "cli", std::string("report has no usable cophenetic table: ") + e.what());
    }
    return rows;
}

inline std::string dendrogram_file_stem(const std::string& representation, LinkageMethod m)
{
    return "dendrogram_" + representation + "_" + std::string(to_string(m));
}

inline nlohmann::json optional_number(const std::optional<double>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

/// The report document. Everything except "provenance" is a pure function
/// of the input and the configuration.
inline nlohmann::json report_to_json(const RunReport& report, const TimeSeriesTable& table, const PipelineConfig& config)
{
    nlohmann::json j;
    j["provenance"] = {{"tool", kToolName},
                       {"version", kToolVersion},
                       {"generated_at", iso_utc_now()},
                       {"workers", config.workers}};
    auto cfg = config_to_json(config);
    cfg.erase("workers");
    j["config"] = cfg;
    j["input"] = {{"rows", table.rows()}, {"channels", table.cols()}, {"dt", table.dt()}};
    j["gaps"] = gaps_to_json(report.segmentation.gaps);
    j["on_ticks"] = report.segmentation.mask.on_count();

    TimestampFormat fmt{config.timestamp_format};
    nlohmann::json cycles = nlohmann::json::array();
    for (std::size_t i = 0; i < report.segmentation.cycles.size(); ++i) {
        const auto& c = report.segmentation.cycles[i];
        nlohmann::json row = {{"cycle_id", c.cycle_id},
                              {"start", c.start},
                              {"end", c.end},
                              {"start_time", fmt.format(c.timestamps.front())},
                              {"end_time", fmt.format(c.timestamps.back())},
                              {"ticks", c.tick_count()}};
        if (i < report.efficiency.size() && report.efficiency[i]) {
            const auto& e = *report.efficiency[i];
            row["cop_carnot"] = e.cop_carnot;
            row["cop_therm"] = e.cop_therm;
            row["efficiency"] = e.efficiency;
            row["band"] = std::string(to_string(e.band));
        }
        if (report.transform)
            row["symbols"] = symbols_to_json(report.transform->symbols[i]);
        cycles.push_back(row);
    }
    j["cycles"] = cycles;

    if (report.transform) {
        nlohmann::json vocab = nlohmann::json::array();
        for (const auto& w : report.transform->vocabulary.words)
            vocab.push_back(word_label(w, report.transform->vocabulary.alphabet_size));
        j["bow"] = {{"vocabulary", vocab}, {"matrix", "bow_matrix.csv"}};
    }

    auto representation = [&](const RepresentationOutcome& r) {
        nlohmann::json methods = nlohmann::json::object();
        for (const auto& m : r.methods) {
            auto stem = dendrogram_file_stem(r.name, m.method);
            methods[std::string(to_string(m.method))] = {{"tree", dendrogram_to_json(m.tree)},
                                                         {"cophenetic", optional_number(m.cophenetic)},
                                                         {"labels", m.labels},
                                                         {"plot", stem + ".csv"},
                                                         {"svg", stem + ".svg"}};
        }
        return nlohmann::json{{"cycle_ids", r.cycle_ids}, {"distances", r.name + "_distances.csv"}, {"methods", methods}};
    };
    if (report.bowr || report.dtw) {
        j["clustering"] = nlohmann::json::object();
        if (report.bowr)
            j["clustering"]["bowr"] = representation(*report.bowr);
        if (report.dtw)
            j["clustering"]["dtw"] = representation(*report.dtw);
        j["cut_k"] = std::min(config.cut_k, report.segmentation.cycles.size());

        nlohmann::json table3 = nlohmann::json::array();
        for (const auto& row : report.cophenetic_table)
            table3.push_back({{"method", row.method}, {"bowr", optional_number(row.bowr)}, {"dtw", optional_number(row.dtw)}});
        j["cophenetic_table"] = table3;
        bool any = false;
        for (const auto& row : report.cophenetic_table)
            any = any || row.bowr || row.dtw;
        if (any)
            j["ranking"] = ranking_to_json(compare_methods(report.cophenetic_table));
    }
    j["notes"] = report.notes;
    return j;
}

// --- CSV / SVG sidecars ----------------------------------------------------

inline std::string efficiency_csv(const RunReport& report)
{
    std::string out = "cycle_id,start,end,cop_carnot,cop_therm,efficiency,band\n";
    for (std::size_t i = 0; i < report.segmentation.cycles.size(); ++i) {
        const auto& c = report.segmentation.cycles[i];
        out += std::to_string(c.cycle_id) + "," + std::to_string(c.start) + "," + std::to_string(c.end);
        if (i < report.efficiency.size() && report.efficiency[i]) {
            const auto& e = *report.efficiency[i];
            out += "," + csv::format_number(e.cop_carnot) + "," + csv::format_number(e.cop_therm) + "," +
                   csv::format_number(e.efficiency) + "," + std::string(to_string(e.band));
        } else {
            out += ",,,,";
        }
        out += '\n';
    }
    return out;
}

/// Rows = cycles, columns = vocabulary words, cells = normalized weights.
inline std::string bow_matrix_csv(const TransformResult& t)
{
    std::string out = "cycle_id";
    for (const auto& w : t.vocabulary.words)
        out += "," + csv::quote(word_label(w, t.vocabulary.alphabet_size));
    out += '\n';
    for (const auto& b : t.bows) {
        out += std::to_string(b.cycle_id);
        for (double v : b.weights)
            out += "," + csv::format_number(v);
        out += '\n';
    }
    return out;
}

/// Condensed distances as i,j,distance rows over item positions.
inline std::string condensed_csv(const DistanceMatrix& m)
{
    std::string out = "i,j,distance\n";
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j)
            out += std::to_string(i) + "," + std::to_string(j) + "," + csv::format_number(m(i, j)) + "\n";
    return out;
}

inline DistanceMatrix condensed_from_csv(std::string_view text)
{
    auto records = csv::parse(text);
    std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
    std::size_t n = 0;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& f = records[r].fields;
        if (f.size() < 3)
            throw Error(Errc::InvalidArgument, "hcluster", "distance row needs i,j,distance");
        auto i = static_cast<std::size_t>(std::stoull(f[0]));
        auto j = static_cast<std::size_t>(std::stoull(f[1]));
        double d = csv::parse_cell(f[2]);
        if (is_missing(d))
            throw Error(Errc::NonFiniteDistance, "hcluster", "unparsable distance on line " + std::to_string(records[r].line));
        entries.emplace_back(i, j, d);
        n = std::max({n, i + 1, j + 1});
    }
    DistanceMatrix m(n);
    for (auto [i, j, d] : entries)
        m.set(i, j, d);
    return m;
}

inline std::string dendrogram_plot_csv(const Dendrogram& tree, std::span<const int> labels_by_leaf)
{
    auto layout = layout_dendrogram(tree);
    std::string out = "kind,x0,y0,x1,y1,label\n";
    for (std::size_t i = 0; i < layout.leaf_order.size(); ++i) {
        auto leaf = layout.leaf_order[i];
        int label = leaf < labels_by_leaf.size() ? labels_by_leaf[leaf] : static_cast<int>(leaf);
        out += "leaf," + std::to_string(i) + ",0,,," + std::to_string(label) + "\n";
    }
    for (const auto& s : layout.segments)
        out += "segment," + csv::format_number(s.x0) + "," + csv::format_number(s.y0) + "," + csv::format_number(s.x1) +
               "," + csv::format_number(s.y1) + ",\n";
    return out;
}

/// Minimal static SVG rendering of a dendrogram (leaves along the bottom).
inline std::string dendrogram_svg(const Dendrogram& tree, std::span<const int> leaf_labels, const std::string& title)
{
    auto layout = layout_dendrogram(tree);
    const double width = 820, height = 420, margin = 50;
    double max_h = 0;
    for (const auto& m : tree.merges)
        max_h = std::max(max_h, m.height);
    if (max_h <= 0)
        max_h = 1;
    const double n = static_cast<double>(std::max<std::size_t>(1, tree.leaves));
    auto sx = [&](double x) { return margin + (x + 0.5) * (width - 2 * margin) / n; };
    auto sy = [&](double y) { return height - margin - y * (height - 2 * margin) / max_h; };

    std::ostringstream svg;
    svg.setf(std::ios::fixed);
    svg.precision(2);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    for (const auto& s : layout.segments)
        svg << "<line x1=\"" << sx(s.x0) << "\" y1=\"" << sy(s.y0) << "\" x2=\"" << sx(s.x1) << "\" y2=\"" << sy(s.y1)
            << "\" stroke=\"black\" stroke-width=\"1.2\"/>\n";
    for (std::size_t i = 0; i < layout.leaf_order.size(); ++i) {
        auto leaf = layout.leaf_order[i];
        int label = leaf < leaf_labels.size() ? leaf_labels[leaf] : static_cast<int>(leaf);
        svg << "<text x=\"" << sx(static_cast<double>(i)) << "\" y=\"" << height - margin + 16
            << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << label << "</text>\n";
    }
    svg << "<text x=\"12\" y=\"" << margin - 8 << "\" font-family=\"sans-serif\" font-size=\"10\">" << max_h
        << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

/// Writes report.json and every CSV / SVG sidecar into config.output_dir.
inline nlohmann::json write_report(const RunReport& report, const TimeSeriesTable& table, const PipelineConfig& config)
{
    namespace fs = std::filesystem;
    fs::path dir(config.output_dir.empty() ? "." : config.output_dir);
    fs::create_directories(dir);
    auto put = [&](const std::string& name, std::string_view content) { write_file((dir / name).string(), content); };

    auto doc = report_to_json(report, table, config);
    put("cycles.csv", efficiency_csv(report));
    if (config.dump_intermediates) {
        put("segmentation.json", segmentation_to_json(report.segmentation).dump(2) + "\n");
        if (report.transform)
            put("transform.json", transform_to_json(*report.transform).dump(2) + "\n");
    }
    if (report.transform)
        put("bow_matrix.csv", bow_matrix_csv(*report.transform));
    for (const auto* rep : {&report.bowr, &report.dtw}) {
        if (!*rep)
            continue;
        const auto& r = **rep;
        put(r.name + "_distances.csv", condensed_csv(r.distances));
        for (const auto& m : r.methods) {
            auto stem = dendrogram_file_stem(r.name, m.method);
            put(stem + ".csv", dendrogram_plot_csv(m.tree, r.cycle_ids));
            put(stem + ".svg", dendrogram_svg(m.tree, r.cycle_ids, r.name + " / " + std::string(to_string(m.method))));
        }
    }
    if (!report.cophenetic_table.empty()) {
        std::string csv_out = "method,bowr,dtw\n";
        for (const auto& row : report.cophenetic_table)
            csv_out += row.method + "," + (row.bowr ? csv::format_number(*row.bowr) : "") + "," +
                       (row.dtw ? csv::format_number(*row.dtw) : "") + "\n";
        put("cophenetic.csv", csv_out);
    }
    put("report.json", doc.dump(2) + "\n");
    return doc;
}

inline TimeSeriesTable load_input(const PipelineConfig& config)
{
    if (config.input.empty() || config.schema.empty())
        throw Error(Errc::InvalidArgument, "cli", "input and schema paths are required");
    auto schema = load_schema(config.schema);
    return ingest_csv(config.input, schema, TimestampFormat{config.timestamp_format});
}

/// ingest -> analyze -> write; returns the report.
inline RunReport run_pipeline(const PipelineConfig& config)
{
    config.validate();
    auto table = load_input(config);
    auto report = analyze(table, config);
    if (!config.output_dir.empty())
        write_report(report, table, config);
    return report;
}

} // namespace chillerbow
