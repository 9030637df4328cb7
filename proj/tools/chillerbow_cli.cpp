// chillerbow command line: synthetic data generation, staged pipeline
// (segment / transform / cluster), full runs and method comparison.

#include "chillerbow/chillerbow.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace chillerbow;

namespace {

struct Overrides {
    std::string config_path;
    std::string input, schema, timestamp_format, output_dir;
    std::size_t workers = 1;
    std::vector<std::string> features;
    std::size_t min_length = 3;
    std::uint64_t seed = 42;
    std::string channel;
    std::size_t alphabet = 20;
    Seconds chunk_period = 240;
    std::size_t paa_segments = 1;
    std::size_t word_length = 1;
    std::string metric;
    std::vector<std::string> methods;
    std::size_t cut_k = 3;
    bool no_dtw = false;
    std::size_t dtw_window = 0;
    std::string convention;
};

void add_pipeline_options(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("-c,--config", o.config_path, "JSON configuration file (flags override it)");
    cmd->add_option("-i,--input", o.input, "Input CSV");
    cmd->add_option("-s,--schema", o.schema, "Channel schema JSON");
    cmd->add_option("--timestamp-format", o.timestamp_format, "'epoch' or a strftime pattern (UTC)");
    cmd->add_option("-o,--output-dir", o.output_dir, "Output directory");
    cmd->add_option("-j,--workers", o.workers, "Worker threads");
    cmd->add_option("--features", o.features, "State-detection feature channels")->delimiter(',');
    cmd->add_option("--min-length", o.min_length, "Minimum ON cycle length in ticks");
    cmd->add_option("--seed", o.seed, "k-means seed");
    cmd->add_option("--channel", o.channel, "Channel to symbolize (and DTW channel by default)");
    cmd->add_option("--alphabet", o.alphabet, "SAX alphabet size");
    cmd->add_option("--chunk-period", o.chunk_period, "SAX chunk period in seconds");
    cmd->add_option("--paa-segments", o.paa_segments, "PAA frames per chunk");
    cmd->add_option("--word-length", o.word_length, "Symbols per BoW word");
    cmd->add_option("--metric", o.metric, "BoW distance: euclidean, manhattan, cosine");
    cmd->add_option("--methods", o.methods, "Linkage methods")->delimiter(',');
    cmd->add_option("--cut-k", o.cut_k, "Flat cluster count");
    cmd->add_flag("--no-dtw", o.no_dtw, "Skip the DTW baseline");
    cmd->add_option("--dtw-window", o.dtw_window, "Sakoe-Chiba radius in ticks");
    cmd->add_option("--convention", o.convention, "Efficiency convention: inverted or as_written");
}

PipelineConfig resolve_config(const CLI::App* cmd, const Overrides& o)
{
    PipelineConfig cfg = o.config_path.empty() ? PipelineConfig{} : load_config(o.config_path);
    auto given = [&](const char* name) { return cmd->count(name) > 0; };
    if (given("--input")) cfg.input = o.input;
    if (given("--schema")) cfg.schema = o.schema;
    if (given("--timestamp-format")) cfg.timestamp_format = o.timestamp_format;
    if (given("--output-dir")) cfg.output_dir = o.output_dir;
    if (given("--workers")) cfg.workers = o.workers;
    if (given("--features")) cfg.kmeans.feature_channels = o.features;
    if (given("--min-length")) cfg.cycle_options.min_length = o.min_length;
    if (given("--seed")) cfg.kmeans.seed = o.seed;
    if (given("--channel")) cfg.sax_channel = o.channel;
    if (given("--alphabet")) cfg.sax.alphabet_size = o.alphabet;
    if (given("--chunk-period")) cfg.sax.chunk_period = o.chunk_period;
    if (given("--paa-segments")) cfg.sax.paa_segments = o.paa_segments;
    if (given("--word-length")) cfg.sax.word_length = o.word_length;
    if (given("--metric")) {
        auto m = parse_bow_metric(o.metric);
        if (!m)
            throw Error(Errc::InvalidArgument, "cli", "unknown metric '" + o.metric + "'");
        cfg.metric = *m;
    }
    if (given("--methods")) {
        cfg.methods.clear();
        for (const auto& name : o.methods) {
            auto m = parse_linkage_method(name);
            if (!m)
                throw Error(Errc::InvalidArgument, "cli", "unknown linkage method '" + name + "'");
            cfg.methods.push_back(*m);
        }
    }
    if (given("--cut-k")) cfg.cut_k = o.cut_k;
    if (given("--no-dtw")) cfg.run_dtw = false;
    if (given("--dtw-window")) cfg.dtw.window = o.dtw_window;
    if (given("--convention")) {
        auto c = parse_efficiency_convention(o.convention);
        if (!c)
            throw Error(Errc::InvalidArgument, "cli", "unknown convention '" + o.convention + "'");
        cfg.convention = *c;
    }
    if (cfg.output_dir.empty())
        cfg.output_dir = ".";
    cfg.validate();
    return cfg;
}

nlohmann::json read_json(const std::string& path)
{
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::InvalidArgument, "cli", path + ": " + e.what());
    }
}

std::string in_dir(const std::string& explicit_path, const PipelineConfig& cfg, const char* name)
{
    return explicit_path.empty() ? (fs::path(cfg.output_dir) / name).string() : explicit_path;
}

void print_summary(const RunReport& report)
{
    std::cout << "cycles: " << report.segmentation.cycles.size() << "\n";
    if (!report.cophenetic_table.empty()) {
        std::cout << "method      bowr      dtw\n";
        for (const auto& row : report.cophenetic_table) {
            std::printf("%-10s  %-8s  %-8s\n", row.method.c_str(),
                        row.bowr ? std::to_string(*row.bowr).substr(0, 8).c_str() : "-",
                        row.dtw ? std::to_string(*row.dtw).substr(0, 8).c_str() : "-");
        }
    }
    for (const auto& n : report.notes)
        std::cout << "note: " << n << "\n";
}

struct GenerateOptions {
    std::string out_dir = ".";
    std::string scenario = "three-class";
    std::uint64_t seed = 1;
    std::size_t per_class = 5;
    double noise_fraction = 0.05;
    std::vector<std::string> gaps;
};

int run_generate(const GenerateOptions& g)
{
    ScenarioSpec spec;
    spec.seed = g.seed;
    spec.noise_fraction = g.noise_fraction;
    if (g.scenario == "three-class") {
        spec.templates = three_class_templates(g.per_class);
    } else if (g.scenario == "pulses") {
        spec.templates = pulse_templates(g.per_class);
    } else {
        throw Error(Errc::InvalidArgument, "cli", "unknown scenario '" + g.scenario + "'");
    }
    for (const auto& text : g.gaps) {
        auto colon = text.find(':');
        if (colon == std::string::npos)
            throw Error(Errc::InvalidArgument, "cli", "gap must be START:TICKS, got '" + text + "'");
        spec.gaps.push_back({std::stoul(text.substr(0, colon)), std::stoul(text.substr(colon + 1))});
    }
    auto scenario = generate(spec);
    fs::create_directories(g.out_dir);
    fs::path dir(g.out_dir);
    write_file((dir / "data.csv").string(), emit_csv(scenario.table));
    write_file((dir / "schema.json").string(), schema_to_json(scenario.table.channels()).dump(2) + "\n");
    write_file((dir / "truth.json").string(), ground_truth_to_json(scenario.truth).dump(2) + "\n");
    std::cout << "wrote " << scenario.table.rows() << " rows, " << scenario.truth.cycles.size() << " cycles to "
              << g.out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ON-cycle pattern discovery for chiller telemetry (SAX bag of words + hierarchical clustering)"};
    app.require_subcommand(1);

    GenerateOptions gen;
    auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic chiller corpus with ground truth");
    generate_cmd->add_option("-o,--output-dir", gen.out_dir, "Output directory");
    generate_cmd->add_option("--scenario", gen.scenario, "three-class or pulses");
    generate_cmd->add_option("--seed", gen.seed, "Generator seed");
    generate_cmd->add_option("--per-class", gen.per_class, "Cycles per shape class");
    generate_cmd->add_option("--noise-fraction", gen.noise_fraction, "Noise sigma as a fraction of channel range");
    generate_cmd->add_option("--gap", gen.gaps, "Recording gap START:TICKS (repeatable)");

    Overrides seg_o, tr_o, cl_o, run_o;
    auto* segment_cmd = app.add_subcommand("segment", "Detect ON/OFF states and extract ON cycles");
    add_pipeline_options(segment_cmd, seg_o);

    std::string tr_segmentation;
    auto* transform_cmd = app.add_subcommand("transform", "SAX-symbolize cycles and build bag-of-words vectors");
    add_pipeline_options(transform_cmd, tr_o);
    transform_cmd->add_option("--segmentation", tr_segmentation, "segmentation.json (default: output dir)");

    std::string cl_segmentation, cl_transform;
    auto* cluster_cmd = app.add_subcommand("cluster", "Hierarchical clustering and cophenetic correlation");
    add_pipeline_options(cluster_cmd, cl_o);
    cluster_cmd->add_option("--segmentation", cl_segmentation, "segmentation.json (default: output dir)");
    cluster_cmd->add_option("--transform", cl_transform, "transform.json (default: output dir)");

    std::string report_path, ranking_out;
    auto* compare_cmd = app.add_subcommand("compare", "Rank linkage methods by cophenetic coefficient");
    compare_cmd->add_option("-r,--report", report_path, "report.json")->required();
    compare_cmd->add_option("--out", ranking_out, "Write the ranking JSON here instead of stdout");

    auto* run_cmd = app.add_subcommand("run", "Full pipeline: segment, transform, cluster, compare");
    add_pipeline_options(run_cmd, run_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*generate_cmd)
            return run_generate(gen);

        if (*segment_cmd) {
            auto cfg = resolve_config(segment_cmd, seg_o);
            auto table = load_input(cfg);
            auto seg = run_segmentation(table, cfg);
            fs::create_directories(cfg.output_dir);
            write_file((fs::path(cfg.output_dir) / "segmentation.json").string(), segmentation_to_json(seg).dump(2) + "\n");
            std::cout << "cycles: " << seg.cycles.size() << ", gaps: " << seg.gaps.gaps.size() << "\n";
            return 0;
        }
        if (*transform_cmd) {
            auto cfg = resolve_config(transform_cmd, tr_o);
            auto table = load_input(cfg);
            auto seg = segmentation_from_json(read_json(in_dir(tr_segmentation, cfg, "segmentation.json")), table);
            if (seg.cycles.empty())
                throw Error(Errc::EmptyInput, "bowr", "segmentation holds no ON cycles");
            auto t = run_transform(seg.cycles, cfg);
            fs::create_directories(cfg.output_dir);
            write_file((fs::path(cfg.output_dir) / "transform.json").string(), transform_to_json(t).dump(2) + "\n");
            write_file((fs::path(cfg.output_dir) / "bow_matrix.csv").string(), bow_matrix_csv(t));
            std::cout << "cycles: " << t.bows.size() << ", vocabulary: " << t.vocabulary.size() << " words\n";
            return 0;
        }
        if (*cluster_cmd) {
            auto cfg = resolve_config(cluster_cmd, cl_o);
            auto table = load_input(cfg);
            auto seg = segmentation_from_json(read_json(in_dir(cl_segmentation, cfg, "segmentation.json")), table);
            auto t = transform_from_json(read_json(in_dir(cl_transform, cfg, "transform.json")));
            auto report = analyze_from(table, std::move(seg), std::move(t), cfg);
            write_report(report, table, cfg);
            print_summary(report);
            return 0;
        }
        if (*compare_cmd) {
            auto rows = cophenetic_rows_from_json(read_json(report_path));
            auto ranking = ranking_to_json(compare_methods(rows)).dump(2) + "\n";
            if (ranking_out.empty())
                std::cout << ranking;
            else
                write_file(ranking_out, ranking);
            return 0;
        }
        if (*run_cmd) {
            auto cfg = resolve_config(run_cmd, run_o);
            auto report = run_pipeline(cfg);
            print_summary(report);
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.family());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
