// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "chillerbow/chillerbow.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace chillerbow;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

constexpr double kCorpusNoise = 0.05;
constexpr std::uint64_t kCorpusSeeds[] = {1, 2, 3, 4, 5};

Scenario corpus(std::uint64_t seed)
{
    ScenarioSpec spec;
    spec.seed = seed;
    spec.templates = three_class_templates(5);
    spec.noise_fraction = kCorpusNoise;
    return generate(spec);
}

std::vector<int> class_labels(const Scenario& s)
{
    std::vector<int> out;
    for (const auto& c : s.truth.cycles)
        out.push_back(c.class_id);
    return out;
}

std::string fmt(double v, int digits = 4)
{
    std::ostringstream o;
    o.precision(digits);
    o << v;
    return o.str();
}

Outcome classification()
{
    Outcome out;
    double worst_ari = 1.0;
    double worst_seconds = 0.0;
    for (auto seed : kCorpusSeeds) {
        auto t0 = std::chrono::steady_clock::now();
        auto s = corpus(seed);
        auto report = analyze(s.table, PipelineConfig{});
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        worst_seconds = std::max(worst_seconds, seconds);
        if (report.segmentation.cycles.size() != s.truth.cycles.size() || !report.bowr) {
            out.pass = false;
            out.detail += " seed " + std::to_string(seed) + ": " + std::to_string(report.segmentation.cycles.size()) +
                          " cycles detected;";
            continue;
        }
        const auto& average = report.bowr->methods.front();
        if (average.method != LinkageMethod::average) {
            out.pass = false;
            continue;
        }
        double ari = adjusted_rand_index(average.labels, class_labels(s));
        worst_ari = std::min(worst_ari, ari);
        out.pass = out.pass && ari >= 0.9 && seconds < 10.0;
    }
    out.detail = "min ARI " + fmt(worst_ari) + " over " + std::to_string(std::size(kCorpusSeeds)) +
                 " corpora (15 cycles, noise " + fmt(kCorpusNoise * 100) + "% of range), max runtime " +
                 fmt(worst_seconds, 3) + " s;" + out.detail;
    return out;
}

Outcome method_direction()
{
    Outcome out;
    int fewest = 7;
    for (auto seed : kCorpusSeeds) {
        auto report = analyze(corpus(seed).table, PipelineConfig{});
        int wins = 0;
        for (const auto& row : report.cophenetic_table)
            wins += row.bowr && row.dtw && *row.bowr > *row.dtw;
        fewest = std::min(fewest, wins);
        if (seed == kCorpusSeeds[0]) {
            for (const auto& row : report.cophenetic_table)
                out.detail += " " + row.method + " " + (row.bowr ? fmt(*row.bowr) : "null") + "/" +
                              (row.dtw ? fmt(*row.dtw) : "null");
        }
    }
    out.pass = fewest >= 6;
    out.detail = "fewest BoWR wins " + std::to_string(fewest) + "/7; seed 1 (bowr/dtw):" + out.detail;
    return out;
}

oracle::Method to_oracle(LinkageMethod m)
{
    switch (m) {
    case LinkageMethod::average: return oracle::Method::average;
    case LinkageMethod::centroid: return oracle::Method::centroid;
    case LinkageMethod::complete: return oracle::Method::complete;
    case LinkageMethod::median: return oracle::Method::median;
    case LinkageMethod::single: return oracle::Method::single;
    case LinkageMethod::ward: return oracle::Method::ward;
    case LinkageMethod::weighted: return oracle::Method::weighted;
    }
    return oracle::Method::single;
}

Outcome linkage_oracle()
{
    Outcome out;
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> size(3, 8), dim(1, 4);
    int mismatches = 0;
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = size(rng);
        auto pts = oracle::random_points(rng, n, dim(rng));
        DistanceMatrix d(n, oracle::condensed_euclidean(pts));
        for (auto m : kAllLinkageMethods) {
            auto tree = linkage(d, m);
            auto expected = oracle::naive_linkage(pts, to_oracle(m));
            for (std::size_t k = 0; k < expected.size(); ++k) {
                double err = std::abs(tree.merges[k].height - expected[k].height);
                worst = std::max(worst, err);
                if (tree.merges[k].left != expected[k].left || tree.merges[k].right != expected[k].right || err > 1e-9)
                    ++mismatches;
            }
        }
    }
    out.pass = mismatches == 0;
    out.detail = "200 matrices x 7 methods, " + std::to_string(mismatches) + " mismatched merges, max height error " +
                 fmt(worst, 3);
    return out;
}

Outcome dtw_oracle()
{
    Outcome out;
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::size_t> len(1, 6);
    std::uniform_int_distribution<int> value(-32, 32);
    std::bernoulli_distribution dyadic(0.5);
    int mismatches = 0;
    for (int trial = 0; trial < 500; ++trial) {
        double scale = dyadic(rng) ? 0.125 : 1.0;
        std::vector<double> x(len(rng)), y(len(rng));
        for (auto& v : x)
            v = value(rng) * scale;
        for (auto& v : y)
            v = value(rng) * scale;
        bool squared = trial % 2 == 1;
        double dp = dtw_distance(x, y, squared ? LocalCost::squared : LocalCost::absolute);
        if (dp != oracle::dtw_brute_force(x, y, squared))
            ++mismatches;
    }
    out.pass = mismatches == 0;
    out.detail = "500 pairs, " + std::to_string(mismatches) + " differ from path enumeration";
    return out;
}

Outcome sax_statistics()
{
    Outcome out;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> draws(1'000'000);
    for (auto& v : draws)
        v = gauss(rng);
    double worst_bin = 0;
    for (std::size_t a = 2; a <= 20; ++a) {
        auto beta = gaussian_breakpoints(a);
        std::vector<std::size_t> hits(a, 0);
        for (double v : draws)
            ++hits[static_cast<std::size_t>(symbol_for(v, beta))];
        for (auto h : hits)
            worst_bin = std::max(worst_bin, std::abs(static_cast<double>(h) / 1e6 - 1.0 / static_cast<double>(a)));
    }
    double worst_mean = 0, worst_sd = 0;
    std::lognormal_distribution<double> skewed(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(2 + static_cast<std::size_t>(trial) * 13);
        for (auto& v : x)
            v = 1e3 * skewed(rng) - 50;
        auto z = zscore(x);
        double m = oracle::mean(z);
        double ss = 0;
        for (double v : z)
            ss += (v - m) * (v - m);
        worst_mean = std::max(worst_mean, std::abs(m));
        worst_sd = std::max(worst_sd, std::abs(std::sqrt(ss / static_cast<double>(z.size())) - 1.0));
    }
    out.pass = worst_bin <= 0.005 && worst_mean <= 1e-9 && worst_sd <= 1e-9;
    out.detail = "max bin deviation " + fmt(worst_bin, 3) + " (a=2..20, 1e6 draws), z-score |mean| " +
                 fmt(worst_mean, 3) + ", |sd-1| " + fmt(worst_sd, 3);
    return out;
}

OnCycle repeated(const OnCycle& c, std::size_t k)
{
    OnCycle r = c;
    r.end = r.start + k * c.tick_count() - 1;
    r.timestamps.clear();
    for (std::size_t t = 0; t < k * c.tick_count(); ++t)
        r.timestamps.push_back(c.timestamps.front() + static_cast<Instant>(t) * c.dt);
    for (auto& ch : r.data) {
        std::vector<double> base = ch;
        ch.clear();
        for (std::size_t i = 0; i < k; ++i)
            ch.insert(ch.end(), base.begin(), base.end());
    }
    return r;
}

Outcome length_invariance()
{
    Outcome out;
    auto s = corpus(kCorpusSeeds[0]);
    SaxConfig sax;
    int checked = 0, failed = 0;
    for (std::size_t i = 0; i < s.truth.cycles.size(); ++i) {
        auto cycle = make_cycle(s.table, static_cast<int>(i), s.truth.cycles[i].start, s.truth.cycles[i].end);
        for (std::size_t k : {2u, 3u, 5u}) {
            auto rep = repeated(cycle, k);
            std::vector<SymbolSequence> seqs = {symbolize(cycle, "Q6a_KW", sax), symbolize(rep, "Q6a_KW", sax)};
            auto vocab = build_vocabulary(seqs, sax.word_length);
            auto a = build_bow(seqs[0], vocab, cycle.tick_count());
            auto b = build_bow(seqs[1], vocab, rep.tick_count());
            ++checked;
            failed += a.weights != b.weights;
        }
    }
    out.pass = failed == 0;
    out.detail = std::to_string(checked) + " cycle/k pairs (k = 2, 3, 5), " + std::to_string(failed) +
                 " with differing weights";
    return out;
}

Outcome efficiency_bands()
{
    Outcome out;
    int wrong = 0, total = 0;
    double worst_rel = 0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        ScenarioSpec spec;
        spec.seed = seed;
        spec.templates = three_class_templates(5);
        auto s = generate(spec);
        for (std::size_t i = 0; i < s.truth.cycles.size(); ++i) {
            const auto& t = s.truth.cycles[i];
            auto e = cycle_efficiency(make_cycle(s.table, static_cast<int>(i), t.start, t.end));
            Band expected = t.target_efficiency >= 0.5 ? Band::good : t.target_efficiency < 0.3 ? Band::bad : Band::average;
            worst_rel = std::max(worst_rel, std::abs(e.efficiency - t.target_efficiency) / t.target_efficiency);
            ++total;
            wrong += e.band != expected;
        }
    }
    out.pass = wrong == 0 && worst_rel <= 0.02;
    out.detail = std::to_string(total) + " cycles at targets 0.6/0.4/0.2, " + std::to_string(wrong) +
                 " misbanded, max relative efficiency error " + fmt(worst_rel, 3);
    return out;
}

Outcome segmentation_fidelity()
{
    Outcome out;
    bool exact = true;
    double worst_noisy = 1.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        for (double noise : {0.0, 0.05}) {
            ScenarioSpec spec;
            spec.seed = seed;
            spec.templates = pulse_templates(8);
            spec.noise_fraction = noise; // every channel's range equals its ON/OFF mode separation
            auto s = generate(spec);
            auto mask = detect_states(s.table, KMeansConfig{});
            std::size_t agree = 0;
            for (std::size_t r = 0; r < mask.size(); ++r)
                agree += mask.states[r] == s.truth.on[r];
            double fraction = static_cast<double>(agree) / static_cast<double>(mask.size());
            if (noise == 0.0)
                exact = exact && agree == mask.size();
            else
                worst_noisy = std::min(worst_noisy, fraction);
        }
    }
    out.pass = exact && worst_noisy >= 0.99;
    out.detail = std::string("noise-free masks ") + (exact ? "exact" : "NOT exact") +
                 ", worst agreement at 5% noise " + fmt(worst_noisy * 100, 5) + "%";
    return out;
}

Outcome cophenetic_hand_check()
{
    Outcome out;
    // 1-D points 0, 1, 4, 6; single linkage merges {0,1} at 1, {4,6} at 2, root at 3.
    DistanceMatrix d(4, {1, 4, 6, 3, 5, 2});
    auto coph = cophenetic_distances(linkage(d, LinkageMethod::single));
    double value = cophenetic_correlation(d, coph);
    double expected = oracle::pearson({1, 4, 6, 3, 5, 2}, {1, 3, 3, 3, 3, 2});
    double ultra_value = 0;
    bool ultra_exact = true;
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        auto pts = oracle::random_points(rng, 3 + trial % 10, 2);
        auto ultra = cophenetic_distances(
            linkage(DistanceMatrix(pts.size(), oracle::condensed_euclidean(pts)), LinkageMethod::average));
        ultra_value = cophenetic_correlation(ultra, cophenetic_distances(linkage(ultra, LinkageMethod::single)));
        ultra_exact = ultra_exact && ultra_value == 1.0;
    }
    out.pass = std::abs(value - expected) <= 1e-12 && ultra_exact;
    out.detail = "4-point coefficient " + fmt(value, 15) + " vs Pearson " + fmt(expected, 15) +
                 ", ultrametric inputs " + (ultra_exact ? "exactly 1.0" : "NOT 1.0");
    return out;
}

nlohmann::json stripped_report(const fs::path& dir)
{
    auto doc = nlohmann::json::parse(read_file((dir / "report.json").string()));
    doc.erase("provenance");
    doc["config"].erase("output_dir");
    return doc;
}

Outcome determinism()
{
    Outcome out;
    auto root = fs::temp_directory_path() / "chillerbow_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    auto s = corpus(kCorpusSeeds[0]);
    auto schema = std::vector<ChannelSpec>(s.table.channels().begin(), s.table.channels().end());
    write_file((root / "data.csv").string(), emit_csv(s.table));
    write_file((root / "schema.json").string(), schema_to_json(schema).dump(2));

    std::vector<fs::path> runs;
    for (auto [name, workers] : std::vector<std::pair<std::string, std::size_t>>{{"w1a", 1}, {"w1b", 1}, {"w4", 4}}) {
        PipelineConfig cfg;
        cfg.input = (root / "data.csv").string();
        cfg.schema = (root / "schema.json").string();
        cfg.output_dir = (root / name).string();
        cfg.workers = workers;
        run_pipeline(cfg);
        runs.push_back(root / name);
    }
    std::size_t files = 0, differing = 0;
    for (const auto& entry : fs::directory_iterator(runs[0])) {
        auto name = entry.path().filename();
        for (std::size_t r = 1; r < runs.size(); ++r) {
            bool same = name == "report.json" ? stripped_report(runs[0]) == stripped_report(runs[r])
                                              : read_file(entry.path().string()) == read_file((runs[r] / name).string());
            differing += !same;
        }
        ++files;
    }
    out.pass = differing == 0 && files > 0;
    out.detail = std::to_string(files) + " output files compared across 3 runs (workers 1, 1, 4), " +
                 std::to_string(differing) + " differences outside provenance";
    fs::remove_all(root);
    return out;
}

} // namespace

int main()
{
    struct Criterion {
        const char* name;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria = {
        {"1 pipeline classification", classification},
        {"2 method comparison direction", method_direction},
        {"3 linkage oracle", linkage_oracle},
        {"4 DTW oracle", dtw_oracle},
        {"5 SAX statistics", sax_statistics},
        {"6 BoW length invariance", length_invariance},
        {"7 efficiency bands", efficiency_bands},
        {"8 segmentation fidelity", segmentation_fidelity},
        {"9 cophenetic hand-check", cophenetic_hand_check},
        {"10 determinism", determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << o.detail << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
