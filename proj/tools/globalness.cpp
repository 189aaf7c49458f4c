// Command-line front end: gen | features | detect | eval | stability.
// One JSON config drives a run; exit codes are 0 success, 1 usage/config,
// 2 data, 3 internal.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "globalness/config.hpp"
#include "globalness/eval.hpp"
#include "globalness/pipeline.hpp"
#include "globalness/synthgen.hpp"

namespace fs = std::filesystem;
using namespace globalness;

namespace {

struct LoadedInputs {
    DirectedGraph graph;
    LabelTable labels;
    AnchorSet anchors;
};

LoadedInputs load_inputs(const RunConfig& cfg, const std::string& anchors_path) {
    LoadedInputs in;
    in.graph = load_edges(cfg.edges_path());
    in.labels = load_labels(in.graph, cfg.labels_path(), cfg.mapping_path());
    in.anchors = load_anchors(in.graph, in.labels, anchors_path);
    return in;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

void persist_config(const RunConfig& cfg, const fs::path& dir) {
    write_text_file(dir / "config.json", cfg.resolved().dump(2) + "\n");
}

int cmd_gen(const RunConfig& cfg) {
    const SynthConfig& synth = cfg.require_synth();
    SyntheticWorld world = generate_synthetic(synth);

    fs::path dir = cfg.output_dir();
    fs::create_directories(dir);

    {
        std::ofstream out(dir / "edges.tsv", std::ios::binary);
        out << "# src\tdst\n";
        for (const auto& [src, dst] : world.edges) out << src << '\t' << dst << '\n';
    }
    {
        std::ofstream out(dir / "labels.tsv", std::ios::binary);
        for (std::size_t i = 0; i < world.truth.node_ids.size(); ++i)
            out << world.truth.node_ids[i] << '\t'
                << world.truth.region_names[world.truth.rows[i].region] << '\n';
    }
    for (std::size_t f = 0; f < synth.anchor_families; ++f) {
        fs::path name = f == 0 ? fs::path("anchors.tsv")
                               : fs::path("anchors_" + std::to_string(f) + ".tsv");
        std::ofstream out(dir / name, std::ios::binary);
        for (const auto& a : world.anchor_families[f])
            out << world.graph.name_of(a.node) << '\t'
                << world.labels.class_name(a.class_id) << '\n';
    }
    {
        std::ofstream out(dir / "truth.csv", std::ios::binary);
        write_truth_csv(out, world.truth);
    }
    persist_config(cfg, dir);

    std::size_t planted = 0;
    for (const auto& r : world.truth.rows) planted += r.planted_global;
    std::cout << "generated " << world.graph.node_count() << " nodes, "
              << world.graph.edge_count() << " edges ("
              << world.graph.ingest_stats().duplicates_dropped << " duplicates, "
              << world.graph.ingest_stats().self_loops_dropped << " self-loops dropped)\n"
              << "regions: " << synth.regions << " x " << synth.nodes_per_region
              << " members, planted globals: " << planted << ", anchor families: "
              << synth.anchor_families << "\n"
              << "wrote edges.tsv labels.tsv anchors*.tsv truth.csv to " << dir.string()
              << "\n";
    return 0;
}

int cmd_features(const RunConfig& cfg) {
    auto in = load_inputs(cfg, cfg.anchors_path());
    auto hyp = cfg.build_hypothesis(in.labels, in.anchors);
    hyp.validate(in.labels);

    auto sdv = compute_sdv(in.graph, hyp.anchors, hyp.bfs_cap, hyp.surrogate,
                           cfg.threads());
    std::vector<std::string> region_names = hyp.target_classes;
    region_names.push_back(hyp.other_label);
    auto regions = make_snp_regions(in.labels, region_names);
    auto snp = compute_snp(in.graph, in.labels, regions);
    auto features = assemble_features(in.graph, hyp.anchors, sdv, snp, regions);

    fs::path dir = cfg.output_dir();
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "features.csv", std::ios::binary);
        write_features_csv(out, in.graph, features);
    }
    std::cout << "wrote " << features.node_count() << " rows x " << features.width
              << " feature columns to " << (dir / "features.csv").string() << "\n";
    return 0;
}

int cmd_detect(const RunConfig& cfg) {
    auto in = load_inputs(cfg, cfg.anchors_path());
    auto hyp = cfg.build_hypothesis(in.labels, in.anchors);

    std::optional<ClassifierModel> pretrained;
    if (auto model_path = cfg.model_path()) {
        std::ifstream model_in(*model_path);
        if (!model_in) throw ConfigError("cannot open model file: " + *model_path);
        try {
            pretrained = deserialize_model(
                std::string(std::istreambuf_iterator<char>(model_in), {}));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("model error in " + *model_path + ": " + e.what());
        }
    }
    ClassifierModel model;
    DetectionReport report =
        run_detection(in.graph, in.labels, hyp, cfg.threads(), cfg.config_hash(),
                      pretrained ? &*pretrained : nullptr, &model);

    fs::path dir = cfg.output_dir();
    fs::create_directories(dir);
    write_text_file(dir / "report.json", report_to_json(report).dump(2) + "\n");
    {
        std::ofstream out(dir / "report.csv", std::ios::binary);
        write_report_csv(out, report);
    }
    write_text_file(dir / "model.json", serialize_model(model));
    persist_config(cfg, dir);

    std::cout << "scored " << report.total_scored << " nodes, flagged "
              << report.total_global << " global\n";
    for (const auto& a : report.aggregates)
        std::cout << "  " << a.class_name << ": " << a.global_count << "/" << a.labeled
                  << " (" << a.percentage << "%)\n";
    for (const auto& t : report.timings)
        std::cerr << "[timing] " << t.stage << ": " << t.seconds << "s\n";
    std::cout << "wrote report.json and report.csv to " << dir.string() << "\n";
    return 0;
}

DetectionReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open report file: " + path);
    try {
        return report_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("report error in " + path + ": " + e.what());
    }
}

int cmd_eval(const std::string& report_path, const std::optional<std::string>& truth_path,
             const std::optional<std::string>& density_path) {
    if (!truth_path && !density_path)
        throw ConfigError("eval: pass --truth and/or --density");
    DetectionReport report = load_report(report_path);
    fs::path dir = fs::path(report_path).parent_path();
    nlohmann::ordered_json sections;

    auto table = global_percentage(report);
    std::cout << "global percentage by class (descending):\n";
    {
        std::string csv = "class,labeled,global_count,percentage\n";
        auto rows = nlohmann::ordered_json::array();
        for (const auto& r : table.rows) {
            std::cout << "  " << r.class_name << ": " << r.global_count << "/"
                      << r.labeled << " (" << r.percentage << "%)\n";
            csv += r.class_name + "," + std::to_string(r.labeled) + "," +
                   std::to_string(r.global_count) + "," + format_double(r.percentage) +
                   "\n";
            rows.push_back(nlohmann::ordered_json{{"class", r.class_name},
                                                  {"labeled", r.labeled},
                                                  {"global_count", r.global_count},
                                                  {"percentage", r.percentage}});
        }
        std::cout << "  mean: " << table.mean_percentage << "%\n";
        write_text_file(dir / "eval_percentages.csv", csv);
        sections["percentages"] =
            nlohmann::ordered_json{{"rows", std::move(rows)},
                                   {"mean_percentage", table.mean_percentage}};
    }

    if (truth_path) {
        PlantedTruth truth = load_truth_csv(*truth_path);
        TruthScore score = score_against_truth(report, truth);
        std::cout << "planted-truth score: precision " << score.precision << " ("
                  << score.true_positives << "/" << score.flagged << "), recall "
                  << score.recall << " (" << score.true_positives << "/"
                  << score.planted_in_scope << ")\n";
        std::string csv = "metric,value\nprecision," + format_double(score.precision) +
                          "\nrecall," + format_double(score.recall) + "\nflagged," +
                          std::to_string(score.flagged) + "\nplanted_in_scope," +
                          std::to_string(score.planted_in_scope) + "\ntrue_positives," +
                          std::to_string(score.true_positives) + "\n";
        write_text_file(dir / "eval_scores.csv", csv);
        sections["truth_score"] =
            nlohmann::ordered_json{{"precision", score.precision},
                                   {"recall", score.recall},
                                   {"flagged", score.flagged},
                                   {"planted_in_scope", score.planted_in_scope},
                                   {"true_positives", score.true_positives}};
    }

    if (density_path) {
        DensityTable density = load_density_csv(*density_path);
        auto ratios = density_ratio(report, density);
        std::cout << "global count / population density (descending):\n";
        std::string csv = "class,global_count,density,ratio\n";
        auto rows = nlohmann::ordered_json::array();
        for (const auto& r : ratios.rows) {
            std::cout << "  " << r.class_name << ": " << r.ratio << "\n";
            csv += r.class_name + "," + std::to_string(r.global_count) + "," +
                   format_double(r.density) + "," + format_double(r.ratio) + "\n";
            rows.push_back(nlohmann::ordered_json{{"class", r.class_name},
                                                  {"global_count", r.global_count},
                                                  {"density", r.density},
                                                  {"ratio", r.ratio}});
        }
        write_text_file(dir / "eval_density_ratio.csv", csv);
        sections["density_ratio"] = nlohmann::ordered_json{{"rows", std::move(rows)}};
    }

    write_text_file(dir / "eval.json", sections.dump(2) + "\n");
    return 0;
}

/// Keys (as JSON pointers) whose values differ between two documents.
void diff_json(const nlohmann::ordered_json& a, const nlohmann::ordered_json& b,
               const std::string& prefix, std::vector<std::string>& out) {
    if (a.is_object() && b.is_object()) {
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key()))
                out.push_back(prefix + "/" + it.key());
            else
                diff_json(it.value(), b[it.key()], prefix + "/" + it.key(), out);
        }
        for (auto it = b.begin(); it != b.end(); ++it)
            if (!a.contains(it.key())) out.push_back(prefix + "/" + it.key());
        return;
    }
    if (a != b) out.push_back(prefix.empty() ? "/" : prefix);
}

int cmd_stability(const RunConfig& cfg_a, const RunConfig& cfg_b) {
    auto doc_a = cfg_a.resolved();
    auto doc_b = cfg_b.resolved();
    doc_a["paths"].erase("anchors");
    doc_b["paths"].erase("anchors");
    std::vector<std::string> diffs;
    diff_json(doc_a, doc_b, "", diffs);
    if (!diffs.empty()) {
        std::string msg = "stability: configs differ beyond anchors:";
        for (const auto& d : diffs) msg += " " + d;
        throw ConfigError(msg);
    }

    auto in_a = load_inputs(cfg_a, cfg_a.anchors_path());
    auto hyp_a = cfg_a.build_hypothesis(in_a.labels, in_a.anchors);
    DetectionReport run_a =
        run_detection(in_a.graph, in_a.labels, hyp_a, cfg_a.threads(), cfg_a.config_hash());

    auto anchors_b = load_anchors(in_a.graph, in_a.labels, cfg_b.anchors_path());
    auto hyp_b = cfg_b.build_hypothesis(in_a.labels, anchors_b);
    DetectionReport run_b =
        run_detection(in_a.graph, in_a.labels, hyp_b, cfg_b.threads(), cfg_b.config_hash());

    StabilityResult s = stability_overlap(run_a, run_b);
    std::cout << "flagged sets: A=" << s.set_a_size << " B=" << s.set_b_size
              << " intersection=" << s.intersection << "\n"
              << "jaccard: " << s.jaccard << "\n"
              << "overlap_coefficient: " << s.overlap_coefficient << "\n";

    fs::path dir = cfg_a.output_dir();
    fs::create_directories(dir);
    nlohmann::ordered_json j{{"set_a_size", s.set_a_size},
                             {"set_b_size", s.set_b_size},
                             {"intersection", s.intersection},
                             {"jaccard", s.jaccard},
                             {"overlap_coefficient", s.overlap_coefficient}};
    write_text_file(dir / "stability.json", j.dump(2) + "\n");
    {
        std::ofstream out(dir / "report_a.csv", std::ios::binary);
        write_report_csv(out, run_a);
    }
    {
        std::ofstream out(dir / "report_b.csv", std::ios::binary);
        write_report_csv(out, run_b);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"anchor-based global-node detection in directed labeled graphs"};
    app.require_subcommand(1);

    std::string config_path, config_b_path, report_path;
    std::optional<std::string> truth_path, density_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<unsigned> threads_override;

    auto add_common = [&](CLI::App* sub, bool needs_config = true) {
        if (needs_config)
            sub->add_option("--config", config_path, "run config (JSON)")->required();
        sub->add_option("--seed", seed_override, "override config seed");
        sub->add_option("--threads", threads_override, "worker threads");
    };

    auto* gen = app.add_subcommand("gen", "generate a synthetic planted-truth dataset");
    add_common(gen);
    auto* features = app.add_subcommand("features", "dump the feature matrix as CSV");
    add_common(features);
    auto* detect = app.add_subcommand("detect", "run the four-stage detection flow");
    add_common(detect);
    auto* eval = app.add_subcommand("eval", "score a detection report");
    eval->add_option("--report", report_path, "report.json from detect")->required();
    eval->add_option("--truth", truth_path, "planted-truth CSV");
    eval->add_option("--density", density_path, "population density CSV");
    auto* stability = app.add_subcommand("stability", "compare two anchor families");
    stability->add_option("--config-a", config_path, "first run config")->required();
    stability->add_option("--config-b", config_b_path, "second run config")->required();
    stability->add_option("--seed", seed_override, "override both seeds");
    stability->add_option("--threads", threads_override, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        auto load_cfg = [&](const std::string& path) {
            RunConfig cfg = RunConfig::load(path);
            if (seed_override) cfg.override_seed(*seed_override);
            if (threads_override) cfg.override_threads(*threads_override);
            return cfg;
        };
        if (gen->parsed()) return cmd_gen(load_cfg(config_path));
        if (features->parsed()) return cmd_features(load_cfg(config_path));
        if (detect->parsed()) return cmd_detect(load_cfg(config_path));
        if (eval->parsed()) return cmd_eval(report_path, truth_path, density_path);
        if (stability->parsed())
            return cmd_stability(load_cfg(config_path), load_cfg(config_b_path));
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
