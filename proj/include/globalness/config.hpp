#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "globalness/classifiers.hpp"
#include "globalness/common.hpp"
#include "globalness/pipeline.hpp"
#include "globalness/synthgen.hpp"

namespace globalness {

/// One structured JSON config drives every command, so runs are archivable
/// and diffable (the stability guard depends on that). The parsed copy keeps
/// every default filled in and the seed explicit.
class RunConfig {
public:
    static RunConfig from_json(nlohmann::ordered_json j,
                               const std::filesystem::path& base_dir = ".") {
        RunConfig c;
        c.base_dir_ = base_dir;
        if (!j.is_object()) throw ConfigError("config: document must be a JSON object");

        c.seed_ = j.value("seed", std::uint64_t{0});
        c.threads_ = j.value("threads", 1u);
        if (c.threads_ < 1) throw ConfigError("config: threads must be >= 1");

        auto paths = j.value("paths", nlohmann::ordered_json::object());
        auto path_or_empty = [&](const char* key) -> std::string {
            if (!paths.contains(key) || paths[key].is_null()) return {};
            return paths[key].get<std::string>();
        };
        c.edges_path_ = path_or_empty("edges");
        c.labels_path_ = path_or_empty("labels");
        c.mapping_path_ = path_or_empty("mapping");
        c.anchors_path_ = path_or_empty("anchors");
        c.density_path_ = path_or_empty("density");
        c.truth_path_ = path_or_empty("truth");
        c.model_path_ = path_or_empty("model");
        c.output_dir_ = path_or_empty("output_dir");
        if (c.output_dir_.empty()) c.output_dir_ = "out";

        if (j.contains("synth") && !j["synth"].is_null()) {
            const auto& s = j["synth"];
            SynthConfig sc;
            sc.regions = s.value("regions", std::size_t{2});
            sc.nodes_per_region = s.value("nodes_per_region", std::size_t{1});
            sc.p_in = s.value("p_in", 0.0);
            sc.p_out = s.value("p_out", 0.0);
            sc.global_fraction = s.value("global_fraction", 0.0);
            if (s.contains("global_fraction_by_region") &&
                !s["global_fraction_by_region"].is_null())
                sc.global_fraction_by_region =
                    s["global_fraction_by_region"].get<std::vector<double>>();
            sc.global_spread = s.value("global_spread", 0.0);
            sc.anchor_degree = s.value("anchor_degree", std::size_t{1});
            sc.anchor_families = s.value("anchor_families", std::size_t{1});
            sc.rng_seed = derive_seed(c.seed_, "synth");
            c.synth_ = sc;
        }

        auto hyp = j.value("hypothesis", nlohmann::ordered_json::object());
        c.scope_name_ = hyp.value("scope_name", std::string("run"));
        if (hyp.contains("target_classes"))
            c.target_classes_ = hyp["target_classes"].get<std::vector<std::string>>();
        c.other_label_ = hyp.value("other_label", std::string("OT"));

        auto feat = j.value("features", nlohmann::ordered_json::object());
        c.bfs_cap_ = feat.value("bfs_cap", 15);
        c.surrogate_ = feat.value("surrogate", c.bfs_cap_ + 1);

        auto samp = j.value("sampling", nlohmann::ordered_json::object());
        c.sampling_.local_threshold = samp.value("local_threshold", 1);
        c.sampling_.global_threshold = samp.value("global_threshold", 3);
        c.sampling_.max_per_class = samp.value("max_per_class", std::size_t{0});
        c.sampling_.rng_seed = c.seed_;

        auto cls = j.value("classifier", nlohmann::ordered_json::object());
        c.classifier_.kind = classifier_kind_from(cls.value("kind", std::string("random_forest")));
        c.classifier_.trees = cls.value("trees", 100);
        c.classifier_.max_depth = cls.value("max_depth", 12);
        c.classifier_.min_leaf = cls.value("min_leaf", 1);
        c.classifier_.features_per_split = cls.value("features_per_split", 0);
        c.classifier_.bootstrap = cls.value("bootstrap", true);
        c.classifier_.rounds = cls.value("rounds", 100);
        c.classifier_.variance_floor = cls.value("variance_floor", 1e-6);
        c.classifier_.rng_seed = c.seed_;

        auto def = j.value("definition", nlohmann::ordered_json::object());
        c.definition_.epsilon = def.value("epsilon", 0.0);
        c.definition_.k_balance = def.value("k_balance", std::size_t{0});
        if (def.contains("weights") && !def["weights"].is_null())
            c.definition_.weights = def["weights"].get<std::vector<double>>();
        c.definition_.bfs_cap = c.bfs_cap_;
        c.definition_.surrogate = c.surrogate_;

        return c;
    }

    static RunConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        try {
            auto j = nlohmann::ordered_json::parse(in);
            return from_json(std::move(j), std::filesystem::path(path).parent_path());
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config error in " + path + ": " + e.what());
        }
    }

    void override_seed(std::uint64_t seed) {
        seed_ = seed;
        sampling_.rng_seed = seed;
        classifier_.rng_seed = seed;
        if (synth_) synth_->rng_seed = derive_seed(seed, "synth");
    }

    void override_threads(unsigned threads) {
        if (threads < 1) throw ConfigError("threads must be >= 1");
        threads_ = threads;
    }

    std::uint64_t seed() const { return seed_; }
    unsigned threads() const { return threads_; }
    const std::optional<SynthConfig>& synth() const { return synth_; }

    const SynthConfig& require_synth() const {
        if (!synth_) throw ConfigError("config: missing 'synth' section");
        return *synth_;
    }

    // synth-driven configs default to the files cmd_gen writes, so one
    // config can drive gen and detect back to back
    std::string edges_path() const {
        if (edges_path_.empty() && synth_) return (output_dir() / "edges.tsv").string();
        return resolve(edges_path_, "paths.edges");
    }
    std::string labels_path() const {
        if (labels_path_.empty() && synth_) return (output_dir() / "labels.tsv").string();
        return resolve(labels_path_, "paths.labels");
    }
    std::string anchors_path() const {
        if (anchors_path_.empty() && synth_) return (output_dir() / "anchors.tsv").string();
        return resolve(anchors_path_, "paths.anchors");
    }
    std::optional<std::string> mapping_path() const {
        if (mapping_path_.empty()) return std::nullopt;
        return resolve(mapping_path_, "paths.mapping");
    }
    std::optional<std::string> density_path() const {
        if (density_path_.empty()) return std::nullopt;
        return resolve(density_path_, "paths.density");
    }
    std::optional<std::string> truth_path() const {
        if (truth_path_.empty() && synth_) return (output_dir() / "truth.csv").string();
        if (truth_path_.empty()) return std::nullopt;
        return resolve(truth_path_, "paths.truth");
    }
    /// Pre-trained model to deploy instead of training (detect only).
    std::optional<std::string> model_path() const {
        if (model_path_.empty()) return std::nullopt;
        return resolve(model_path_, "paths.model");
    }
    std::filesystem::path output_dir() const {
        return base_dir_.empty() ? std::filesystem::path(output_dir_)
                                 : base_dir_ / output_dir_;
    }

    const std::vector<std::string>& target_classes() const { return target_classes_; }
    const SamplingPolicy& sampling() const { return sampling_; }
    const TrainConfig& classifier() const { return classifier_; }
    const DefinitionParams& definition() const { return definition_; }
    int bfs_cap() const { return bfs_cap_; }
    int surrogate() const { return surrogate_; }

    Hypothesis build_hypothesis(const LabelTable& labels, AnchorSet anchors) const {
        Hypothesis h;
        h.scope_name = scope_name_;
        h.target_classes = target_classes_;
        if (h.target_classes.empty())
            h.target_classes = labels.class_names(); // scope = every labeled class
        h.other_label = other_label_;
        h.anchors = std::move(anchors);
        h.sampling = sampling_;
        for (const auto& name : h.target_classes) {
            auto c = labels.find_class(name);
            if (!c)
                throw ConfigError("hypothesis: target class '" + name +
                                  "' not in label classes");
            h.sampling.target_classes.push_back(*c);
        }
        h.classifier = classifier_;
        h.bfs_cap = bfs_cap_;
        h.surrogate = surrogate_;
        return h;
    }

    /// Fully resolved document: every default made explicit. This is what
    /// gets persisted next to run outputs and what the stability guard
    /// compares.
    nlohmann::ordered_json resolved() const {
        // threads is a runtime knob with no effect on results, so it stays
        // out of the persisted document and the config hash
        nlohmann::ordered_json j;
        j["seed"] = seed_;
        j["paths"] = nlohmann::ordered_json{
            {"edges", edges_path_},     {"labels", labels_path_},
            {"mapping", mapping_path_}, {"anchors", anchors_path_},
            {"density", density_path_}, {"truth", truth_path_},
            {"model", model_path_},     {"output_dir", output_dir_}};
        if (synth_) {
            j["synth"] = nlohmann::ordered_json{
                {"regions", synth_->regions},
                {"nodes_per_region", synth_->nodes_per_region},
                {"p_in", synth_->p_in},
                {"p_out", synth_->p_out},
                {"global_fraction", synth_->global_fraction},
                {"global_fraction_by_region", synth_->global_fraction_by_region},
                {"global_spread", synth_->global_spread},
                {"anchor_degree", synth_->anchor_degree},
                {"anchor_families", synth_->anchor_families}};
        } else {
            j["synth"] = nullptr;
        }
        j["hypothesis"] = nlohmann::ordered_json{{"scope_name", scope_name_},
                                                 {"target_classes", target_classes_},
                                                 {"other_label", other_label_}};
        j["features"] = nlohmann::ordered_json{{"bfs_cap", bfs_cap_},
                                               {"surrogate", surrogate_}};
        j["sampling"] = nlohmann::ordered_json{
            {"local_threshold", sampling_.local_threshold},
            {"global_threshold", sampling_.global_threshold},
            {"max_per_class", sampling_.max_per_class}};
        j["classifier"] = nlohmann::ordered_json{
            {"kind", to_string(classifier_.kind)},
            {"trees", classifier_.trees},
            {"max_depth", classifier_.max_depth},
            {"min_leaf", classifier_.min_leaf},
            {"features_per_split", classifier_.features_per_split},
            {"bootstrap", classifier_.bootstrap},
            {"rounds", classifier_.rounds},
            {"variance_floor", classifier_.variance_floor}};
        j["definition"] = nlohmann::ordered_json{{"epsilon", definition_.epsilon},
                                                 {"k_balance", definition_.k_balance},
                                                 {"weights", definition_.weights}};
        return j;
    }

    std::string config_hash() const {
        std::string dump = resolved().dump();
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(detail::fnv1a64(dump)));
        return std::string(buf);
    }

private:
    std::string resolve(const std::string& p, const char* key) const {
        if (p.empty())
            throw ConfigError(std::string("config: missing ") + key);
        std::filesystem::path fp(p);
        if (fp.is_absolute() || base_dir_.empty()) return p;
        return (base_dir_ / fp).string();
    }

    std::filesystem::path base_dir_;
    std::uint64_t seed_ = 0;
    unsigned threads_ = 1;
    std::string edges_path_, labels_path_, mapping_path_, anchors_path_;
    std::string density_path_, truth_path_, model_path_, output_dir_;
    std::optional<SynthConfig> synth_;
    std::string scope_name_ = "run";
    std::vector<std::string> target_classes_;
    std::string other_label_ = "OT";
    int bfs_cap_ = 15;
    int surrogate_ = 16;
    SamplingPolicy sampling_;
    TrainConfig classifier_;
    DefinitionParams definition_;
};

} // namespace globalness
