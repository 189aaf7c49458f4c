#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "globalness/classifiers.hpp"
#include "globalness/common.hpp"
#include "globalness/features.hpp"
#include "globalness/graph.hpp"
#include "globalness/sampler.hpp"

namespace globalness {

// ---------------------------------------------------------------------------
// Hypothesis
// ---------------------------------------------------------------------------

/// One detection scope: the in-scope classes (A side), the catch-all label
/// for everything else, the anchors representing each in-scope class, and
/// how to sample and classify.
struct Hypothesis {
    std::string scope_name;
    std::vector<std::string> target_classes;
    std::string other_label = "OT";
    AnchorSet anchors;
    SamplingPolicy sampling;
    TrainConfig classifier;
    int bfs_cap = 15;
    int surrogate = 16;

    void validate(const LabelTable& labels) const {
        if (target_classes.empty())
            throw ConfigError("hypothesis: target_classes must be non-empty");
        if (anchors.empty()) throw ConfigError("hypothesis: no anchors");
        for (const auto& name : target_classes) {
            auto c = labels.find_class(name);
            if (!c)
                throw ConfigError("hypothesis: target class '" + name +
                                  "' not in label classes");
            if (!anchors.covers_class(*c))
                throw ConfigError("hypothesis: no anchor for target class '" + name + "'");
        }
        if (labels.find_class(other_label))
            throw ConfigError("hypothesis: other_label '" + other_label +
                              "' collides with a label class");
        if (surrogate <= bfs_cap)
            throw ConfigError("hypothesis: surrogate must exceed bfs cap");
    }
};

// ---------------------------------------------------------------------------
// DetectionReport
// ---------------------------------------------------------------------------

struct NodeVerdict {
    std::string node_id;
    std::string label;     // original class
    std::string predicted; // class or OT
    int mhop = 0;
    bool is_global = false;
};

struct ClassAggregate {
    std::string class_name;
    std::size_t labeled = 0; // scored nodes of this class
    std::size_t global_count = 0;
    double percentage = 0; // 100 * global / labeled
};

struct StageTiming {
    std::string stage;
    double seconds = 0;
};

struct DetectionReport {
    std::string scope_name;
    std::string other_label;
    std::vector<std::string> target_classes;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<NodeVerdict> nodes; // canonical graph order
    std::vector<ClassAggregate> aggregates;
    std::size_t total_scored = 0;
    std::size_t total_global = 0;
    std::vector<StageTiming> timings; // in-memory only, never serialized

    std::vector<std::string> flagged_ids() const {
        std::vector<std::string> out;
        for (const auto& n : nodes)
            if (n.is_global) out.push_back(n.node_id);
        return out;
    }
};

// ---------------------------------------------------------------------------
// Four-stage detection flow
// ---------------------------------------------------------------------------

/// Stages run in order: anchors are fixed by the hypothesis, features are
/// computed, the polarized training set is selected, the classifier is
/// trained, and every labeled in-scope node is scored. A node predicted as
/// the catch-all class while carrying an in-scope label is flagged global.
/// Failures carry the stage name. A pretrained model (from a model file)
/// replaces the sampling and training stages.
inline DetectionReport run_detection(const DirectedGraph& g, const LabelTable& labels,
                                     const Hypothesis& hyp, unsigned threads = 1,
                                     const std::string& config_hash = "",
                                     const ClassifierModel* pretrained = nullptr,
                                     ClassifierModel* trained_out = nullptr) {
    using clock = std::chrono::steady_clock;
    DetectionReport report;
    report.scope_name = hyp.scope_name;
    report.other_label = hyp.other_label;
    report.target_classes = hyp.target_classes;
    report.seed = hyp.sampling.rng_seed;
    report.config_hash = config_hash;

    auto timed = [&](const char* stage, auto&& fn) {
        auto start = clock::now();
        try {
            fn();
        } catch (ConfigError& e) {
            throw ConfigError(std::string(stage) + ": " + e.what());
        } catch (DataError& e) {
            throw DataError(std::string(stage) + ": " + e.what());
        }
        report.timings.push_back(
            {stage, std::chrono::duration<double>(clock::now() - start).count()});
    };

    timed("hypothesis", [&] { hyp.validate(labels); });

    FeatureMatrix features;
    SnpRegions regions;
    timed("features", [&] {
        auto sdv = compute_sdv(g, hyp.anchors, hyp.bfs_cap, hyp.surrogate, threads);
        std::vector<std::string> region_names = hyp.target_classes;
        region_names.push_back(hyp.other_label); // catch-all bucket
        regions = make_snp_regions(labels, region_names);
        auto snp = compute_snp(g, labels, regions);
        features = assemble_features(g, hyp.anchors, sdv, snp, regions);
    });

    ClassifierModel model;
    if (pretrained) {
        timed("model-load", [&] {
            std::vector<std::string> expected = hyp.target_classes;
            expected.push_back(hyp.other_label);
            if (pretrained->class_names != expected)
                throw DataError("model class list does not match the hypothesis scope");
            if (pretrained->width != features.width)
                throw DataError("model width " + std::to_string(pretrained->width) +
                                " != feature width " + std::to_string(features.width));
            model = *pretrained;
        });
    } else {
        TrainingSet training;
        timed("sampling", [&] {
            SamplingPolicy policy = hyp.sampling;
            if (policy.target_classes.empty())
                for (const auto& name : hyp.target_classes)
                    policy.target_classes.push_back(*labels.find_class(name));
            training = select_biased(features, labels, policy, hyp.other_label);
        });
        timed("training", [&] {
            auto data = gather_training_data(features, training);
            model = train_classifier(data, hyp.classifier, threads);
        });
    }
    if (trained_out) *trained_out = model;

    timed("scoring", [&] {
        std::vector<std::int32_t> ordinal_of(labels.class_count(), -1);
        for (std::size_t i = 0; i < hyp.target_classes.size(); ++i)
            ordinal_of[*labels.find_class(hyp.target_classes[i])] =
                static_cast<std::int32_t>(i);
        const std::int32_t ot = static_cast<std::int32_t>(hyp.target_classes.size());
        std::vector<std::size_t> global_per_class(hyp.target_classes.size(), 0);
        std::vector<std::size_t> labeled_per_class(hyp.target_classes.size(), 0);

        for (NodeId v = 0; v < g.node_count(); ++v) {
            if (!labels.is_labeled(v)) continue;
            std::int32_t cls = ordinal_of[labels.class_of(v)];
            if (cls < 0) continue; // out of scope
            std::int32_t pred = model.predict(features.row(v));
            NodeVerdict verdict;
            verdict.node_id = g.name_of(v);
            verdict.label = hyp.target_classes[cls];
            verdict.predicted = model.class_names[pred];
            verdict.mhop = features.mhop[v];
            verdict.is_global = pred == ot;
            labeled_per_class[cls]++;
            if (verdict.is_global) {
                global_per_class[cls]++;
                report.total_global++;
            }
            report.total_scored++;
            report.nodes.push_back(std::move(verdict));
        }
        for (std::size_t c = 0; c < hyp.target_classes.size(); ++c) {
            ClassAggregate agg;
            agg.class_name = hyp.target_classes[c];
            agg.labeled = labeled_per_class[c];
            agg.global_count = global_per_class[c];
            agg.percentage = agg.labeled == 0
                                 ? 0.0
                                 : 100.0 * static_cast<double>(agg.global_count) /
                                       static_cast<double>(agg.labeled);
            report.aggregates.push_back(std::move(agg));
        }
    });
    return report;
}

// ---------------------------------------------------------------------------
// Definition oracle
//
// Literal evaluation of the operational definition: D_pc is the smallest raw
// hop distance (either direction) from p to any anchor of class c; the cost
// of calling p a member of class k is the weighted sum of distances to all
// other classes; p is global when at least k_balance classes come within
// epsilon of the cheapest call.
// ---------------------------------------------------------------------------

struct DefinitionParams {
    std::vector<double> weights; // per scope class; empty = all 1
    double epsilon = 0;
    std::size_t k_balance = 0; // 0 = number of scope classes
    int bfs_cap = 15;
    int surrogate = 16;

    void validate(std::size_t class_count) const {
        if (epsilon < 0) throw ConfigError("definition: epsilon must be >= 0");
        if (k_balance == 1)
            throw ConfigError("definition: k_balance must be >= 2");
        if (!weights.empty()) {
            if (weights.size() != class_count)
                throw ConfigError("definition: weights must cover every scope class");
            for (double w : weights)
                if (!(w > 0)) throw ConfigError("definition: weights must be > 0");
        }
    }
};

/// Node ids (dense) of every labeled in-scope node the definition marks
/// global. Scope = the classes owning anchors.
inline std::vector<NodeId> definition_oracle(const DirectedGraph& g,
                                             const LabelTable& labels,
                                             const AnchorSet& anchors,
                                             const DefinitionParams& params,
                                             unsigned threads = 1) {
    if (anchors.empty()) throw ConfigError("definition: no anchors");
    std::vector<std::int32_t> scope_classes;
    for (const auto& a : anchors)
        if (scope_classes.empty() || scope_classes.back() != a.class_id)
            scope_classes.push_back(a.class_id);
    params.validate(scope_classes.size());
    const std::size_t C = scope_classes.size();
    if (C < 2) throw ConfigError("definition: need at least 2 anchored classes");
    std::size_t k_balance = params.k_balance == 0 ? C : params.k_balance;

    std::vector<std::int32_t> scope_index(labels.class_count(), -1);
    for (std::size_t i = 0; i < C; ++i) scope_index[scope_classes[i]] = static_cast<std::int32_t>(i);

    // D[v*C + c] = min over anchors of class c of min(ihop, ohop), raw hops
    const std::size_t N = g.node_count();
    std::vector<double> D(N * C, static_cast<double>(params.surrogate));
    std::vector<HopMap> inward(anchors.size()), outward(anchors.size());
    parallel_for(2 * anchors.size(), threads, [&](std::size_t job) {
        std::size_t a = job / 2;
        if (job % 2 == 0)
            inward[a] = bfs_hops(g, anchors[a].node, Direction::Inward, params.bfs_cap);
        else
            outward[a] = bfs_hops(g, anchors[a].node, Direction::Outward, params.bfs_cap);
    });
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        std::size_t c = static_cast<std::size_t>(scope_index[anchors[a].class_id]);
        for (NodeId v = 0; v < N; ++v) {
            int hi = inward[a].hops[v];
            int ho = outward[a].hops[v];
            double d = static_cast<double>(params.surrogate);
            if (hi != kUnreached) d = hi;
            if (ho != kUnreached) d = std::min(d, static_cast<double>(ho));
            D[v * C + c] = std::min(D[v * C + c], d);
        }
    }

    std::vector<double> weights =
        params.weights.empty() ? std::vector<double>(C, 1.0) : params.weights;

    std::vector<NodeId> global_nodes;
    std::vector<double> delta(C);
    for (NodeId v = 0; v < N; ++v) {
        if (!labels.is_labeled(v)) continue;
        if (scope_index[labels.class_of(v)] < 0) continue;
        double weighted_total = 0;
        for (std::size_t c = 0; c < C; ++c) weighted_total += weights[c] * D[v * C + c];
        double min_delta = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < C; ++k) {
            delta[k] = weighted_total - weights[k] * D[v * C + k];
            min_delta = std::min(min_delta, delta[k]);
        }
        std::size_t near_optimal = 0;
        for (std::size_t k = 0; k < C; ++k)
            if (delta[k] <= min_delta + params.epsilon) ++near_optimal;
        if (near_optimal >= k_balance) global_nodes.push_back(v);
    }
    return global_nodes;
}

// ---------------------------------------------------------------------------
// Detector agreement
// ---------------------------------------------------------------------------

struct AgreementStats {
    std::size_t classifier_count = 0;
    std::size_t oracle_count = 0;
    std::size_t intersection = 0;
    double jaccard = 1.0; // two empty sets are identical
    double overlap_coefficient = 1.0;
};

/// Jaccard and overlap coefficient between the classifier-flagged node set
/// and the definition oracle's set.
inline AgreementStats compare_detectors(const DetectionReport& report,
                                        const DirectedGraph& g,
                                        const std::vector<NodeId>& oracle_set) {
    std::vector<std::string> a = report.flagged_ids();
    std::vector<std::string> b;
    for (NodeId v : oracle_set) b.push_back(g.name_of(v));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    AgreementStats s;
    s.classifier_count = a.size();
    s.oracle_count = b.size();
    std::vector<std::string> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    s.intersection = both.size();
    std::size_t uni = a.size() + b.size() - both.size();
    if (uni > 0) s.jaccard = static_cast<double>(both.size()) / static_cast<double>(uni);
    std::size_t mn = std::min(a.size(), b.size());
    if (mn > 0)
        s.overlap_coefficient = static_cast<double>(both.size()) / static_cast<double>(mn);
    else if (!a.empty() || !b.empty())
        s.overlap_coefficient = 0.0;
    return s;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline constexpr int kReportSchemaVersion = 1;

/// JSON document. Timings are deliberately left out so identical runs give
/// identical bytes.
inline nlohmann::ordered_json report_to_json(const DetectionReport& r) {
    nlohmann::ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["scope_name"] = r.scope_name;
    j["other_label"] = r.other_label;
    j["target_classes"] = r.target_classes;
    j["seed"] = r.seed;
    j["config_hash"] = r.config_hash;
    j["total_scored"] = r.total_scored;
    j["total_global"] = r.total_global;
    auto aggs = nlohmann::ordered_json::array();
    for (const auto& a : r.aggregates)
        aggs.push_back(nlohmann::ordered_json{{"class", a.class_name},
                                              {"labeled", a.labeled},
                                              {"global_count", a.global_count},
                                              {"percentage", a.percentage}});
    j["aggregates"] = std::move(aggs);
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& n : r.nodes)
        nodes.push_back(nlohmann::ordered_json{{"id", n.node_id},
                                               {"label", n.label},
                                               {"predicted", n.predicted},
                                               {"mhop", n.mhop},
                                               {"is_global", n.is_global}});
    j["nodes"] = std::move(nodes);
    return j;
}

inline DetectionReport report_from_json(const nlohmann::json& j) {
    if (!j.contains("schema_version") ||
        j["schema_version"].get<int>() != kReportSchemaVersion)
        throw DataError("report file: unsupported schema version");
    DetectionReport r;
    r.scope_name = j.at("scope_name").get<std::string>();
    r.other_label = j.at("other_label").get<std::string>();
    r.target_classes = j.at("target_classes").get<std::vector<std::string>>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.total_scored = j.at("total_scored").get<std::size_t>();
    r.total_global = j.at("total_global").get<std::size_t>();
    for (const auto& a : j.at("aggregates"))
        r.aggregates.push_back({a.at("class").get<std::string>(),
                                a.at("labeled").get<std::size_t>(),
                                a.at("global_count").get<std::size_t>(),
                                a.at("percentage").get<double>()});
    for (const auto& n : j.at("nodes"))
        r.nodes.push_back({n.at("id").get<std::string>(),
                           n.at("label").get<std::string>(),
                           n.at("predicted").get<std::string>(),
                           n.at("mhop").get<int>(),
                           n.at("is_global").get<bool>()});
    return r;
}

/// Per-node CSV: node_id, label, predicted, mhop, is_global.
inline void write_report_csv(std::ostream& out, const DetectionReport& r) {
    out << "node_id,label,predicted,mhop,is_global\n";
    for (const auto& n : r.nodes)
        out << n.node_id << ',' << n.label << ',' << n.predicted << ',' << n.mhop
            << ',' << (n.is_global ? 1 : 0) << '\n';
}

} // namespace globalness
