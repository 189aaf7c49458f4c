#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "globalness/common.hpp"
#include "globalness/features.hpp"
#include "globalness/graph.hpp"

namespace globalness {

struct SamplingPolicy {
    std::vector<std::int32_t> target_classes; // in-scope label classes
    int local_threshold = 1;                  // locals: mhop <= this
    int global_threshold = 3;                 // OT source: mhop >= this
    std::size_t max_per_class = 0;            // 0 = no cap
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (target_classes.empty())
            throw ConfigError("sampling: no target classes");
        if (local_threshold < 0 || global_threshold < 0)
            throw ConfigError("sampling: thresholds must be >= 0");
        if (global_threshold <= local_threshold)
            throw ConfigError("sampling: global threshold must exceed local threshold");
    }
};

enum class SampleRule : std::uint8_t { Local, Global };

/// Polarized training rows: in-scope nodes with very small MHOP keep their
/// class label; out-of-scope nodes with very large MHOP are relabeled to the
/// training class list's final "others" entry. Rows stay sorted by node id.
struct TrainingSet {
    struct Row {
        NodeId node;
        std::int32_t label; // ordinal into class_names
        SampleRule rule;
    };
    std::vector<Row> rows;
    std::vector<std::string> class_names; // targets in policy order, OT last

    std::int32_t ot_ordinal() const {
        return static_cast<std::int32_t>(class_names.size()) - 1;
    }
};

/// Applies the biased-selection rules over the label table and MHOP column.
/// Excluded and unlabeled nodes are never selected; nodes with MHOP strictly
/// between the thresholds are left out of training (they are still scored at
/// detection time). Optional per-class downsampling is uniform and seeded.
inline TrainingSet select_biased(const FeatureMatrix& features, const LabelTable& labels,
                                 const SamplingPolicy& policy,
                                 const std::string& other_label = "OT") {
    policy.validate();
    if (features.node_count() != labels.node_count())
        throw DataError("select_biased: features and labels cover different nodes");

    std::vector<std::int32_t> ordinal_of(labels.class_count(), -1);
    TrainingSet out;
    for (std::size_t i = 0; i < policy.target_classes.size(); ++i) {
        std::int32_t c = policy.target_classes[i];
        if (c < 0 || static_cast<std::size_t>(c) >= labels.class_count())
            throw ConfigError("sampling: unknown target class id " + std::to_string(c));
        ordinal_of[c] = static_cast<std::int32_t>(i);
        out.class_names.push_back(labels.class_name(c));
    }
    out.class_names.push_back(other_label);
    const std::int32_t ot = out.ot_ordinal();

    for (NodeId v = 0; v < features.node_count(); ++v) {
        if (!labels.is_labeled(v)) continue;
        std::int32_t cls = labels.class_of(v);
        int mhop = features.mhop[v];
        if (ordinal_of[cls] >= 0) {
            if (mhop <= policy.local_threshold)
                out.rows.push_back({v, ordinal_of[cls], SampleRule::Local});
        } else if (mhop >= policy.global_threshold) {
            out.rows.push_back({v, ot, SampleRule::Global});
        }
    }

    bool any_local = std::any_of(out.rows.begin(), out.rows.end(),
                                 [](const auto& r) { return r.rule == SampleRule::Local; });
    bool any_global = std::any_of(out.rows.begin(), out.rows.end(),
                                  [](const auto& r) { return r.rule == SampleRule::Global; });
    if (!any_local)
        throw DataError("sampling: empty local partition (no in-scope node with mhop <= " +
                        std::to_string(policy.local_threshold) + ")");
    if (!any_global)
        throw DataError("sampling: empty OT partition (no out-of-scope node with mhop >= " +
                        std::to_string(policy.global_threshold) + ")");

    if (policy.max_per_class > 0) {
        std::vector<TrainingSet::Row> kept;
        for (std::int32_t c = 0; c <= ot; ++c) {
            std::vector<TrainingSet::Row> members;
            for (const auto& r : out.rows)
                if (r.label == c) members.push_back(r);
            if (members.size() > policy.max_per_class) {
                std::mt19937_64 rng(derive_seed(policy.rng_seed, "sampling",
                                                static_cast<std::uint64_t>(c)));
                // partial Fisher-Yates: the first max_per_class slots become
                // a uniform sample without replacement
                for (std::size_t i = 0; i < policy.max_per_class; ++i) {
                    std::uniform_int_distribution<std::size_t> pick(i, members.size() - 1);
                    std::swap(members[i], members[pick(rng)]);
                }
                members.resize(policy.max_per_class);
            }
            kept.insert(kept.end(), members.begin(), members.end());
        }
        out.rows = std::move(kept);
    }

    std::sort(out.rows.begin(), out.rows.end(),
              [](const auto& a, const auto& b) { return a.node < b.node; });
    return out;
}

} // namespace globalness
