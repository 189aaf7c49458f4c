#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "globalness/common.hpp"
#include "globalness/pipeline.hpp"
#include "globalness/synthgen.hpp"

namespace globalness {

// ---------------------------------------------------------------------------
// Planted-truth scoring
// ---------------------------------------------------------------------------

struct TruthScore {
    std::size_t flagged = 0;
    std::size_t planted_in_scope = 0; // planted globals among scored nodes
    std::size_t true_positives = 0;
    double precision = 0;
    double recall = 0;
    bool precision_zero_division = false;
    bool recall_zero_division = false;
};

/// Precision/recall of the flagged-global set against planted truth. Every
/// scored node must exist in the truth table; planted globals outside the
/// report's scored universe (out-of-scope or edgeless nodes) do not count
/// toward recall.
inline TruthScore score_against_truth(const DetectionReport& report,
                                      const PlantedTruth& truth) {
    TruthScore s;
    for (const auto& n : report.nodes) {
        auto row = truth.find(n.node_id);
        if (!row)
            throw DataError("score_against_truth: node '" + n.node_id +
                            "' missing from truth table");
        if (row->planted_global) {
            s.planted_in_scope++;
            if (n.is_global) s.true_positives++;
        }
        if (n.is_global) s.flagged++;
    }
    if (s.flagged == 0)
        s.precision_zero_division = true;
    else
        s.precision = static_cast<double>(s.true_positives) /
                      static_cast<double>(s.flagged);
    if (s.planted_in_scope == 0)
        s.recall_zero_division = true;
    else
        s.recall = static_cast<double>(s.true_positives) /
                   static_cast<double>(s.planted_in_scope);
    return s;
}

// ---------------------------------------------------------------------------
// Global percentage table
// ---------------------------------------------------------------------------

struct PercentageTable {
    struct Row {
        std::string class_name;
        std::size_t labeled = 0;
        std::size_t global_count = 0;
        double percentage = 0;
    };
    std::vector<Row> rows; // sorted by percentage descending, class name tiebreak
    double mean_percentage = 0;
};

inline PercentageTable global_percentage(const DetectionReport& report) {
    PercentageTable t;
    for (const auto& a : report.aggregates)
        t.rows.push_back({a.class_name, a.labeled, a.global_count, a.percentage});
    std::sort(t.rows.begin(), t.rows.end(), [](const auto& a, const auto& b) {
        return a.percentage != b.percentage ? a.percentage > b.percentage
                                            : a.class_name < b.class_name;
    });
    for (const auto& r : t.rows) t.mean_percentage += r.percentage;
    if (!t.rows.empty()) t.mean_percentage /= static_cast<double>(t.rows.size());
    return t;
}

// ---------------------------------------------------------------------------
// Density ratio table
// ---------------------------------------------------------------------------

struct DensityTable {
    std::unordered_map<std::string, double> density; // class -> people per area

    void validate() const {
        for (const auto& [cls, d] : density)
            if (!(d > 0))
                throw DataError("density table: non-positive density for '" + cls + "'");
    }
};

/// CSV with header `class,density`.
inline DensityTable load_density_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open density file: " + path);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "class,density")
        throw DataError("density csv: unexpected header in " + path);
    DensityTable t;
    while (std::getline(in, line)) {
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        auto comma = sv.find(',');
        if (comma == std::string_view::npos)
            throw DataError("density csv: expected 'class,density'");
        t.density[std::string(sv.substr(0, comma))] = parse_double(sv.substr(comma + 1));
    }
    t.validate();
    return t;
}

struct DensityRatioTable {
    struct Row {
        std::string class_name;
        std::size_t global_count = 0;
        double density = 0;
        double ratio = 0; // global_count / density
    };
    std::vector<Row> rows; // ranked by ratio descending, class name tiebreak
};

inline DensityRatioTable density_ratio(const DetectionReport& report,
                                       const DensityTable& table) {
    table.validate();
    DensityRatioTable t;
    for (const auto& a : report.aggregates) {
        auto it = table.density.find(a.class_name);
        if (it == table.density.end())
            throw DataError("density table: missing class '" + a.class_name + "'");
        t.rows.push_back({a.class_name, a.global_count, it->second,
                          static_cast<double>(a.global_count) / it->second});
    }
    std::sort(t.rows.begin(), t.rows.end(), [](const auto& a, const auto& b) {
        return a.ratio != b.ratio ? a.ratio > b.ratio : a.class_name < b.class_name;
    });
    return t;
}

// ---------------------------------------------------------------------------
// Anchor-set stability
// ---------------------------------------------------------------------------

struct StabilityResult {
    std::size_t set_a_size = 0;
    std::size_t set_b_size = 0;
    std::size_t intersection = 0;
    double jaccard = 1.0; // identical empty sets
    double overlap_coefficient = 1.0;
};

/// Overlap of the flagged-global sets of two runs over the same graph and
/// hypothesis (only the anchor set may differ). Symmetric in its arguments.
inline StabilityResult stability_overlap(const DetectionReport& run_a,
                                         const DetectionReport& run_b) {
    std::vector<std::string> universe_a, universe_b;
    for (const auto& n : run_a.nodes) universe_a.push_back(n.node_id);
    for (const auto& n : run_b.nodes) universe_b.push_back(n.node_id);
    std::sort(universe_a.begin(), universe_a.end());
    std::sort(universe_b.begin(), universe_b.end());
    if (universe_a != universe_b)
        throw DataError("stability_overlap: runs cover different node universes");

    std::vector<std::string> a = run_a.flagged_ids();
    std::vector<std::string> b = run_b.flagged_ids();
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<std::string> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(both));
    StabilityResult s;
    s.set_a_size = a.size();
    s.set_b_size = b.size();
    s.intersection = both.size();
    std::size_t uni = a.size() + b.size() - both.size();
    if (uni > 0)
        s.jaccard = static_cast<double>(both.size()) / static_cast<double>(uni);
    std::size_t mn = std::min(a.size(), b.size());
    if (mn > 0)
        s.overlap_coefficient = static_cast<double>(both.size()) / static_cast<double>(mn);
    else if (!a.empty() || !b.empty())
        s.overlap_coefficient = 0.0;
    return s;
}

} // namespace globalness
