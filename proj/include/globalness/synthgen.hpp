#pragma once

#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "globalness/common.hpp"
#include "globalness/features.hpp"
#include "globalness/graph.hpp"

namespace globalness {

// ---------------------------------------------------------------------------
// Synthetic planted-truth graphs
//
// R region blocks of n member nodes. Locals link intra-region with p_in and
// cross-region with p_out; ordered pairs touching a planted global node are
// sampled with global_spread regardless of region, in both directions, so a
// planted global keeps its region label but connects evenly everywhere.
// Anchors are dedicated hub nodes: anchor_degree bidirectional links to
// uniformly chosen non-global members of their own region and nothing else.
// Extra anchor families add independent hub sets over the same member graph
// for stability experiments.
// ---------------------------------------------------------------------------

struct SynthConfig {
    std::size_t regions = 2;
    std::size_t nodes_per_region = 1;
    double p_in = 0;
    double p_out = 0;
    double global_fraction = 0;
    std::vector<double> global_fraction_by_region; // optional per-region override
    double global_spread = 0;
    std::size_t anchor_degree = 1;
    std::size_t anchor_families = 1;
    std::uint64_t rng_seed = 0;

    std::size_t globals_in(std::size_t region) const {
        double g = global_fraction_by_region.empty() ? global_fraction
                                                     : global_fraction_by_region[region];
        return static_cast<std::size_t>(g * static_cast<double>(nodes_per_region));
    }

    void validate() const {
        if (regions < 2) throw ConfigError("synth: regions must be >= 2");
        if (nodes_per_region < 1) throw ConfigError("synth: nodes_per_region must be >= 1");
        if (p_in < 0 || p_in > 1 || p_out < 0 || p_out > 1 || p_out > p_in)
            throw ConfigError("synth: need 0 <= p_out <= p_in <= 1");
        if (global_spread < 0 || global_spread > 1)
            throw ConfigError("synth: global_spread must be in [0,1]");
        if (!global_fraction_by_region.empty() &&
            global_fraction_by_region.size() != regions)
            throw ConfigError("synth: per-region global fractions must cover every region");
        for (std::size_t r = 0; r < regions; ++r) {
            double g = global_fraction_by_region.empty() ? global_fraction
                                                         : global_fraction_by_region[r];
            if (g < 0 || g >= 1)
                throw ConfigError("synth: global fraction must be in [0,1)");
            if (anchor_degree < 1 || anchor_degree > nodes_per_region - globals_in(r))
                throw ConfigError("synth: anchor_degree must be in [1, non-global members]");
        }
        if (anchor_families < 1) throw ConfigError("synth: anchor_families must be >= 1");
    }
};

struct TruthRow {
    std::int32_t region = 0;
    bool planted_global = false;
    bool is_anchor = false;
};

/// Ground-truth metadata for every generated node, in canonical emission
/// order (members region-major, then anchors family-major).
struct PlantedTruth {
    std::vector<std::string> node_ids;
    std::vector<TruthRow> rows;
    std::vector<std::string> region_names;

    std::optional<TruthRow> find(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return rows[it->second];
    }

    void rebuild_index() {
        index_.clear();
        for (std::size_t i = 0; i < node_ids.size(); ++i) index_[node_ids[i]] = i;
    }

private:
    std::unordered_map<std::string, std::size_t> index_;
};

struct SyntheticWorld {
    DirectedGraph graph;
    LabelTable labels;
    PlantedTruth truth;
    std::vector<AnchorSet> anchor_families;
    std::vector<std::pair<std::string, std::string>> edges; // emission order
};

namespace detail {

inline std::string zero_pad(std::size_t v, std::size_t width) {
    std::string s = std::to_string(v);
    while (s.size() < width) s.insert(s.begin(), '0');
    return s;
}

inline std::size_t digits_for(std::size_t max_value) {
    std::size_t d = 1, v = max_value;
    while (v >= 10) {
        v /= 10;
        ++d;
    }
    return d;
}

} // namespace detail

inline SyntheticWorld generate_synthetic(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t R = cfg.regions;
    const std::size_t n = cfg.nodes_per_region;
    const std::size_t members = R * n;
    const std::size_t region_width = std::max<std::size_t>(2, detail::digits_for(R - 1));
    const std::size_t member_width = std::max<std::size_t>(3, detail::digits_for(n - 1));

    SyntheticWorld world;
    auto& truth = world.truth;
    for (std::size_t r = 0; r < R; ++r)
        truth.region_names.push_back("R" + detail::zero_pad(r, region_width));

    auto member_name = [&](std::size_t r, std::size_t i) {
        return truth.region_names[r] + "N" + detail::zero_pad(i, member_width);
    };
    auto anchor_name = [&](std::size_t family, std::size_t r) {
        return truth.region_names[r] + "A" + std::to_string(family);
    };

    // planted globals, chosen per region
    std::vector<char> is_global(members, 0);
    for (std::size_t r = 0; r < R; ++r) {
        std::size_t count = cfg.globals_in(r);
        if (count == 0) continue;
        std::mt19937_64 rng(derive_seed(cfg.rng_seed, "globals", r));
        std::vector<std::size_t> pool(n);
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t i = 0; i < count; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
            std::swap(pool[i], pool[pick(rng)]);
            is_global[r * n + pool[i]] = 1;
        }
    }

    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t i = 0; i < n; ++i) {
            truth.node_ids.push_back(member_name(r, i));
            truth.rows.push_back({static_cast<std::int32_t>(r),
                                  is_global[r * n + i] != 0, false});
        }

    // member-to-member edges, one Bernoulli draw per ordered pair
    {
        std::mt19937_64 rng(derive_seed(cfg.rng_seed, "edges"));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (std::size_t u = 0; u < members; ++u) {
            std::size_t ur = u / n;
            for (std::size_t v = 0; v < members; ++v) {
                if (u == v) continue;
                double p;
                if (is_global[u] || is_global[v])
                    p = cfg.global_spread;
                else
                    p = (ur == v / n) ? cfg.p_in : cfg.p_out;
                if (p > 0 && uni(rng) < p)
                    world.edges.emplace_back(truth.node_ids[u], truth.node_ids[v]);
            }
        }
    }

    // anchor hubs: per family, per region, anchor_degree bidirectional links
    // to uniformly chosen non-global members of the same region
    for (std::size_t f = 0; f < cfg.anchor_families; ++f)
        for (std::size_t r = 0; r < R; ++r) {
            truth.node_ids.push_back(anchor_name(f, r));
            truth.rows.push_back({static_cast<std::int32_t>(r), false, true});

            std::vector<std::size_t> pool;
            for (std::size_t i = 0; i < n; ++i)
                if (!is_global[r * n + i]) pool.push_back(i);
            std::mt19937_64 rng(derive_seed(cfg.rng_seed, "anchors", f * R + r));
            for (std::size_t i = 0; i < cfg.anchor_degree; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
                std::swap(pool[i], pool[pick(rng)]);
                const std::string& m = member_name(r, pool[i]);
                world.edges.emplace_back(anchor_name(f, r), m);
                world.edges.emplace_back(m, anchor_name(f, r));
            }
        }
    truth.rebuild_index();

    DirectedGraph::Builder b;
    for (const auto& [src, dst] : world.edges) b.add_edge(src, dst);
    world.graph = b.build();

    // labels for every node present in the graph (an edgeless node cannot be
    // expressed in the edge file, so it stays outside the graph universe)
    {
        std::vector<std::int32_t> labels(world.graph.node_count(), LabelTable::kUnlabeled);
        for (std::size_t i = 0; i < truth.node_ids.size(); ++i) {
            auto node = world.graph.find(truth.node_ids[i]);
            if (node) labels[*node] = truth.rows[i].region;
        }
        world.labels = LabelTable(std::move(labels), truth.region_names);
    }

    for (std::size_t f = 0; f < cfg.anchor_families; ++f) {
        std::vector<Anchor> anchors;
        for (std::size_t r = 0; r < R; ++r)
            anchors.push_back({world.graph.require(anchor_name(f, r)),
                               static_cast<std::int32_t>(r)});
        world.anchor_families.emplace_back(std::move(anchors));
    }
    return world;
}

// ---------------------------------------------------------------------------
// File emission / truth reloading
// ---------------------------------------------------------------------------

inline void write_truth_csv(std::ostream& out, const PlantedTruth& truth) {
    out << "node_id,region,planted_global,is_anchor\n";
    for (std::size_t i = 0; i < truth.node_ids.size(); ++i) {
        const auto& row = truth.rows[i];
        out << truth.node_ids[i] << ',' << truth.region_names[row.region] << ','
            << (row.planted_global ? 1 : 0) << ',' << (row.is_anchor ? 1 : 0) << '\n';
    }
}

inline PlantedTruth load_truth_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open truth file: " + path);
    std::string line;
    if (!std::getline(in, line) ||
        trim(line) != "node_id,region,planted_global,is_anchor")
        throw DataError("truth csv: unexpected header in " + path);
    PlantedTruth truth;
    std::unordered_map<std::string, std::int32_t> region_index;
    while (std::getline(in, line)) {
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= sv.size(); ++i)
            if (i == sv.size() || sv[i] == ',') {
                cells.push_back(sv.substr(start, i - start));
                start = i + 1;
            }
        if (cells.size() != 4) throw DataError("truth csv: expected 4 columns");
        std::string region(cells[1]);
        auto [it, inserted] = region_index.try_emplace(
            region, static_cast<std::int32_t>(truth.region_names.size()));
        if (inserted) truth.region_names.push_back(region);
        truth.node_ids.emplace_back(cells[0]);
        truth.rows.push_back({it->second, parse_int(cells[2]) != 0,
                              parse_int(cells[3]) != 0});
    }
    truth.rebuild_index();
    return truth;
}

} // namespace globalness
