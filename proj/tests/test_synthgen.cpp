#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "globalness/features.hpp"
#include "globalness/synthgen.hpp"
#include "support/helpers.hpp"

using namespace globalness;

namespace {

SynthConfig base_config() {
    SynthConfig cfg;
    cfg.regions = 3;
    cfg.nodes_per_region = 40;
    cfg.p_in = 0.15;
    cfg.p_out = 0.01;
    cfg.global_fraction = 0.1;
    cfg.global_spread = 0.05;
    cfg.anchor_degree = 5;
    cfg.rng_seed = 42;
    return cfg;
}

} // namespace

TEST_CASE("minimal world: two members, two anchors, anchor edges only", "[synthgen]") {
    SynthConfig cfg;
    cfg.regions = 2;
    cfg.nodes_per_region = 1;
    cfg.p_in = 0;
    cfg.p_out = 0;
    cfg.global_fraction = 0;
    cfg.global_spread = 0;
    cfg.anchor_degree = 1;
    cfg.rng_seed = 1;

    auto world = generate_synthetic(cfg);
    CHECK(world.graph.node_count() == 4);
    CHECK(world.graph.edge_count() == 4); // one bidirectional link per region
    CHECK(world.truth.node_ids.size() == 4);
    for (const auto& a : world.anchor_families[0]) {
        auto row = world.truth.find(world.graph.name_of(a.node));
        REQUIRE(row);
        CHECK(row->is_anchor);
        CHECK_FALSE(row->planted_global);
    }
}

TEST_CASE("disconnected blocks keep anchor distances region-local", "[synthgen]") {
    auto cfg = base_config();
    cfg.p_out = 0;
    cfg.global_fraction = 0;
    auto world = generate_synthetic(cfg);

    const int cap = 15, surrogate = 16;
    auto sdv = compute_sdv(world.graph, world.anchor_families[0], cap, surrogate);
    for (NodeId v = 0; v < world.graph.node_count(); ++v) {
        auto row = world.truth.find(world.graph.name_of(v));
        REQUIRE(row);
        for (std::size_t a = 0; a < world.anchor_families[0].size(); ++a) {
            bool same_region = world.anchor_families[0][a].class_id == row->region;
            // the definition's class distance: min over both directions
            int d = std::min(sdv.ihop_row(v)[a], sdv.ohop_row(v)[a]);
            if (same_region)
                CHECK(d < surrogate);
            else
                CHECK(d == surrogate);
        }
    }
}

TEST_CASE("empirical densities track p_in and p_out", "[synthgen]") {
    SynthConfig cfg;
    cfg.regions = 3;
    cfg.nodes_per_region = 300;
    cfg.p_in = 0.02;
    cfg.p_out = 0.001;
    cfg.global_fraction = 0.05;
    cfg.global_spread = 0.02;
    cfg.anchor_degree = 10;
    cfg.rng_seed = 42;
    auto world = generate_synthetic(cfg);

    // count ordered local-member pairs only (globals and anchors follow
    // different rules)
    std::set<std::pair<std::string, std::string>> edge_set(world.edges.begin(),
                                                           world.edges.end());
    auto is_local_member = [](const TruthRow& r) {
        return !r.planted_global && !r.is_anchor;
    };
    std::size_t intra_pairs = 0, intra_edges = 0, inter_pairs = 0, inter_edges = 0;
    const auto& ids = world.truth.node_ids;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto ri = *world.truth.find(ids[i]);
        if (!is_local_member(ri)) continue;
        for (std::size_t j = 0; j < ids.size(); ++j) {
            if (i == j) continue;
            auto rj = *world.truth.find(ids[j]);
            if (!is_local_member(rj)) continue;
            bool has_edge = edge_set.count({ids[i], ids[j]}) > 0;
            if (ri.region == rj.region) {
                ++intra_pairs;
                intra_edges += has_edge;
            } else {
                ++inter_pairs;
                inter_edges += has_edge;
            }
        }
    }
    double intra_density = static_cast<double>(intra_edges) / intra_pairs;
    double inter_density = static_cast<double>(inter_edges) / inter_pairs;
    CHECK(intra_density > 0.8 * cfg.p_in);
    CHECK(intra_density < 1.2 * cfg.p_in);
    CHECK(inter_density > 0.8 * cfg.p_out);
    CHECK(inter_density < 1.2 * cfg.p_out);
}

TEST_CASE("identical config gives an identical edge set", "[synthgen]") {
    auto cfg = base_config();
    auto a = generate_synthetic(cfg);
    auto b = generate_synthetic(cfg);
    CHECK(a.edges == b.edges);
    CHECK(a.truth.node_ids == b.truth.node_ids);

    cfg.rng_seed = 43;
    auto c = generate_synthetic(cfg);
    CHECK(a.edges != c.edges);
}

TEST_CASE("per-region label counts are members plus anchor", "[synthgen]") {
    auto cfg = base_config();
    auto world = generate_synthetic(cfg);
    std::vector<std::size_t> counts(cfg.regions, 0);
    for (NodeId v = 0; v < world.graph.node_count(); ++v)
        if (world.labels.is_labeled(v)) counts[world.labels.class_of(v)]++;
    for (std::size_t r = 0; r < cfg.regions; ++r)
        CHECK(counts[r] == cfg.nodes_per_region + 1);
}

TEST_CASE("planted counts follow the fraction, anchors stay local", "[synthgen]") {
    auto cfg = base_config();
    cfg.global_fraction_by_region = {0.3, 0.1, 0.1};
    auto world = generate_synthetic(cfg);

    std::vector<std::size_t> planted(cfg.regions, 0);
    for (std::size_t i = 0; i < world.truth.node_ids.size(); ++i) {
        const auto& row = world.truth.rows[i];
        if (row.planted_global) {
            CHECK_FALSE(row.is_anchor);
            planted[row.region]++;
        }
    }
    CHECK(planted[0] == 12); // floor(0.3 * 40)
    CHECK(planted[1] == 4);
    CHECK(planted[2] == 4);
}

TEST_CASE("planted globals spread more than locals in expectation", "[synthgen]") {
    // with global_spread = p_in the documented inequality is strict
    auto cfg = base_config();
    cfg.global_spread = cfg.p_in;
    double global_cross = 0, local_intra = 0;
    std::size_t globals = 0, locals = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        cfg.rng_seed = seed;
        auto world = generate_synthetic(cfg);
        for (NodeId v = 0; v < world.graph.node_count(); ++v) {
            auto row = *world.truth.find(world.graph.name_of(v));
            if (row.is_anchor) continue;
            std::size_t cross = 0, intra = 0;
            for (NodeId u : world.graph.out_neighbors(v)) {
                auto other = *world.truth.find(world.graph.name_of(u));
                if (other.is_anchor) continue;
                (other.region == row.region ? intra : cross)++;
            }
            if (row.planted_global) {
                global_cross += static_cast<double>(cross);
                ++globals;
            } else {
                local_intra += static_cast<double>(intra);
                ++locals;
            }
        }
    }
    CHECK(global_cross / static_cast<double>(globals) >=
          local_intra / static_cast<double>(locals));
}

TEST_CASE("extra anchor families reuse the same member graph", "[synthgen]") {
    auto cfg = base_config();
    auto single = generate_synthetic(cfg);
    cfg.anchor_families = 2;
    auto dual = generate_synthetic(cfg);

    REQUIRE(dual.anchor_families.size() == 2);
    // member-to-member edges identical; only anchor links were added
    auto members_only = [](const SyntheticWorld& w) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& e : w.edges)
            if (e.first.find('A') == std::string::npos &&
                e.second.find('A') == std::string::npos)
                out.push_back(e);
        return out;
    };
    CHECK(members_only(single) == members_only(dual));

    // families are disjoint node sets, each covering every region
    std::set<NodeId> family_a, family_b;
    for (const auto& a : dual.anchor_families[0]) family_a.insert(a.node);
    for (const auto& a : dual.anchor_families[1]) family_b.insert(a.node);
    for (NodeId n : family_a) CHECK_FALSE(family_b.count(n));
    CHECK(dual.anchor_families[1].covers_class(0));
    CHECK(dual.anchor_families[1].covers_class(2));

    // labels cover both families: members + 2 anchors per region
    std::vector<std::size_t> counts(cfg.regions, 0);
    for (NodeId v = 0; v < dual.graph.node_count(); ++v)
        if (dual.labels.is_labeled(v)) counts[dual.labels.class_of(v)]++;
    for (std::size_t r = 0; r < cfg.regions; ++r)
        CHECK(counts[r] == cfg.nodes_per_region + 2);
}

TEST_CASE("config validation", "[synthgen]") {
    auto ok = base_config();
    CHECK_NOTHROW(ok.validate());

    auto bad = ok;
    bad.regions = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = ok;
    bad.p_out = 0.5; // above p_in
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = ok;
    bad.global_fraction = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = ok;
    bad.anchor_degree = 40; // more than the non-global members
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = ok;
    bad.global_fraction_by_region = {0.1, 0.1}; // wrong arity
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = ok;
    bad.anchor_families = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("truth csv round-trips", "[synthgen]") {
    auto world = generate_synthetic(base_config());
    std::stringstream buf;
    write_truth_csv(buf, world.truth);
    auto path = test_support::write_file("truth_roundtrip.csv", buf.str());
    auto loaded = load_truth_csv(path.string());

    REQUIRE(loaded.node_ids == world.truth.node_ids);
    for (std::size_t i = 0; i < loaded.node_ids.size(); ++i) {
        CHECK(loaded.rows[i].planted_global == world.truth.rows[i].planted_global);
        CHECK(loaded.rows[i].is_anchor == world.truth.rows[i].is_anchor);
        CHECK(loaded.region_names[loaded.rows[i].region] ==
              world.truth.region_names[world.truth.rows[i].region]);
    }
}
