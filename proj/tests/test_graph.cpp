#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <sstream>

#include "globalness/graph.hpp"
#include "support/helpers.hpp"

using namespace globalness;
namespace ts = test_support;

TEST_CASE("load_edges collapses duplicates", "[graph]") {
    auto path = ts::write_file("edges_dup.tsv", "a\tb\nb\tc\na\tb\n");
    auto g = load_edges(path.string());
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 2);
    CHECK(g.ingest_stats().duplicates_dropped == 1);
    CHECK(g.out_neighbors(g.require("a")).size() == 1);
}

TEST_CASE("load_edges drops self-loops", "[graph]") {
    auto path = ts::write_file("edges_loop.tsv", "a\ta\n");
    auto g = load_edges(path.string());
    CHECK(g.node_count() == 1);
    CHECK(g.edge_count() == 0);
    CHECK(g.ingest_stats().self_loops_dropped == 1);
}

TEST_CASE("load_edges ignores comments and blank lines", "[graph]") {
    auto path = ts::write_file("edges_comment.tsv", "# header\na\tb\n\n# tail\nb\tc\n");
    auto g = load_edges(path.string());
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 2);
}

TEST_CASE("load_edges matches a naive line-set oracle", "[graph]") {
    std::mt19937_64 rng(7);
    auto edges = ts::random_edges(rng, 10, 30, /*allow_self_loops=*/true);
    std::string text;
    for (const auto& [src, dst] : edges) text += src + "\t" + dst + "\n";
    auto path = ts::write_file("edges_random.tsv", text);
    auto g = load_edges(path.string());

    // oracle: parse the same text line by line into a set, drop self-loops
    std::set<std::pair<std::string, std::string>> expected;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto tab = line.find('\t');
        std::string src = line.substr(0, tab), dst = line.substr(tab + 1);
        if (src != dst) expected.insert({src, dst});
    }

    std::set<std::pair<std::string, std::string>> actual;
    for (NodeId u = 0; u < g.node_count(); ++u)
        for (NodeId v : g.out_neighbors(u))
            actual.insert({g.name_of(u), g.name_of(v)});
    CHECK(actual == expected);
}

TEST_CASE("load_edges error contract", "[graph]") {
    CHECK_THROWS_AS(load_edges("/nonexistent/edges.tsv"), ConfigError);

    auto empty = ts::write_file("edges_empty.tsv", "# only a comment\n");
    CHECK_THROWS_WITH(load_edges(empty.string()),
                      Catch::Matchers::ContainsSubstring("empty graph"));

    auto bad = ts::write_file("edges_bad.tsv", "a\tb\nnotanedge\n");
    CHECK_THROWS_WITH(load_edges(bad.string()),
                      Catch::Matchers::ContainsSubstring(":2"));
}

TEST_CASE("ingestion is idempotent", "[graph]") {
    std::mt19937_64 rng(11);
    auto edges = ts::random_edges(rng, 12, 40, true);
    std::string text;
    for (const auto& [src, dst] : edges) text += src + "\t" + dst + "\n";
    auto path = ts::write_file("edges_idem.tsv", text);
    auto g1 = load_edges(path.string());
    auto g2 = load_edges(path.string());
    REQUIRE(g1.node_count() == g2.node_count());
    REQUIRE(g1.edge_count() == g2.edge_count());
    for (NodeId v = 0; v < g1.node_count(); ++v) {
        CHECK(g1.name_of(v) == g2.name_of(v));
        CHECK(g1.out_neighbors(v) == g2.out_neighbors(v));
        CHECK(g1.in_neighbors(v) == g2.in_neighbors(v));
    }
}

TEST_CASE("adjacency and inverse adjacency stay consistent", "[graph]") {
    std::mt19937_64 rng(13);
    auto g = ts::graph_from(ts::random_edges(rng, 20, 60));
    for (NodeId u = 0; u < g.node_count(); ++u)
        for (NodeId v : g.out_neighbors(u)) {
            const auto& back = g.in_neighbors(v);
            CHECK(std::find(back.begin(), back.end(), u) != back.end());
        }
}

TEST_CASE("ambiguous location mapping excludes the node", "[graph]") {
    auto g = ts::graph_from({{"n1", "n2"}, {"n2", "n3"}});
    auto labels_path =
        ts::write_file("labels_amb.tsv", "n1\tSpringfield\nn2\tChicago\n");
    auto mapping_path = ts::write_file(
        "mapping_amb.tsv", "Springfield\tIL\nSpringfield\tMO\nChicago\tIL\n");
    auto t = load_labels(g, labels_path.string(), mapping_path.string());

    NodeId n1 = g.require("n1"), n2 = g.require("n2"), n3 = g.require("n3");
    CHECK(t.is_excluded(n1));
    CHECK_FALSE(t.is_labeled(n1));
    CHECK(t.is_labeled(n2));
    CHECK(t.class_name(t.class_of(n2)) == "IL");
    CHECK_FALSE(t.is_labeled(n3));
    CHECK_FALSE(t.is_excluded(n3));
    CHECK(t.excluded_count() == 1);

    // a node is labeled, unlabeled, or excluded, never two of those
    for (NodeId v = 0; v < g.node_count(); ++v) {
        int states = (t.is_labeled(v) ? 1 : 0) + (t.is_excluded(v) ? 1 : 0);
        CHECK(states <= 1);
    }
}

TEST_CASE("identity mapping keeps the location as class", "[graph]") {
    auto g = ts::graph_from({{"n1", "n2"}});
    auto labels_path = ts::write_file("labels_id.tsv", "n1\tIL\n");
    auto mapping_path = ts::write_file("mapping_id.tsv", "IL\tIL\n");
    auto t = load_labels(g, labels_path.string(), mapping_path.string());
    CHECK(t.class_name(t.class_of(g.require("n1"))) == "IL");

    // and with no mapping file at all
    auto t2 = load_labels(g, labels_path.string());
    CHECK(t2.class_name(t2.class_of(g.require("n1"))) == "IL");
}

TEST_CASE("label histogram matches a recount of the file", "[graph]") {
    std::mt19937_64 rng(17);
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 0; i < 20; ++i)
        edges.push_back({"n" + std::to_string(i), "n" + std::to_string((i + 1) % 20)});
    auto g = ts::graph_from(edges);

    const char* classes[3] = {"A", "B", "C"};
    std::string text;
    std::size_t expected_count[3] = {0, 0, 0};
    std::uniform_int_distribution<int> pick(0, 2);
    for (int i = 0; i < 20; ++i) {
        int c = pick(rng);
        ++expected_count[c];
        text += "n" + std::to_string(i) + "\t" + classes[c] + "\n";
    }
    auto path = ts::write_file("labels_hist.tsv", text);
    auto t = load_labels(g, path.string());

    REQUIRE(t.class_count() == 3);
    std::size_t actual[3] = {0, 0, 0};
    for (NodeId v = 0; v < g.node_count(); ++v)
        if (t.is_labeled(v)) ++actual[*t.find_class(t.class_name(t.class_of(v)))];
    for (int c = 0; c < 3; ++c)
        CHECK(actual[*t.find_class(classes[c])] == expected_count[c]);
    CHECK(t.labeled_count() == 20);
}

TEST_CASE("mapping file errors", "[graph]") {
    auto g = ts::graph_from({{"n1", "n2"}});
    auto labels_path = ts::write_file("labels_err.tsv", "n1\tX\n");

    auto empty_class = ts::write_file("mapping_empty.tsv", "X\t\n");
    CHECK_THROWS_AS(load_labels(g, labels_path.string(), empty_class.string()),
                    ConfigError);

    auto cycle = ts::write_file("mapping_cycle.tsv", "X\tY\nY\tX\n");
    CHECK_THROWS_WITH(load_labels(g, labels_path.string(), cycle.string()),
                      Catch::Matchers::ContainsSubstring("cycle"));
}

TEST_CASE("bfs_hops on a path graph", "[graph]") {
    auto g = ts::graph_from({{"a", "b"}, {"b", "c"}});
    NodeId a = g.require("a"), b = g.require("b"), c = g.require("c");

    auto out = bfs_hops(g, a, Direction::Outward);
    CHECK(out.hops[a] == 0);
    CHECK(out.hops[b] == 1);
    CHECK(out.hops[c] == 2);

    auto in = bfs_hops(g, a, Direction::Inward);
    CHECK(in.hops[a] == 0);
    CHECK(in.hops[b] == kUnreached);
    CHECK(in.hops[c] == kUnreached);
}

TEST_CASE("bfs_hops respects the cap", "[graph]") {
    std::vector<std::pair<std::string, std::string>> chain;
    for (int i = 0; i < 6; ++i)
        chain.push_back({"n" + std::to_string(i), "n" + std::to_string(i + 1)});
    auto g = ts::graph_from(chain);
    auto hops = bfs_hops(g, g.require("n0"), Direction::Outward, 3);
    CHECK(hops.hops[g.require("n3")] == 3);
    CHECK(hops.hops[g.require("n4")] == kUnreached);
    CHECK_THROWS_AS(bfs_hops(g, g.require("n0"), Direction::Outward, 0), ConfigError);
    CHECK_THROWS_AS(bfs_hops(g, static_cast<NodeId>(g.node_count()), Direction::Outward),
                    DataError);
}

TEST_CASE("bfs_hops equals Floyd-Warshall on random graphs", "[graph]") {
    std::mt19937_64 rng(23);
    auto g = ts::graph_from(ts::random_edges(rng, 50, 150));
    auto dist = ts::floyd_warshall(g);
    const int cap = 15;
    for (NodeId s = 0; s < g.node_count(); ++s) {
        auto out = bfs_hops(g, s, Direction::Outward, cap);
        auto in = bfs_hops(g, s, Direction::Inward, cap);
        for (NodeId v = 0; v < g.node_count(); ++v) {
            int expected_out = dist[s][v] > cap ? kUnreached : dist[s][v];
            int expected_in = dist[v][s] > cap ? kUnreached : dist[v][s];
            REQUIRE(out.hops[v] == expected_out);
            REQUIRE(in.hops[v] == expected_in);
        }
    }
}

TEST_CASE("outward BFS equals inward BFS on the reversed graph", "[graph]") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 5; ++trial) {
        auto g = ts::graph_from(ts::random_edges(rng, 25, 70));
        auto rev = g.reversed();
        for (NodeId s = 0; s < g.node_count(); s += 3) {
            auto a = bfs_hops(g, s, Direction::Outward);
            auto b = bfs_hops(rev, s, Direction::Inward);
            REQUIRE(a.hops == b.hops);
        }
    }
}

TEST_CASE("triangle property over edges", "[graph]") {
    std::mt19937_64 rng(31);
    auto g = ts::graph_from(ts::random_edges(rng, 30, 90));
    auto hops = bfs_hops(g, 0, Direction::Outward);
    for (NodeId u = 0; u < g.node_count(); ++u)
        for (NodeId v : g.out_neighbors(u))
            if (hops.hops[u] != kUnreached && hops.hops[v] != kUnreached)
                CHECK(hops.hops[v] <= hops.hops[u] + 1);
}
