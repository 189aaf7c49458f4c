#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// deliberately avoid the library's BFS/feature code paths: they recompute
// expectations from adjacency by brute force.

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "globalness/graph.hpp"

namespace test_support {

inline std::filesystem::path scratch_dir() {
    static std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("globalness_tests_" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

inline std::filesystem::path write_file(const std::string& name,
                                        const std::string& content) {
    auto path = scratch_dir() / name;
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

inline globalness::DirectedGraph graph_from(
    const std::vector<std::pair<std::string, std::string>>& edges) {
    globalness::DirectedGraph::Builder b;
    for (const auto& [src, dst] : edges) b.add_edge(src, dst);
    return b.build();
}

/// Label table over explicit (node, class) pairs; unlisted nodes stay
/// unlabeled. Class ids follow sorted class-name order, like load_labels.
inline globalness::LabelTable labels_from(
    const globalness::DirectedGraph& g,
    const std::vector<std::pair<std::string, std::string>>& node_class) {
    std::vector<std::string> classes;
    for (const auto& [node, cls] : node_class) classes.push_back(cls);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    std::vector<std::int32_t> labels(g.node_count(), globalness::LabelTable::kUnlabeled);
    for (const auto& [node, cls] : node_class) {
        auto it = std::lower_bound(classes.begin(), classes.end(), cls);
        labels[g.require(node)] = static_cast<std::int32_t>(it - classes.begin());
    }
    return globalness::LabelTable(std::move(labels), std::move(classes));
}

inline constexpr int kInf = std::numeric_limits<int>::max() / 4;

/// All-pairs unit-weight shortest paths following forward edges:
/// dist[u][v] = length of the shortest directed path u -> v.
inline std::vector<std::vector<int>> floyd_warshall(const globalness::DirectedGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<std::vector<int>> dist(n, std::vector<int>(n, kInf));
    for (globalness::NodeId u = 0; u < n; ++u) {
        dist[u][u] = 0;
        for (globalness::NodeId v : g.out_neighbors(u)) dist[u][v] = 1;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            if (dist[i][k] == kInf) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (dist[i][k] + dist[k][j] < dist[i][j])
                    dist[i][j] = dist[i][k] + dist[k][j];
        }
    return dist;
}

/// Random edge list over nodes n0..n{count-1} (may repeat pairs).
inline std::vector<std::pair<std::string, std::string>> random_edges(
    std::mt19937_64& rng, std::size_t node_count, std::size_t edge_count,
    bool allow_self_loops = false) {
    std::uniform_int_distribution<std::size_t> pick(0, node_count - 1);
    std::vector<std::pair<std::string, std::string>> edges;
    while (edges.size() < edge_count) {
        std::size_t u = pick(rng), v = pick(rng);
        if (!allow_self_loops && u == v) continue;
        edges.emplace_back("n" + std::to_string(u), "n" + std::to_string(v));
    }
    return edges;
}

} // namespace test_support
