#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "globalness/common.hpp"

namespace globalness {

// ---------------------------------------------------------------------------
// DirectedGraph
//
// Immutable after construction. External string ids appear only at the I/O
// boundary; everything else works on dense indices so BFS runs over arrays.
// Duplicate edges collapse to one and self-loops are dropped at ingestion.
// ---------------------------------------------------------------------------

class DirectedGraph {
public:
    struct IngestStats {
        std::size_t edges_kept = 0;
        std::size_t duplicates_dropped = 0;
        std::size_t self_loops_dropped = 0;
    };

    class Builder {
    public:
        NodeId intern(std::string_view id) {
            auto it = index_.find(std::string(id));
            if (it != index_.end()) return it->second;
            NodeId n = static_cast<NodeId>(names_.size());
            names_.emplace_back(id);
            index_.emplace(names_.back(), n);
            return n;
        }

        void add_edge(std::string_view src, std::string_view dst) {
            // interning order must not depend on argument evaluation order
            NodeId s = intern(src);
            NodeId d = intern(dst);
            add_edge(s, d);
        }

        void add_edge(NodeId src, NodeId dst) {
            ++total_added_;
            if (src == dst) {
                ++stats_.self_loops_dropped;
                return;
            }
            edges_.emplace_back(src, dst);
        }

        DirectedGraph build() {
            DirectedGraph g;
            g.names_ = std::move(names_);
            g.index_ = std::move(index_);
            std::sort(edges_.begin(), edges_.end());
            edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
            stats_.duplicates_dropped =
                total_added_ - stats_.self_loops_dropped - edges_.size();
            stats_.edges_kept = edges_.size();
            g.out_adj_.resize(g.names_.size());
            g.in_adj_.resize(g.names_.size());
            for (auto [u, v] : edges_) {
                g.out_adj_[u].push_back(v);
                g.in_adj_[v].push_back(u);
            }
            for (auto& a : g.in_adj_) std::sort(a.begin(), a.end());
            g.stats_ = stats_;
            return g;
        }

    private:
        std::vector<std::string> names_;
        std::unordered_map<std::string, NodeId> index_;
        std::vector<std::pair<NodeId, NodeId>> edges_;
        IngestStats stats_;
        std::size_t total_added_ = 0;
    };

    std::size_t node_count() const { return names_.size(); }
    std::size_t edge_count() const { return stats_.edges_kept; }
    const IngestStats& ingest_stats() const { return stats_; }

    const std::vector<NodeId>& out_neighbors(NodeId v) const { return out_adj_[v]; }
    const std::vector<NodeId>& in_neighbors(NodeId v) const { return in_adj_[v]; }

    const std::string& name_of(NodeId v) const { return names_[v]; }

    std::optional<NodeId> find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    NodeId require(std::string_view id) const {
        auto n = find(id);
        if (!n) throw DataError("unknown node id: '" + std::string(id) + "'");
        return *n;
    }

    /// Graph with every edge direction flipped; node ids are preserved.
    DirectedGraph reversed() const {
        DirectedGraph g;
        g.names_ = names_;
        g.index_ = index_;
        g.out_adj_ = in_adj_;
        g.in_adj_ = out_adj_;
        g.stats_ = stats_;
        return g;
    }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, NodeId> index_;
    std::vector<std::vector<NodeId>> out_adj_;
    std::vector<std::vector<NodeId>> in_adj_;
    IngestStats stats_;
};

/// Parses a `src<TAB>dst` edge list. `#` lines are comments, blank lines are
/// skipped. Self-loops and duplicates are dropped (counts kept in the graph's
/// ingest stats). A file with no data lines is an error.
inline DirectedGraph load_edges(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open edge file: " + path);
    DirectedGraph::Builder b;
    std::string line;
    std::size_t line_no = 0;
    std::size_t data_lines = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = strip_eol(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto tab = sv.find('\t');
        if (tab == std::string_view::npos)
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected 'src<TAB>dst'");
        std::string_view src = trim(sv.substr(0, tab));
        std::string_view dst = trim(sv.substr(tab + 1));
        if (src.empty() || dst.empty() ||
            dst.find('\t') != std::string_view::npos)
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected 'src<TAB>dst'");
        ++data_lines;
        b.add_edge(src, dst);
    }
    if (data_lines == 0)
        throw DataError("empty graph: no edges in " + path);
    return b.build();
}

// ---------------------------------------------------------------------------
// LabelTable
//
// Per-node class labels. A node is labeled, unlabeled, or excluded (its
// location mapped ambiguously to more than one class), exactly one of the
// three. Class names are kept sorted so class ids are stable across input
// orderings.
// ---------------------------------------------------------------------------

class LabelTable {
public:
    static constexpr std::int32_t kUnlabeled = -1;
    static constexpr std::int32_t kExcluded = -2;

    LabelTable() = default;
    LabelTable(std::vector<std::int32_t> labels, std::vector<std::string> class_names)
        : labels_(std::move(labels)), class_names_(std::move(class_names)) {
        for (std::size_t i = 0; i < class_names_.size(); ++i)
            class_index_[class_names_[i]] = static_cast<std::int32_t>(i);
    }

    std::size_t node_count() const { return labels_.size(); }
    std::size_t class_count() const { return class_names_.size(); }
    const std::vector<std::string>& class_names() const { return class_names_; }

    bool is_labeled(NodeId v) const { return labels_[v] >= 0; }
    bool is_excluded(NodeId v) const { return labels_[v] == kExcluded; }
    std::int32_t class_of(NodeId v) const { return labels_[v]; }
    const std::string& class_name(std::int32_t c) const { return class_names_[c]; }

    std::optional<std::int32_t> find_class(std::string_view name) const {
        auto it = class_index_.find(std::string(name));
        if (it == class_index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t labeled_count() const {
        std::size_t n = 0;
        for (auto l : labels_) n += l >= 0;
        return n;
    }

    std::size_t excluded_count() const {
        std::size_t n = 0;
        for (auto l : labels_) n += l == kExcluded;
        return n;
    }

private:
    std::vector<std::int32_t> labels_;
    std::vector<std::string> class_names_;
    std::unordered_map<std::string, std::int32_t> class_index_;
};

namespace detail {

/// location -> class resolution. A location listed with more than one
/// distinct class is ambiguous; nodes carrying it are excluded.
struct LocationMapping {
    std::unordered_map<std::string, std::string> to_class;
    std::unordered_set<std::string> ambiguous;
};

inline LocationMapping load_mapping(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mapping file: " + path);
    LocationMapping m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = strip_eol(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto tab = sv.find('\t');
        if (tab == std::string_view::npos)
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected 'location<TAB>class'");
        std::string loc(trim(sv.substr(0, tab)));
        std::string cls(trim(sv.substr(tab + 1)));
        if (cls.empty())
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": empty class name");
        auto it = m.to_class.find(loc);
        if (it != m.to_class.end()) {
            if (it->second != cls) m.ambiguous.insert(loc);
        } else {
            m.to_class.emplace(std::move(loc), std::move(cls));
        }
    }
    // Entries are applied one step only; a cycle among keys means the file
    // was written expecting chained resolution, which we reject.
    for (const auto& [loc, cls] : m.to_class) {
        if (cls == loc) continue;
        std::string cur = cls;
        std::unordered_set<std::string> seen{loc};
        while (true) {
            auto next = m.to_class.find(cur);
            if (next == m.to_class.end() || next->second == cur) break;
            if (seen.count(cur))
                throw ConfigError("mapping cycle involving '" + loc + "' in " + path);
            seen.insert(cur);
            cur = next->second;
        }
    }
    return m;
}

} // namespace detail

/// Loads `node_id<TAB>location` labels, resolving locations through the
/// optional mapping file. Nodes missing from the file stay unlabeled; nodes
/// whose location maps ambiguously land in the excluded set. Label-file rows
/// for nodes absent from the graph are ignored.
inline LabelTable load_labels(const DirectedGraph& g, const std::string& path,
                              const std::optional<std::string>& mapping_path = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open label file: " + path);

    detail::LocationMapping mapping;
    bool mapped = mapping_path.has_value();
    if (mapped) mapping = detail::load_mapping(*mapping_path);

    std::vector<std::string> resolved(g.node_count());
    std::vector<char> state(g.node_count(), 0); // 0 unlabeled, 1 labeled, 2 excluded
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = strip_eol(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto tab = sv.find('\t');
        if (tab == std::string_view::npos)
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected 'node_id<TAB>location'");
        std::string id(trim(sv.substr(0, tab)));
        std::string loc(trim(sv.substr(tab + 1)));
        if (id.empty() || loc.empty())
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected 'node_id<TAB>location'");
        auto node = g.find(id);
        if (!node) continue;
        if (mapped) {
            if (mapping.ambiguous.count(loc)) {
                state[*node] = 2;
                continue;
            }
            auto it = mapping.to_class.find(loc);
            if (it == mapping.to_class.end()) continue; // unmapped location
            loc = it->second;
        }
        resolved[*node] = loc;
        state[*node] = 1;
    }

    std::vector<std::string> classes;
    for (NodeId v = 0; v < g.node_count(); ++v)
        if (state[v] == 1) classes.push_back(resolved[v]);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    std::unordered_map<std::string, std::int32_t> index;
    for (std::size_t i = 0; i < classes.size(); ++i)
        index[classes[i]] = static_cast<std::int32_t>(i);

    std::vector<std::int32_t> labels(g.node_count(), LabelTable::kUnlabeled);
    for (NodeId v = 0; v < g.node_count(); ++v) {
        if (state[v] == 1) labels[v] = index[resolved[v]];
        else if (state[v] == 2) labels[v] = LabelTable::kExcluded;
    }
    return LabelTable(std::move(labels), std::move(classes));
}

// ---------------------------------------------------------------------------
// BFS
// ---------------------------------------------------------------------------

enum class Direction { Inward, Outward };

inline const char* to_string(Direction d) {
    return d == Direction::Inward ? "inward" : "outward";
}

struct HopMap {
    NodeId source = 0;
    Direction direction = Direction::Outward;
    std::vector<int> hops; // kUnreached where no path within cap exists
    int cap = 0;
};

/// Unit-weight BFS from `source`. Outward follows out-edges (hops[v] = length
/// of the shortest directed path source -> v); inward follows in-edges
/// (hops[v] = shortest directed path v -> source). Hops beyond `cap` are
/// reported as kUnreached.
inline HopMap bfs_hops(const DirectedGraph& g, NodeId source, Direction dir,
                       int cap = 15) {
    if (source >= g.node_count())
        throw DataError("bfs source out of range: " + std::to_string(source));
    if (cap < 1) throw ConfigError("bfs cap must be >= 1");
    HopMap result;
    result.source = source;
    result.direction = dir;
    result.cap = cap;
    result.hops.assign(g.node_count(), kUnreached);
    result.hops[source] = 0;
    std::deque<NodeId> queue{source};
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        int next = result.hops[u] + 1;
        if (next > cap) continue;
        const auto& nbrs = dir == Direction::Outward ? g.out_neighbors(u)
                                                     : g.in_neighbors(u);
        for (NodeId v : nbrs) {
            if (result.hops[v] != kUnreached) continue;
            result.hops[v] = next;
            queue.push_back(v);
        }
    }
    return result;
}

} // namespace globalness
