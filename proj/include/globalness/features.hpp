#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "globalness/common.hpp"
#include "globalness/graph.hpp"

namespace globalness {

// ---------------------------------------------------------------------------
// AnchorSet
// ---------------------------------------------------------------------------

struct Anchor {
    NodeId node = 0;
    std::int32_t class_id = 0;
};

/// Ordered anchor list. Canonical order (class, then node id) keeps feature
/// columns stable; one class may own several anchors (e.g. a region split
/// into northern/southern hubs).
class AnchorSet {
public:
    AnchorSet() = default;
    explicit AnchorSet(std::vector<Anchor> anchors) : anchors_(std::move(anchors)) {
        std::sort(anchors_.begin(), anchors_.end(), [](const Anchor& a, const Anchor& b) {
            return a.class_id != b.class_id ? a.class_id < b.class_id : a.node < b.node;
        });
        anchors_.erase(std::unique(anchors_.begin(), anchors_.end(),
                                   [](const Anchor& a, const Anchor& b) {
                                       return a.node == b.node && a.class_id == b.class_id;
                                   }),
                       anchors_.end());
    }

    std::size_t size() const { return anchors_.size(); }
    bool empty() const { return anchors_.empty(); }
    const Anchor& operator[](std::size_t i) const { return anchors_[i]; }
    auto begin() const { return anchors_.begin(); }
    auto end() const { return anchors_.end(); }

    bool covers_class(std::int32_t c) const {
        return std::any_of(anchors_.begin(), anchors_.end(),
                           [c](const Anchor& a) { return a.class_id == c; });
    }

private:
    std::vector<Anchor> anchors_;
};

/// Loads `node_id<TAB>class` anchors. Every anchor must exist in the graph
/// and its class must be a known label class; offenders are listed in the
/// error message.
inline AnchorSet load_anchors(const DirectedGraph& g, const LabelTable& labels,
                              const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open anchors file: " + path);
    std::vector<Anchor> anchors;
    std::vector<std::string> missing;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = strip_eol(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto tab = sv.find('\t');
        if (tab == std::string_view::npos)
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected 'node_id<TAB>class'");
        std::string id(trim(sv.substr(0, tab)));
        std::string cls(trim(sv.substr(tab + 1)));
        auto node = g.find(id);
        auto class_id = labels.find_class(cls);
        if (!node) {
            missing.push_back(id + " (node not in graph)");
            continue;
        }
        if (!class_id) {
            missing.push_back(id + " (unknown class '" + cls + "')");
            continue;
        }
        anchors.push_back({*node, *class_id});
    }
    if (!missing.empty()) {
        std::string msg = "invalid anchors in " + path + ":";
        for (const auto& m : missing) msg += " " + m + ";";
        throw ConfigError(msg);
    }
    if (anchors.empty()) throw ConfigError("no anchors in " + path);
    return AnchorSet(std::move(anchors));
}

// ---------------------------------------------------------------------------
// SDV / MHOP
// ---------------------------------------------------------------------------

/// Per-node hop distances to every anchor. ihop follows edges toward the
/// anchor (node -> ... -> anchor), ohop away from it. Unreachable entries
/// hold the surrogate (a finite value above every real hop), which keeps
/// mhop = min over all entries equal to the minimum of the raw finite hops,
/// or the surrogate when nothing is reachable.
struct SdvTable {
    std::size_t anchor_count = 0;
    int cap = 0;
    int surrogate = 0;
    std::vector<int> ihop; // node-major: node * anchor_count + anchor
    std::vector<int> ohop;
    std::vector<int> mhop; // per node

    std::span<const int> ihop_row(NodeId v) const {
        return {ihop.data() + v * anchor_count, anchor_count};
    }
    std::span<const int> ohop_row(NodeId v) const {
        return {ohop.data() + v * anchor_count, anchor_count};
    }
    std::size_t node_count() const { return mhop.size(); }
};

/// MHOP = min over every ihop/ohop entry of one node's distance vector.
inline int compute_mhop(std::span<const int> ihop_row, std::span<const int> ohop_row) {
    if (ihop_row.empty() && ohop_row.empty())
        throw DataError("compute_mhop: empty distance vector");
    int m = std::numeric_limits<int>::max();
    for (int h : ihop_row) m = std::min(m, h);
    for (int h : ohop_row) m = std::min(m, h);
    return m;
}

/// Runs one BFS per (anchor, direction); jobs are independent and may run in
/// parallel. Assembles the per-node distance table.
inline SdvTable compute_sdv(const DirectedGraph& g, const AnchorSet& anchors,
                            int cap = 15, int surrogate = 16, unsigned threads = 1) {
    if (anchors.empty()) throw ConfigError("compute_sdv: empty anchor set");
    if (surrogate <= cap)
        throw ConfigError("compute_sdv: surrogate must exceed cap");
    {
        std::string bad;
        for (const auto& a : anchors)
            if (a.node >= g.node_count()) bad += " " + std::to_string(a.node);
        if (!bad.empty())
            throw ConfigError("compute_sdv: anchors not in graph:" + bad);
    }

    const std::size_t A = anchors.size();
    const std::size_t N = g.node_count();
    std::vector<HopMap> inward(A), outward(A);
    parallel_for(2 * A, threads, [&](std::size_t job) {
        std::size_t a = job / 2;
        if (job % 2 == 0)
            inward[a] = bfs_hops(g, anchors[a].node, Direction::Inward, cap);
        else
            outward[a] = bfs_hops(g, anchors[a].node, Direction::Outward, cap);
    });

    SdvTable t;
    t.anchor_count = A;
    t.cap = cap;
    t.surrogate = surrogate;
    t.ihop.resize(N * A);
    t.ohop.resize(N * A);
    t.mhop.resize(N);
    for (NodeId v = 0; v < N; ++v) {
        for (std::size_t a = 0; a < A; ++a) {
            int hi = inward[a].hops[v];
            int ho = outward[a].hops[v];
            t.ihop[v * A + a] = hi == kUnreached ? surrogate : hi;
            t.ohop[v * A + a] = ho == kUnreached ? surrogate : ho;
        }
        t.mhop[v] = compute_mhop(t.ihop_row(v), t.ohop_row(v));
    }
    return t;
}

// ---------------------------------------------------------------------------
// SNP
// ---------------------------------------------------------------------------

/// Region universe for neighborhood probabilities: an ordered list of label
/// classes, optionally closed by one catch-all bucket that absorbs labeled
/// neighbors outside the listed classes. Unlabeled and excluded neighbors
/// are left out of both numerator and denominator.
struct SnpRegions {
    std::vector<std::int32_t> class_ids;
    std::vector<std::string> names; // class names, catch-all last when enabled
    bool catchall = false;

    std::size_t size() const { return class_ids.size() + (catchall ? 1 : 0); }
};

/// Builds the region universe from class names. At most one name may be
/// absent from the label classes; it becomes the catch-all bucket.
inline SnpRegions make_snp_regions(const LabelTable& labels,
                                   const std::vector<std::string>& region_names) {
    if (region_names.empty())
        throw ConfigError("snp: empty region list");
    SnpRegions r;
    std::string catchall_name;
    for (const auto& name : region_names) {
        auto c = labels.find_class(name);
        if (c) {
            r.class_ids.push_back(*c);
        } else if (!r.catchall) {
            r.catchall = true;
            catchall_name = name;
        } else {
            throw ConfigError("snp: more than one region outside label classes ('" +
                              catchall_name + "', '" + name + "')");
        }
    }
    for (auto c : r.class_ids) r.names.push_back(labels.class_name(c));
    if (r.catchall) r.names.push_back(catchall_name);
    return r;
}

struct SnpTable {
    std::size_t region_count = 0;
    std::vector<double> inp; // node-major: node * region_count + region
    std::vector<double> onp;

    std::span<const double> inp_row(NodeId v) const {
        return {inp.data() + v * region_count, region_count};
    }
    std::span<const double> onp_row(NodeId v) const {
        return {onp.data() + v * region_count, region_count};
    }
    std::size_t node_count() const {
        return region_count == 0 ? 0 : inp.size() / region_count;
    }
};

/// INP(v, r) = labeled in-neighbors of v in region r / all counted labeled
/// in-neighbors; ONP likewise over out-neighbors. A node with no counted
/// neighbors in a direction gets an all-zero sub-vector.
inline SnpTable compute_snp(const DirectedGraph& g, const LabelTable& labels,
                            const SnpRegions& regions) {
    if (regions.size() == 0) throw ConfigError("snp: empty region list");
    const std::size_t R = regions.size();
    std::vector<std::int32_t> bucket_of(labels.class_count(), -1);
    for (std::size_t i = 0; i < regions.class_ids.size(); ++i)
        bucket_of[regions.class_ids[i]] = static_cast<std::int32_t>(i);
    const std::int32_t catchall_bucket =
        regions.catchall ? static_cast<std::int32_t>(R - 1) : -1;

    SnpTable t;
    t.region_count = R;
    t.inp.assign(g.node_count() * R, 0.0);
    t.onp.assign(g.node_count() * R, 0.0);

    auto accumulate = [&](NodeId v, const std::vector<NodeId>& nbrs, std::vector<double>& out) {
        double* row = out.data() + v * R;
        double total = 0;
        for (NodeId u : nbrs) {
            if (!labels.is_labeled(u)) continue;
            std::int32_t bucket = bucket_of[labels.class_of(u)];
            if (bucket < 0) bucket = catchall_bucket;
            if (bucket < 0) continue;
            row[bucket] += 1.0;
            total += 1.0;
        }
        if (total > 0)
            for (std::size_t r = 0; r < R; ++r) row[r] /= total;
    };
    for (NodeId v = 0; v < g.node_count(); ++v) {
        accumulate(v, g.in_neighbors(v), t.inp);
        accumulate(v, g.out_neighbors(v), t.onp);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Feature matrix
// ---------------------------------------------------------------------------

/// Flattened per-node classifier input. Column layout is fixed: all ihop
/// (anchor order), all ohop, all inp (region order), all onp. MHOP is carried
/// alongside for sampling but is not a classifier column.
struct FeatureMatrix {
    std::size_t width = 0;
    std::size_t anchor_count = 0;
    std::size_t region_count = 0;
    std::vector<std::string> column_names;
    std::vector<double> values; // node-major
    std::vector<int> mhop;

    std::size_t node_count() const { return mhop.size(); }
    std::span<const double> row(NodeId v) const {
        return {values.data() + v * width, width};
    }
};

inline FeatureMatrix assemble_features(const DirectedGraph& g, const AnchorSet& anchors,
                                       const SdvTable& sdv, const SnpTable& snp,
                                       const SnpRegions& regions) {
    if (sdv.node_count() != g.node_count() || snp.node_count() != g.node_count())
        throw DataError("assemble_features: node sets differ");
    if (sdv.anchor_count != anchors.size())
        throw DataError("assemble_features: anchor count mismatch");
    const std::size_t A = sdv.anchor_count;
    const std::size_t R = snp.region_count;

    FeatureMatrix m;
    m.width = 2 * A + 2 * R;
    m.anchor_count = A;
    m.region_count = R;
    for (std::size_t a = 0; a < A; ++a)
        m.column_names.push_back("ihop_" + g.name_of(anchors[a].node));
    for (std::size_t a = 0; a < A; ++a)
        m.column_names.push_back("ohop_" + g.name_of(anchors[a].node));
    for (std::size_t r = 0; r < R; ++r)
        m.column_names.push_back("inp_" + regions.names[r]);
    for (std::size_t r = 0; r < R; ++r)
        m.column_names.push_back("onp_" + regions.names[r]);

    m.values.resize(g.node_count() * m.width);
    m.mhop = sdv.mhop;
    for (NodeId v = 0; v < g.node_count(); ++v) {
        double* row = m.values.data() + v * m.width;
        auto ih = sdv.ihop_row(v);
        auto oh = sdv.ohop_row(v);
        auto in = snp.inp_row(v);
        auto on = snp.onp_row(v);
        for (std::size_t a = 0; a < A; ++a) row[a] = ih[a];
        for (std::size_t a = 0; a < A; ++a) row[A + a] = oh[a];
        for (std::size_t r = 0; r < R; ++r) row[2 * A + r] = in[r];
        for (std::size_t r = 0; r < R; ++r) row[2 * A + R + r] = on[r];
    }
    return m;
}

/// CSV export: node_id, feature columns, mhop. Doubles use shortest
/// round-trip formatting so re-import is bitwise exact.
inline void write_features_csv(std::ostream& out, const DirectedGraph& g,
                               const FeatureMatrix& m) {
    out << "node_id";
    for (const auto& c : m.column_names) out << ',' << c;
    out << ",mhop\n";
    for (NodeId v = 0; v < m.node_count(); ++v) {
        out << g.name_of(v);
        for (double x : m.row(v)) out << ',' << format_double(x);
        out << ',' << m.mhop[v] << '\n';
    }
}

struct FeatureCsv {
    std::vector<std::string> node_ids;
    FeatureMatrix matrix;
};

inline FeatureCsv read_features_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("feature csv: empty file");
    FeatureCsv out;
    {
        std::stringstream header(line);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(header, col, ',')) cols.push_back(col);
        if (cols.size() < 3 || cols.front() != "node_id" || cols.back() != "mhop")
            throw DataError("feature csv: unexpected header");
        out.matrix.column_names.assign(cols.begin() + 1, cols.end() - 1);
        out.matrix.width = out.matrix.column_names.size();
    }
    while (std::getline(in, line)) {
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= sv.size(); ++i) {
            if (i == sv.size() || sv[i] == ',') {
                cells.push_back(sv.substr(start, i - start));
                start = i + 1;
            }
        }
        if (cells.size() != out.matrix.width + 2)
            throw DataError("feature csv: wrong cell count");
        out.node_ids.emplace_back(cells.front());
        for (std::size_t i = 1; i + 1 < cells.size(); ++i)
            out.matrix.values.push_back(parse_double(cells[i]));
        out.matrix.mhop.push_back(static_cast<int>(parse_int(cells.back())));
    }
    return out;
}

} // namespace globalness
