#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "globalness/common.hpp"
#include "globalness/features.hpp"
#include "globalness/sampler.hpp"

namespace globalness {

enum class ClassifierKind { NaiveBayes, RandomForest, AdaBoost };

inline const char* to_string(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::NaiveBayes: return "naive_bayes";
        case ClassifierKind::RandomForest: return "random_forest";
        case ClassifierKind::AdaBoost: return "adaboost";
    }
    return "?";
}

inline ClassifierKind classifier_kind_from(const std::string& s) {
    if (s == "naive_bayes") return ClassifierKind::NaiveBayes;
    if (s == "random_forest") return ClassifierKind::RandomForest;
    if (s == "adaboost") return ClassifierKind::AdaBoost;
    throw ConfigError("unknown classifier kind: '" + s + "'");
}

struct TrainConfig {
    ClassifierKind kind = ClassifierKind::RandomForest;
    int trees = 100;
    int max_depth = 12;
    int min_leaf = 1;
    int features_per_split = 0; // 0 = floor(sqrt(width))
    bool bootstrap = true;
    int rounds = 100;              // adaboost
    double variance_floor = 1e-6;  // naive bayes
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (trees < 1 || max_depth < 1 || min_leaf < 1 || rounds < 1)
            throw ConfigError("classifier: counts must be >= 1");
        if (features_per_split < 0)
            throw ConfigError("classifier: features_per_split must be >= 0");
        if (!(variance_floor > 0))
            throw ConfigError("classifier: variance_floor must be > 0");
    }
};

/// Row-major labeled matrix fed to training and evaluation.
struct LabeledData {
    std::size_t width = 0;
    std::vector<double> x;
    std::vector<std::int32_t> y;
    std::vector<std::string> class_names;

    std::size_t size() const { return y.size(); }
    std::span<const double> row(std::size_t i) const {
        return {x.data() + i * width, width};
    }
};

/// Materializes the training matrix from the feature table, in TrainingSet
/// row order (canonically sorted by node id).
inline LabeledData gather_training_data(const FeatureMatrix& features,
                                        const TrainingSet& training) {
    LabeledData d;
    d.width = features.width;
    d.class_names = training.class_names;
    d.x.reserve(training.rows.size() * d.width);
    d.y.reserve(training.rows.size());
    for (const auto& r : training.rows) {
        auto row = features.row(r.node);
        d.x.insert(d.x.end(), row.begin(), row.end());
        d.y.push_back(r.label);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Decision tree (Gini, midpoint thresholds)
// ---------------------------------------------------------------------------

struct TreeNode {
    std::int32_t feature = -1; // -1 = leaf
    double threshold = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::vector<double> dist; // leaf class distribution
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    const TreeNode& leaf_for(std::span<const double> row) const {
        std::size_t i = 0;
        while (nodes[i].feature >= 0)
            i = row[nodes[i].feature] <= nodes[i].threshold
                    ? static_cast<std::size_t>(nodes[i].left)
                    : static_cast<std::size_t>(nodes[i].right);
        return nodes[i];
    }
};

/// Lowest ordinal wins ties, here and everywhere a class is picked from
/// scores.
inline std::int32_t argmax_class(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return static_cast<std::int32_t>(best);
}

struct TreeParams {
    int max_depth = 12;
    int min_leaf = 1;
    int features_per_split = 0; // 0 = all
};

namespace detail {

struct TreeGrower {
    const LabeledData& data;
    const std::vector<std::size_t>& sample; // row indices, bootstrap multiset
    TreeParams params;
    std::mt19937_64& rng;
    std::size_t class_count;
    DecisionTree tree;
    std::vector<std::int32_t> feature_pool;
    std::vector<std::pair<double, std::int32_t>> scratch;

    TreeGrower(const LabeledData& d, const std::vector<std::size_t>& s,
               TreeParams p, std::size_t k, std::mt19937_64& r)
        : data(d), sample(s), params(p), rng(r), class_count(k) {
        if (params.features_per_split <= 0 ||
            params.features_per_split > static_cast<int>(data.width))
            params.features_per_split = static_cast<int>(data.width);
        feature_pool.resize(data.width);
    }

    std::int32_t grow(std::vector<std::size_t>& rows, int depth) {
        std::vector<double> counts(class_count, 0.0);
        for (auto r : rows) counts[data.y[sample[r]]] += 1.0;
        double total = static_cast<double>(rows.size());
        bool pure = *std::max_element(counts.begin(), counts.end()) == total;

        std::int32_t best_feature = -1;
        double best_threshold = 0;
        double best_proxy = -std::numeric_limits<double>::infinity();
        if (!pure && depth < params.max_depth &&
            rows.size() >= 2 * static_cast<std::size_t>(params.min_leaf)) {
            // Candidate features are drawn in random order and compared with
            // a strict improvement test, so equally good splits resolve to a
            // seeded random choice rather than a fixed column.
            std::iota(feature_pool.begin(), feature_pool.end(), 0);
            for (int i = 0; i < params.features_per_split; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, feature_pool.size() - 1);
                std::swap(feature_pool[i], feature_pool[pick(rng)]);
                std::int32_t f = feature_pool[i];
                double thr, proxy;
                if (best_split_on(rows, f, thr, proxy) && proxy > best_proxy) {
                    best_proxy = proxy;
                    best_feature = f;
                    best_threshold = thr;
                }
            }
        }

        std::int32_t index = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        if (best_feature < 0) {
            for (auto& c : counts) c /= total;
            tree.nodes[index].dist = std::move(counts);
            return index;
        }

        std::vector<std::size_t> left, right;
        for (auto r : rows) {
            if (data.row(sample[r])[best_feature] <= best_threshold)
                left.push_back(r);
            else
                right.push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        tree.nodes[index].feature = best_feature;
        tree.nodes[index].threshold = best_threshold;
        std::int32_t l = grow(left, depth + 1);
        std::int32_t r = grow(right, depth + 1);
        tree.nodes[index].left = l;
        tree.nodes[index].right = r;
        return index;
    }

    /// Best Gini split of `rows` on feature f. Thresholds are midpoints
    /// between consecutive distinct values; the proxy maximized is
    /// sum(left)^2/nl + sum(right)^2/nr, equivalent to minimizing weighted
    /// Gini impurity. Returns false when no threshold respects min_leaf.
    bool best_split_on(const std::vector<std::size_t>& rows, std::int32_t f,
                       double& threshold, double& proxy) {
        scratch.clear();
        for (auto r : rows)
            scratch.emplace_back(data.row(sample[r])[f], data.y[sample[r]]);
        std::sort(scratch.begin(), scratch.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        if (scratch.front().first == scratch.back().first) return false;

        std::vector<double> left_counts(class_count, 0.0), total_counts(class_count, 0.0);
        for (const auto& [v, c] : scratch) total_counts[c] += 1.0;

        const std::size_t n = scratch.size();
        bool found = false;
        proxy = -std::numeric_limits<double>::infinity();
        double left_sq = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double c = left_counts[scratch[i].second];
            left_sq += 2 * c + 1; // (c+1)^2 - c^2
            left_counts[scratch[i].second] = c + 1;
            if (scratch[i].first == scratch[i + 1].first) continue;
            std::size_t nl = i + 1, nr = n - nl;
            if (nl < static_cast<std::size_t>(params.min_leaf) ||
                nr < static_cast<std::size_t>(params.min_leaf))
                continue;
            double right_sq = 0;
            for (std::size_t k = 0; k < class_count; ++k) {
                double rc = total_counts[k] - left_counts[k];
                right_sq += rc * rc;
            }
            double p = left_sq / static_cast<double>(nl) +
                       right_sq / static_cast<double>(nr);
            if (!found || p > proxy) {
                found = true;
                proxy = p;
                threshold = (scratch[i].first + scratch[i + 1].first) / 2.0;
            }
        }
        return found;
    }
};

} // namespace detail

/// Grows one Gini decision tree over the given bootstrap sample.
inline DecisionTree train_tree(const LabeledData& data,
                               const std::vector<std::size_t>& sample,
                               std::size_t class_count, TreeParams params,
                               std::mt19937_64& rng) {
    detail::TreeGrower grower(data, sample, params, class_count, rng);
    std::vector<std::size_t> rows(sample.size());
    std::iota(rows.begin(), rows.end(), 0);
    grower.grow(rows, 0);
    return std::move(grower.tree);
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

struct GaussianNbModel {
    std::vector<double> log_prior;    // per class; -inf for empty classes
    std::vector<double> mean;         // class-major: class * width + feature
    std::vector<double> variance;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
};

struct Stump {
    std::int32_t feature = 0;
    double threshold = 0;
    std::int32_t left_class = 0;
    std::int32_t right_class = 0;
    double alpha = 0;
};

struct AdaBoostModel {
    std::vector<Stump> stumps;
};

class ClassifierModel {
public:
    ClassifierKind kind = ClassifierKind::RandomForest;
    std::vector<std::string> class_names;
    std::size_t width = 0;
    std::uint64_t rng_seed = 0;

    GaussianNbModel nb;
    ForestModel forest;
    AdaBoostModel boost;

    std::size_t class_count() const { return class_names.size(); }

    /// Class probabilities over the model's class list; always sums to 1.
    /// Forest probabilities are tree-vote shares, so the argmax equals the
    /// majority vote of the individual trees.
    std::vector<double> predict_proba(std::span<const double> row) const {
        if (row.size() != width)
            throw DataError("predict: row width " + std::to_string(row.size()) +
                            " != model width " + std::to_string(width));
        switch (kind) {
            case ClassifierKind::NaiveBayes: return nb_proba(row);
            case ClassifierKind::RandomForest: return forest_proba(row);
            case ClassifierKind::AdaBoost: return boost_proba(row);
        }
        throw DataError("predict: unknown model kind");
    }

    std::int32_t predict(std::span<const double> row) const {
        auto p = predict_proba(row);
        return argmax_class(p);
    }

private:
    std::vector<double> nb_proba(std::span<const double> row) const {
        const std::size_t K = class_count();
        std::vector<double> logp(K);
        for (std::size_t c = 0; c < K; ++c) {
            double lp = nb.log_prior[c];
            if (std::isinf(lp)) {
                logp[c] = lp;
                continue;
            }
            const double* mu = nb.mean.data() + c * width;
            const double* var = nb.variance.data() + c * width;
            for (std::size_t f = 0; f < width; ++f) {
                double d = row[f] - mu[f];
                lp += -0.5 * std::log(2.0 * M_PI * var[f]) - d * d / (2.0 * var[f]);
            }
            logp[c] = lp;
        }
        double mx = *std::max_element(logp.begin(), logp.end());
        std::vector<double> p(K);
        double sum = 0;
        for (std::size_t c = 0; c < K; ++c) {
            p[c] = std::isinf(logp[c]) ? 0.0 : std::exp(logp[c] - mx);
            sum += p[c];
        }
        for (auto& v : p) v /= sum;
        return p;
    }

    std::vector<double> forest_proba(std::span<const double> row) const {
        std::vector<double> votes(class_count(), 0.0);
        for (const auto& t : forest.trees)
            votes[argmax_class(t.leaf_for(row).dist)] += 1.0;
        for (auto& v : votes) v /= static_cast<double>(forest.trees.size());
        return votes;
    }

    std::vector<double> boost_proba(std::span<const double> row) const {
        std::vector<double> score(class_count(), 0.0);
        double total = 0;
        for (const auto& s : boost.stumps) {
            std::int32_t c = row[s.feature] <= s.threshold ? s.left_class : s.right_class;
            score[c] += s.alpha;
            total += s.alpha;
        }
        if (total <= 0)
            return std::vector<double>(class_count(), 1.0 / class_count());
        for (auto& v : score) v /= total;
        return score;
    }
};

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace detail {

inline void validate_training_data(const LabeledData& data) {
    if (data.size() == 0 || data.width == 0)
        throw DataError("train: empty training data");
    if (data.class_names.size() < 2)
        throw DataError("train: need at least 2 classes");
    std::vector<char> present(data.class_names.size(), 0);
    for (auto c : data.y) {
        if (c < 0 || static_cast<std::size_t>(c) >= data.class_names.size())
            throw DataError("train: label out of range");
        present[c] = 1;
    }
    if (std::count(present.begin(), present.end(), 1) < 2)
        throw DataError("train: single-class data");
    for (double v : data.x)
        if (!std::isfinite(v)) throw DataError("train: non-finite feature value");
}

inline GaussianNbModel train_nb(const LabeledData& data, const TrainConfig& cfg) {
    const std::size_t K = data.class_names.size();
    const std::size_t W = data.width;
    GaussianNbModel m;
    m.log_prior.assign(K, -std::numeric_limits<double>::infinity());
    m.mean.assign(K * W, 0.0);
    m.variance.assign(K * W, cfg.variance_floor);
    std::vector<std::size_t> counts(K, 0);
    for (auto c : data.y) ++counts[c];
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double* row = data.x.data() + i * W;
        double* mu = m.mean.data() + data.y[i] * W;
        for (std::size_t f = 0; f < W; ++f) mu[f] += row[f];
    }
    for (std::size_t c = 0; c < K; ++c) {
        if (counts[c] == 0) continue;
        m.log_prior[c] = std::log(static_cast<double>(counts[c]) /
                                  static_cast<double>(data.size()));
        double* mu = m.mean.data() + c * W;
        for (std::size_t f = 0; f < W; ++f) mu[f] /= static_cast<double>(counts[c]);
    }
    std::vector<double> sq(K * W, 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double* row = data.x.data() + i * W;
        const double* mu = m.mean.data() + data.y[i] * W;
        double* s = sq.data() + data.y[i] * W;
        for (std::size_t f = 0; f < W; ++f) {
            double d = row[f] - mu[f];
            s[f] += d * d;
        }
    }
    for (std::size_t c = 0; c < K; ++c) {
        if (counts[c] == 0) continue;
        double* var = m.variance.data() + c * W;
        for (std::size_t f = 0; f < W; ++f)
            var[f] = std::max(sq[c * W + f] / static_cast<double>(counts[c]),
                              cfg.variance_floor);
    }
    return m;
}

inline ForestModel train_forest(const LabeledData& data, const TrainConfig& cfg,
                                unsigned threads) {
    const std::size_t K = data.class_names.size();
    ForestModel m;
    m.trees.resize(cfg.trees);
    TreeParams params{cfg.max_depth, cfg.min_leaf,
                      cfg.features_per_split > 0
                          ? cfg.features_per_split
                          : std::max(1, static_cast<int>(
                                            std::sqrt(static_cast<double>(data.width))))};
    // one RNG stream per tree, derived from (seed, tree index): results do
    // not depend on the number of worker threads
    parallel_for(m.trees.size(), threads, [&](std::size_t t) {
        std::mt19937_64 rng(derive_seed(cfg.rng_seed, "tree", t));
        std::vector<std::size_t> sample(data.size());
        if (cfg.bootstrap) {
            std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
            for (auto& s : sample) s = pick(rng);
        } else {
            std::iota(sample.begin(), sample.end(), 0);
        }
        m.trees[t] = train_tree(data, sample, K, params, rng);
    });
    return m;
}

inline AdaBoostModel train_adaboost(const LabeledData& data, const TrainConfig& cfg) {
    const std::size_t K = data.class_names.size();
    const std::size_t n = data.size();
    AdaBoostModel m;
    std::vector<double> w(n, 1.0 / static_cast<double>(n));

    // column-sorted row order, reused every round
    std::vector<std::vector<std::size_t>> order(data.width);
    for (std::size_t f = 0; f < data.width; ++f) {
        order[f].resize(n);
        std::iota(order[f].begin(), order[f].end(), 0);
        std::stable_sort(order[f].begin(), order[f].end(),
                         [&](std::size_t a, std::size_t b) {
                             return data.row(a)[f] < data.row(b)[f];
                         });
    }

    std::vector<double> class_w(K), left_w(K);
    for (int round = 0; round < cfg.rounds; ++round) {
        std::fill(class_w.begin(), class_w.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) class_w[data.y[i]] += w[i];

        Stump best;
        double best_err = std::numeric_limits<double>::infinity();
        for (std::size_t f = 0; f < data.width; ++f) {
            const auto& ord = order[f];
            double first = data.row(ord.front())[f];
            double last = data.row(ord.back())[f];
            if (first == last) continue;
            std::fill(left_w.begin(), left_w.end(), 0.0);
            double left_total = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                std::size_t r = ord[i];
                left_w[data.y[r]] += w[r];
                left_total += w[r];
                double v = data.row(r)[f];
                double vn = data.row(ord[i + 1])[f];
                if (v == vn) continue;
                std::int32_t lc = 0, rc = 0;
                double lbest = -1, rbest = -1;
                for (std::size_t k = 0; k < K; ++k) {
                    if (left_w[k] > lbest) { lbest = left_w[k]; lc = static_cast<std::int32_t>(k); }
                    double rw = class_w[k] - left_w[k];
                    if (rw > rbest) { rbest = rw; rc = static_cast<std::int32_t>(k); }
                }
                double err = (left_total - lbest) + ((1.0 - left_total) - rbest);
                if (err < best_err) {
                    best_err = err;
                    best = Stump{static_cast<std::int32_t>(f), (v + vn) / 2.0, lc, rc, 0};
                }
            }
        }
        if (!std::isfinite(best_err)) break; // all columns constant

        // SAMME: stop once the weak learner is no better than chance
        double chance = 1.0 - 1.0 / static_cast<double>(K);
        if (best_err >= chance - 1e-12) {
            if (m.stumps.empty())
                throw DataError("adaboost: no stump beats chance on this data");
            break;
        }
        double err = std::clamp(best_err, 1e-12, 1.0 - 1e-12);
        best.alpha = std::log((1.0 - err) / err) +
                     std::log(static_cast<double>(K) - 1.0);
        m.stumps.push_back(best);
        if (best_err <= 1e-12) break; // perfect stump, weights would not move

        double sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::int32_t pred = data.row(i)[best.feature] <= best.threshold
                                    ? best.left_class
                                    : best.right_class;
            if (pred != data.y[i]) w[i] *= std::exp(best.alpha);
            sum += w[i];
        }
        for (auto& wi : w) wi /= sum;
    }
    return m;
}

} // namespace detail

/// Fits a model of cfg.kind. Deterministic under cfg.rng_seed; rows are
/// consumed in the given order (TrainingSet order is canonical).
inline ClassifierModel train_classifier(const LabeledData& data, const TrainConfig& cfg,
                                        unsigned threads = 1) {
    cfg.validate();
    detail::validate_training_data(data);
    ClassifierModel model;
    model.kind = cfg.kind;
    model.class_names = data.class_names;
    model.width = data.width;
    model.rng_seed = cfg.rng_seed;
    switch (cfg.kind) {
        case ClassifierKind::NaiveBayes:
            model.nb = detail::train_nb(data, cfg);
            break;
        case ClassifierKind::RandomForest:
            model.forest = detail::train_forest(data, cfg, threads);
            break;
        case ClassifierKind::AdaBoost:
            model.boost = detail::train_adaboost(data, cfg);
            break;
    }
    return model;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct ClassMetrics {
    std::string class_name;
    std::size_t support = 0;   // true members
    std::size_t predicted = 0; // predicted members
    std::size_t correct = 0;
    double precision = 0;
    double recall = 0;
    bool precision_zero_division = false;
    bool recall_zero_division = false;
};

struct EvalResult {
    std::vector<ClassMetrics> per_class;
    double macro_precision = 0;
    double macro_recall = 0;
};

/// One-vs-rest precision/recall per class plus macro averages. Empty
/// denominators yield 0 with the corresponding flag set.
inline EvalResult metrics_from_predictions(std::span<const std::int32_t> y_true,
                                           std::span<const std::int32_t> y_pred,
                                           const std::vector<std::string>& class_names) {
    if (y_true.empty())
        throw DataError("evaluate: empty data");
    if (y_true.size() != y_pred.size())
        throw DataError("evaluate: label/prediction size mismatch");
    EvalResult res;
    res.per_class.resize(class_names.size());
    for (std::size_t c = 0; c < class_names.size(); ++c)
        res.per_class[c].class_name = class_names[c];
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        res.per_class[y_true[i]].support++;
        res.per_class[y_pred[i]].predicted++;
        if (y_true[i] == y_pred[i]) res.per_class[y_true[i]].correct++;
    }
    for (auto& m : res.per_class) {
        if (m.predicted == 0) {
            m.precision_zero_division = true;
        } else {
            m.precision = static_cast<double>(m.correct) / static_cast<double>(m.predicted);
        }
        if (m.support == 0) {
            m.recall_zero_division = true;
        } else {
            m.recall = static_cast<double>(m.correct) / static_cast<double>(m.support);
        }
        res.macro_precision += m.precision;
        res.macro_recall += m.recall;
    }
    res.macro_precision /= static_cast<double>(res.per_class.size());
    res.macro_recall /= static_cast<double>(res.per_class.size());
    return res;
}

inline EvalResult evaluate_classifier(const ClassifierModel& model, const LabeledData& data) {
    if (data.size() == 0) throw DataError("evaluate: empty data");
    std::vector<std::int32_t> preds(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        preds[i] = model.predict(data.row(i));
    return metrics_from_predictions(data.y, preds, model.class_names);
}

// ---------------------------------------------------------------------------
// Serialization (versioned JSON document)
// ---------------------------------------------------------------------------

inline constexpr int kModelSchemaVersion = 1;

inline nlohmann::ordered_json model_to_json(const ClassifierModel& m) {
    nlohmann::ordered_json j;
    j["schema_version"] = kModelSchemaVersion;
    j["kind"] = to_string(m.kind);
    j["classes"] = m.class_names;
    j["width"] = m.width;
    j["rng_seed"] = m.rng_seed;
    switch (m.kind) {
        case ClassifierKind::NaiveBayes: {
            auto priors = nlohmann::ordered_json::array();
            for (double lp : m.nb.log_prior) {
                if (std::isinf(lp))
                    priors.push_back(nullptr);
                else
                    priors.push_back(lp);
            }
            j["model"] = nlohmann::ordered_json{{"log_prior", std::move(priors)},
                                                {"mean", m.nb.mean},
                                                {"variance", m.nb.variance}};
            break;
        }
        case ClassifierKind::RandomForest: {
            auto trees = nlohmann::ordered_json::array();
            for (const auto& t : m.forest.trees) {
                auto nodes = nlohmann::ordered_json::array();
                for (const auto& n : t.nodes)
                    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.dist});
                trees.push_back(std::move(nodes));
            }
            j["model"] = nlohmann::ordered_json{{"trees", std::move(trees)}};
            break;
        }
        case ClassifierKind::AdaBoost: {
            auto stumps = nlohmann::ordered_json::array();
            for (const auto& s : m.boost.stumps)
                stumps.push_back({s.feature, s.threshold, s.left_class, s.right_class, s.alpha});
            j["model"] = nlohmann::ordered_json{{"stumps", std::move(stumps)}};
            break;
        }
    }
    return j;
}

inline ClassifierModel model_from_json(const nlohmann::json& j) {
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != kModelSchemaVersion)
        throw DataError("model file: unsupported schema version");
    ClassifierModel m;
    m.kind = classifier_kind_from(j.at("kind").get<std::string>());
    m.class_names = j.at("classes").get<std::vector<std::string>>();
    m.width = j.at("width").get<std::size_t>();
    m.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    const auto& body = j.at("model");
    switch (m.kind) {
        case ClassifierKind::NaiveBayes: {
            for (const auto& lp : body.at("log_prior"))
                m.nb.log_prior.push_back(lp.is_null()
                                             ? -std::numeric_limits<double>::infinity()
                                             : lp.get<double>());
            m.nb.mean = body.at("mean").get<std::vector<double>>();
            m.nb.variance = body.at("variance").get<std::vector<double>>();
            break;
        }
        case ClassifierKind::RandomForest: {
            for (const auto& tj : body.at("trees")) {
                DecisionTree t;
                for (const auto& nj : tj) {
                    TreeNode n;
                    n.feature = nj.at(0).get<std::int32_t>();
                    n.threshold = nj.at(1).get<double>();
                    n.left = nj.at(2).get<std::int32_t>();
                    n.right = nj.at(3).get<std::int32_t>();
                    n.dist = nj.at(4).get<std::vector<double>>();
                    t.nodes.push_back(std::move(n));
                }
                m.forest.trees.push_back(std::move(t));
            }
            break;
        }
        case ClassifierKind::AdaBoost: {
            for (const auto& sj : body.at("stumps")) {
                Stump s;
                s.feature = sj.at(0).get<std::int32_t>();
                s.threshold = sj.at(1).get<double>();
                s.left_class = sj.at(2).get<std::int32_t>();
                s.right_class = sj.at(3).get<std::int32_t>();
                s.alpha = sj.at(4).get<double>();
                m.boost.stumps.push_back(s);
            }
            break;
        }
    }
    return m;
}

inline std::string serialize_model(const ClassifierModel& m) {
    return model_to_json(m).dump(2) + "\n";
}

inline ClassifierModel deserialize_model(const std::string& text) {
    return model_from_json(nlohmann::json::parse(text));
}

} // namespace globalness
