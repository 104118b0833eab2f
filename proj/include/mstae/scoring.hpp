#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mstae/dataset.hpp"
#include "mstae/graph.hpp"

namespace mstae {

enum class ScoreMethod { recon, lomst, cof };

struct ScoreVector {
    std::vector<double> scores;  // higher = more anomalous
    ScoreMethod method = ScoreMethod::recon;
};

struct DetectionConfig {
    std::size_t n_flag = 1;
};

/// Reconstruction-error score: squared Euclidean row difference.
inline ScoreVector recon_scores(const DataMatrix& x, const Matrix& x_prime) {
    if (!x.values.same_shape(x_prime)) throw std::invalid_argument("recon_scores: shape mismatch");
    ScoreVector s;
    s.method = ScoreMethod::recon;
    s.scores.resize(x.n_rows());
    for (std::size_t i = 0; i < x.n_rows(); ++i)
        s.scores[i] = row_distance2(x.values, i, x_prime, i);
    return s;
}

namespace detail {

/// MST total weight of the complete graph over a point subset. Prim on the
/// fly; subsets are k+1 points so the quadratic cost is irrelevant.
inline double subset_mst_weight(const Matrix& pts, const std::vector<std::size_t>& ids) {
    const std::size_t n = ids.size();
    if (n < 2) return 0.0;
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<bool> in_tree(n, false);
    best[0] = 0.0;
    double total = 0.0;
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t pick = n;
        for (std::size_t v = 0; v < n; ++v)
            if (!in_tree[v] && (pick == n || best[v] < best[pick])) pick = v;
        in_tree[pick] = true;
        total += best[pick];
        for (std::size_t v = 0; v < n; ++v) {
            if (in_tree[v]) continue;
            const double d = row_distance(pts, ids[pick], pts, ids[v]);
            if (d < best[v]) best[v] = d;
        }
    }
    return total;
}

/// COF average chaining distance over {i} union kNN(i): the set-based nearest
/// path is grown greedily from i, and edge costs are weighted by
/// 2(r - l) / (r(r - 1)) for the l-th edge, r = k + 1.
inline double avg_chaining_distance(const Matrix& pts, std::size_t i,
                                    const std::vector<std::size_t>& nbrs) {
    std::vector<std::size_t> ids;
    ids.push_back(i);
    ids.insert(ids.end(), nbrs.begin(), nbrs.end());
    const std::size_t r = ids.size();
    if (r < 2) return 0.0;
    std::vector<bool> in_chain(r, false);
    std::vector<double> best(r, std::numeric_limits<double>::infinity());
    in_chain[0] = true;
    for (std::size_t v = 1; v < r; ++v) best[v] = row_distance(pts, ids[0], pts, ids[v]);
    double ac = 0.0;
    for (std::size_t l = 1; l < r; ++l) {
        std::size_t pick = r;
        for (std::size_t v = 1; v < r; ++v)
            if (!in_chain[v] && (pick == r || best[v] < best[pick])) pick = v;
        in_chain[pick] = true;
        const double weight = 2.0 * static_cast<double>(r - l) /
                              (static_cast<double>(r) * static_cast<double>(r - 1));
        ac += weight * best[pick];
        for (std::size_t v = 1; v < r; ++v) {
            if (in_chain[v]) continue;
            const double d = row_distance(pts, ids[pick], pts, ids[v]);
            if (d < best[v]) best[v] = d;
        }
    }
    return ac;
}

}  // namespace detail

/// LoMST: per point, the total edge length of the MST over the point and its
/// k nearest neighbors; score = own total minus the neighbors' mean total.
inline ScoreVector lomst_scores(const Matrix& pts, std::size_t k) {
    const std::size_t m = pts.rows();
    if (k < 1 || k >= m) throw std::invalid_argument("lomst_scores: need 1 <= k < m");
    DataMatrix wrap;
    wrap.values = pts;
    wrap.standardized = true;
    const auto knn = knn_index(wrap, k);
    std::vector<double> totals(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::size_t> ids;
        ids.push_back(i);
        ids.insert(ids.end(), knn[i].begin(), knn[i].end());
        totals[i] = detail::subset_mst_weight(pts, ids);
    }
    ScoreVector s;
    s.method = ScoreMethod::lomst;
    s.scores.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        double nbr_mean = 0.0;
        for (std::size_t j : knn[i]) nbr_mean += totals[j];
        nbr_mean /= static_cast<double>(k);
        s.scores[i] = totals[i] - nbr_mean;
    }
    return s;
}

/// Connectivity outlier factor: ratio of a point's average chaining distance
/// to the mean of its neighbors'.
inline ScoreVector cof_scores(const Matrix& pts, std::size_t k) {
    const std::size_t m = pts.rows();
    if (k < 1 || k >= m) throw std::invalid_argument("cof_scores: need 1 <= k < m");
    DataMatrix wrap;
    wrap.values = pts;
    wrap.standardized = true;
    const auto knn = knn_index(wrap, k);
    std::vector<double> ac(m);
    for (std::size_t i = 0; i < m; ++i) ac[i] = detail::avg_chaining_distance(pts, i, knn[i]);
    ScoreVector s;
    s.method = ScoreMethod::cof;
    s.scores.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        double denom = 0.0;
        for (std::size_t j : knn[i]) denom += ac[j];
        // All-zero neighborhoods (duplicate clusters) score 1: no isolation signal.
        s.scores[i] = denom > 0.0 ? ac[i] * static_cast<double>(k) / denom
                                  : (ac[i] > 0.0 ? std::numeric_limits<double>::max() : 1.0);
    }
    return s;
}

/// Flags the n_flag highest scores; boundary ties go to the smaller index.
inline LabelVector flag_top_n(const ScoreVector& s, const DetectionConfig& cfg) {
    const std::size_t m = s.scores.size();
    if (cfg.n_flag < 1 || cfg.n_flag > m) throw std::invalid_argument("flag_top_n: need 1 <= N <= m");
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (s.scores[a] != s.scores[b]) return s.scores[a] > s.scores[b];
        return a < b;
    });
    std::vector<Label> labels(m, Label::normal);
    for (std::size_t r = 0; r < cfg.n_flag; ++r) labels[order[r]] = Label::anomaly;
    return LabelVector::from(std::move(labels));
}

}  // namespace mstae
