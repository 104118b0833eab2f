#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "mstae/dataset.hpp"
#include "mstae/matrix.hpp"

namespace mstae {

struct DetectionMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
};

struct ClusteringMetrics {
    double nmi = 0.0;
    double acc = 0.0;
};

inline DetectionMetrics detection_metrics(const LabelVector& predicted, const LabelVector& truth) {
    if (predicted.labels.size() != truth.labels.size())
        throw std::invalid_argument("detection_metrics: length mismatch");
    DetectionMetrics m;
    for (std::size_t i = 0; i < truth.labels.size(); ++i) {
        const bool p = predicted.labels[i] == Label::anomaly;
        const bool t = truth.labels[i] == Label::anomaly;
        if (p && t) ++m.true_positives;
        else if (p && !t) ++m.false_positives;
        else if (!p && t) ++m.false_negatives;
    }
    const std::size_t flagged = m.true_positives + m.false_positives;
    const std::size_t actual = m.true_positives + m.false_negatives;
    m.precision = flagged > 0 ? static_cast<double>(m.true_positives) / static_cast<double>(flagged) : 0.0;
    m.recall = actual > 0 ? static_cast<double>(m.true_positives) / static_cast<double>(actual) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

/// Lloyd's k-means with k-means++ seeding, best of n_restarts by
/// within-cluster sum of squares. Deterministic per seed.
inline std::vector<std::size_t> kmeans(const Matrix& z, std::size_t n_clusters, std::uint64_t seed,
                                       std::size_t n_restarts = 5) {
    const std::size_t m = z.rows();
    const std::size_t p = z.cols();
    if (n_clusters < 2 || n_clusters > m) throw std::invalid_argument("kmeans: need 2 <= k <= m");
    if (n_restarts < 1) throw std::invalid_argument("kmeans: need n_restarts >= 1");

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> best_assign;
    double best_wcss = std::numeric_limits<double>::infinity();

    for (std::size_t restart = 0; restart < n_restarts; ++restart) {
        // k-means++ seeding
        Matrix centers(n_clusters, p);
        std::uniform_int_distribution<std::size_t> pick_first(0, m - 1);
        std::size_t first = pick_first(rng);
        for (std::size_t c = 0; c < p; ++c) centers(0, c) = z(first, c);
        std::vector<double> d2(m);
        for (std::size_t c = 1; c < n_clusters; ++c) {
            double total = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t cc = 0; cc < c; ++cc)
                    best = std::min(best, row_distance2(z, i, centers, cc));
                d2[i] = best;
                total += best;
            }
            std::size_t chosen = 0;
            if (total > 0.0) {
                std::uniform_real_distribution<double> u(0.0, total);
                double r = u(rng);
                for (std::size_t i = 0; i < m; ++i) {
                    r -= d2[i];
                    if (r <= 0.0) { chosen = i; break; }
                }
            } else {
                chosen = pick_first(rng);
            }
            for (std::size_t cc = 0; cc < p; ++cc) centers(c, cc) = z(chosen, cc);
        }

        std::vector<std::size_t> assign(m, 0);
        for (std::size_t iter = 0; iter < 200; ++iter) {
            bool changed = false;
            for (std::size_t i = 0; i < m; ++i) {
                std::size_t arg = 0;
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < n_clusters; ++c) {
                    const double d = row_distance2(z, i, centers, c);
                    if (d < best) { best = d; arg = c; }
                }
                if (assign[i] != arg) { assign[i] = arg; changed = true; }
            }
            if (!changed && iter > 0) break;
            Matrix sums(n_clusters, p);
            std::vector<std::size_t> counts(n_clusters, 0);
            for (std::size_t i = 0; i < m; ++i) {
                ++counts[assign[i]];
                for (std::size_t c = 0; c < p; ++c) sums(assign[i], c) += z(i, c);
            }
            for (std::size_t c = 0; c < n_clusters; ++c) {
                if (counts[c] == 0) continue;  // empty cluster keeps its center
                for (std::size_t cc = 0; cc < p; ++cc)
                    centers(c, cc) = sums(c, cc) / static_cast<double>(counts[c]);
            }
        }

        double wcss = 0.0;
        for (std::size_t i = 0; i < m; ++i) wcss += row_distance2(z, i, centers, assign[i]);
        if (wcss < best_wcss) {
            best_wcss = wcss;
            best_assign = assign;
        }
    }
    return best_assign;
}

namespace detail {

/// Exact min-cost assignment (Hungarian, potentials formulation) on an
/// n x n cost matrix; returns the column matched to each row.
inline std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = std::numeric_limits<double>::infinity();
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) { minv[j] = cur; way[j] = j0; }
                if (minv[j] < delta) { delta = minv[j]; j1 = j; }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) { u[p[j]] += delta; v[j] -= delta; }
                else minv[j] -= delta;
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> match(n, 0);
    for (std::size_t j = 1; j <= n; ++j)
        if (p[j] != 0) match[p[j] - 1] = j - 1;
    return match;
}

inline std::vector<std::size_t> relabel(const std::vector<std::size_t>& v, std::size_t& n_labels) {
    std::vector<std::size_t> uniq(v);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    n_labels = uniq.size();
    std::vector<std::size_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = static_cast<std::size_t>(
            std::lower_bound(uniq.begin(), uniq.end(), v[i]) - uniq.begin());
    return out;
}

}  // namespace detail

/// NMI (mutual information over the arithmetic mean of entropies) and ACC
/// (accuracy under the exact optimal one-to-one cluster-to-class matching).
inline ClusteringMetrics clustering_metrics(const std::vector<std::size_t>& assignment,
                                            const std::vector<std::size_t>& truth) {
    if (assignment.size() != truth.size())
        throw std::invalid_argument("clustering_metrics: length mismatch");
    const std::size_t m = assignment.size();
    if (m == 0) throw std::invalid_argument("clustering_metrics: empty input");

    std::size_t ka = 0, kb = 0;
    const auto a = detail::relabel(assignment, ka);
    const auto b = detail::relabel(truth, kb);

    std::vector<std::vector<double>> joint(ka, std::vector<double>(kb, 0.0));
    for (std::size_t i = 0; i < m; ++i) joint[a[i]][b[i]] += 1.0;

    std::vector<double> pa(ka, 0.0), pb(kb, 0.0);
    for (std::size_t i = 0; i < ka; ++i)
        for (std::size_t j = 0; j < kb; ++j) {
            pa[i] += joint[i][j];
            pb[j] += joint[i][j];
        }

    double mi = 0.0, ha = 0.0, hb = 0.0;
    const double dm = static_cast<double>(m);
    for (std::size_t i = 0; i < ka; ++i)
        if (pa[i] > 0.0) ha -= pa[i] / dm * std::log(pa[i] / dm);
    for (std::size_t j = 0; j < kb; ++j)
        if (pb[j] > 0.0) hb -= pb[j] / dm * std::log(pb[j] / dm);
    for (std::size_t i = 0; i < ka; ++i)
        for (std::size_t j = 0; j < kb; ++j)
            if (joint[i][j] > 0.0)
                mi += joint[i][j] / dm * std::log(dm * joint[i][j] / (pa[i] * pb[j]));

    ClusteringMetrics out;
    const double denom = 0.5 * (ha + hb);
    out.nmi = denom > 0.0 ? std::clamp(mi / denom, 0.0, 1.0) : 1.0;

    const std::size_t n = std::max(ka, kb);
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < ka; ++i)
        for (std::size_t j = 0; j < kb; ++j) cost[i][j] = -joint[i][j];
    const auto match = detail::hungarian(cost);
    double correct = 0.0;
    for (std::size_t i = 0; i < ka; ++i)
        if (match[i] < kb) correct += joint[i][match[i]];
    out.acc = correct / dm;
    return out;
}

/// Standard trustworthiness in [0,1]: penalizes points that are k-neighbors
/// in the embedding but distant (by rank) in the original space.
inline double trustworthiness(const DataMatrix& x_high, const Matrix& z_low, std::size_t k) {
    const std::size_t m = x_high.n_rows();
    if (z_low.rows() != m) throw std::invalid_argument("trustworthiness: row count mismatch");
    if (k < 1 || 2 * k >= m) throw std::invalid_argument("trustworthiness: need 1 <= k < m/2");

    // rank_high[i][j]: 1-based rank of j among i's neighbors in the original space
    std::vector<std::vector<std::size_t>> rank_high(m, std::vector<std::size_t>(m, 0));
    std::vector<std::pair<double, std::size_t>> cand(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < m; ++j)
            if (j != i) cand[idx++] = {row_distance2(x_high.values, i, x_high.values, j), j};
        std::sort(cand.begin(), cand.end());
        for (std::size_t r = 0; r < cand.size(); ++r) rank_high[i][cand[r].second] = r + 1;
    }

    double penalty = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < m; ++j)
            if (j != i) cand[idx++] = {row_distance2(z_low, i, z_low, j), j};
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
        for (std::size_t r = 0; r < k; ++r) {
            const std::size_t rh = rank_high[i][cand[r].second];
            if (rh > k) penalty += static_cast<double>(rh - k);
        }
    }
    const double norm = 2.0 / (static_cast<double>(m) * static_cast<double>(k) *
                               (2.0 * static_cast<double>(m) - 3.0 * static_cast<double>(k) - 1.0));
    return 1.0 - norm * penalty;
}

}  // namespace mstae
