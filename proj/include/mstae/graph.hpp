#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "mstae/dataset.hpp"
#include "mstae/matrix.hpp"

namespace mstae {

struct Edge {
    std::size_t i = 0;  // i < j always
    std::size_t j = 0;
    double weight = 0.0;
};

struct EdgeWeightedGraph {
    std::size_t n_vertices = 0;
    std::vector<Edge> edges;
};

struct SpanningTree {
    std::size_t n_vertices = 0;
    std::vector<Edge> edges;  // exactly n_vertices - 1
    double total_weight = 0.0;
};

struct MstDistanceMatrix {
    Matrix values;  // m x m, symmetric, zero diagonal
};

struct GraphSimilarity {
    Matrix w;                    // symmetric, zero diagonal
    std::vector<double> degree;  // row sums of w
    Matrix laplacian;            // diag(degree) - w
};

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

/// Complete Euclidean graph: one edge per unordered pair, weight = Euclidean
/// distance between the corresponding rows.
inline EdgeWeightedGraph complete_graph(const DataMatrix& x) {
    const std::size_t m = x.n_rows();
    if (m < 2) throw std::invalid_argument("complete_graph: need at least 2 rows");
    EdgeWeightedGraph g;
    g.n_vertices = m;
    g.edges.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i + 1 < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            g.edges.push_back({i, j, row_distance(x.values, i, x.values, j)});
    return g;
}

/// Prim with a binary heap. Equal-weight candidates are resolved by the
/// lexicographically smallest (i, j) edge id so the tree is deterministic.
inline SpanningTree minimum_spanning_tree(const EdgeWeightedGraph& g) {
    const std::size_t n = g.n_vertices;
    if (n < 1) throw std::invalid_argument("minimum_spanning_tree: empty graph");
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (const Edge& e : g.edges) {
        if (e.i >= e.j || e.j >= n) throw std::invalid_argument("minimum_spanning_tree: bad edge");
        adj[e.i].push_back({e.j, e.weight});
        adj[e.j].push_back({e.i, e.weight});
    }

    // heap entries: (weight, min(i,j), max(i,j), vertex to add)
    using Entry = std::tuple<double, std::size_t, std::size_t, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    std::vector<bool> in_tree(n, false);

    SpanningTree t;
    t.n_vertices = n;
    in_tree[0] = true;
    for (const auto& [v, w] : adj[0]) heap.push({w, std::min<std::size_t>(0, v), std::max<std::size_t>(0, v), v});

    while (!heap.empty() && t.edges.size() + 1 < n) {
        const auto [w, a, b, v] = heap.top();
        heap.pop();
        if (in_tree[v]) continue;
        in_tree[v] = true;
        t.edges.push_back({a, b, w});
        t.total_weight += w;
        for (const auto& [u, wu] : adj[v])
            if (!in_tree[u]) heap.push({wu, std::min(v, u), std::max(v, u), u});
    }
    if (t.edges.size() + 1 != n)
        throw std::runtime_error("minimum_spanning_tree: graph is disconnected");
    return t;
}

inline SpanningTree euclidean_mst(const DataMatrix& x) {
    return minimum_spanning_tree(complete_graph(x));
}

/// Tree-path distances: one traversal per source vertex over the tree's
/// adjacency, accumulating path sums.
inline MstDistanceMatrix tree_distances(const SpanningTree& t) {
    const std::size_t n = t.n_vertices;
    if (t.edges.size() + 1 != n) throw std::invalid_argument("tree_distances: not a tree");
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (const Edge& e : t.edges) {
        adj[e.i].push_back({e.j, e.weight});
        adj[e.j].push_back({e.i, e.weight});
    }
    MstDistanceMatrix m;
    m.values = Matrix(n, n);
    std::vector<std::size_t> stack;
    std::vector<bool> seen(n);
    for (std::size_t src = 0; src < n; ++src) {
        std::fill(seen.begin(), seen.end(), false);
        stack.assign(1, src);
        seen[src] = true;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (const auto& [v, w] : adj[u]) {
                if (seen[v]) continue;
                seen[v] = true;
                m.values(src, v) = m.values(src, u) + w;
                stack.push_back(v);
            }
        }
    }
    // Path sums from i and from j add the same edges in opposite order and can
    // differ in the last ulp; mirror the upper triangle for exact symmetry.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) m.values(j, i) = m.values(i, j);
    return m;
}

namespace detail {

inline GraphSimilarity finish_similarity(Matrix w) {
    const std::size_t n = w.rows();
    GraphSimilarity s;
    s.degree.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s.degree[i] += w(i, j);
    s.laplacian = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            s.laplacian(i, j) = (i == j ? s.degree[i] : 0.0) - w(i, j);
    s.w = std::move(w);
    return s;
}

}  // namespace detail

/// Inverse tree-distance similarity: W_ij = 1/M_ij off-diagonal; coincident
/// points (M_ij = 0, i != j) are clamped to 1/zero_clamp.
inline GraphSimilarity mst_similarity(const MstDistanceMatrix& m_dist, double zero_clamp = 1e-6) {
    if (zero_clamp <= 0.0) throw std::invalid_argument("mst_similarity: zero_clamp must be positive");
    const std::size_t n = m_dist.values.rows();
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = m_dist.values(i, j);
            w(i, j) = d > 0.0 ? 1.0 / d : 1.0 / zero_clamp;
        }
    return detail::finish_similarity(std::move(w));
}

/// Exact k-nearest-neighbor table: row i holds i's k nearest neighbors sorted
/// by distance, ties broken by smaller id.
inline std::vector<std::vector<std::size_t>> knn_index(const DataMatrix& x, std::size_t k) {
    const std::size_t m = x.n_rows();
    if (k < 1 || k >= m) throw std::invalid_argument("knn_index: need 1 <= k < m");
    std::vector<std::vector<std::size_t>> table(m);
    std::vector<std::pair<double, std::size_t>> cand;
    for (std::size_t i = 0; i < m; ++i) {
        cand.clear();
        cand.reserve(m - 1);
        for (std::size_t j = 0; j < m; ++j)
            if (j != i) cand.push_back({row_distance2(x.values, i, x.values, j), j});
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
        table[i].reserve(k);
        for (std::size_t r = 0; r < k; ++r) table[i].push_back(cand[r].second);
    }
    return table;
}

/// Heat-kernel similarity on the OR-symmetrized k-NN graph:
/// V_ij = exp(-||x_i - x_j||^2 / bandwidth) when i,j are neighbors either way.
inline GraphSimilarity knn_heat_similarity(const DataMatrix& x, std::size_t k, double bandwidth) {
    if (bandwidth <= 0.0) throw std::invalid_argument("knn_heat_similarity: bandwidth must be positive");
    const std::size_t m = x.n_rows();
    const auto nbrs = knn_index(x, k);
    Matrix v(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j : nbrs[i]) {
            const double val = std::exp(-row_distance2(x.values, i, x.values, j) / bandwidth);
            v(i, j) = val;
            v(j, i) = val;
        }
    return detail::finish_similarity(std::move(v));
}

/// Default GAE bandwidth: mean squared distance to the k-th neighbor.
inline double heat_bandwidth(const DataMatrix& x, std::size_t k) {
    const auto nbrs = knn_index(x, k);
    double s = 0.0;
    for (std::size_t i = 0; i < x.n_rows(); ++i)
        s += row_distance2(x.values, i, x.values, nbrs[i].back());
    s /= static_cast<double>(x.n_rows());
    return s > 0.0 ? s : 1.0;
}

}  // namespace mstae
