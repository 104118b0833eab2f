#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mstae/graph.hpp"
#include "mstae/matrix.hpp"

namespace mstae {

enum class RegularizerMode { mst_mds, mst_le, gae, euclidean_mds, euclidean_le, none };

struct RegularizerResult {
    double value = 0.0;
    Matrix grad;  // m x p
};

/// MDS embedding loss against a target distance matrix:
///   value = sum_{i<j} (M_ij - ||z_i - z_j||)^2.
/// The norm singularity at coincident latent rows is epsilon-guarded.
inline RegularizerResult loss_mds(const Matrix& z, const MstDistanceMatrix& m_dist) {
    const std::size_t m = z.rows();
    const std::size_t p = z.cols();
    if (m_dist.values.rows() != m) throw std::invalid_argument("loss_mds: size mismatch");
    constexpr double eps = 1e-12;

    RegularizerResult r;
    r.grad = Matrix(m, p);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double dz = row_distance(z, i, z, j);
            const double diff = m_dist.values(i, j) - dz;
            r.value += diff * diff;
            const double coef = 2.0 * (dz - m_dist.values(i, j)) / std::max(dz, eps);
            for (std::size_t c = 0; c < p; ++c) {
                const double g = coef * (z(i, c) - z(j, c));
                r.grad(i, c) += g;
                r.grad(j, c) -= g;
            }
        }
    }
    return r;
}

/// Laplacian-eigenmap embedding loss. The scalar is the quadratic form
/// trace(Z^T L Z) = sum_{i<j} W_ij ||z_i - z_j||^2; grad = 2 L Z.
inline RegularizerResult loss_le(const Matrix& z, const GraphSimilarity& sim) {
    const std::size_t m = z.rows();
    if (sim.laplacian.rows() != m) throw std::invalid_argument("loss_le: size mismatch");
    RegularizerResult r;
    const Matrix lz = matmul_nn(sim.laplacian, z);
    r.value = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t c = 0; c < z.cols(); ++c) r.value += z(i, c) * lz(i, c);
    r.grad = lz;
    for (double& v : r.grad.data()) v *= 2.0;
    return r;
}

/// Independent pairwise-sum route for the LE scalar; kept for the dual-route
/// identity check against loss_le.
inline double loss_le_pairwise(const Matrix& z, const GraphSimilarity& sim) {
    const std::size_t m = z.rows();
    double v = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            v += sim.w(i, j) * row_distance2(z, i, z, j);
    return v;
}

/// GAE baseline: the LE loss on a k-NN heat-kernel similarity, scaled by
/// the regularization weight lambda.
inline RegularizerResult loss_gae(const Matrix& z, const GraphSimilarity& sim, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("loss_gae: negative lambda");
    if (lambda == 0.0) {
        RegularizerResult r;
        r.grad = Matrix(z.rows(), z.cols());
        return r;
    }
    RegularizerResult r = loss_le(z, sim);
    r.value *= lambda;
    for (double& v : r.grad.data()) v *= lambda;
    return r;
}

/// Regularizer target, fixed before training and never rebuilt from Z.
struct RegularizerConfig {
    RegularizerMode mode = RegularizerMode::mst_le;
    double lambda = 1.0;  // used only in gae mode
    MstDistanceMatrix distances;  // mds modes
    GraphSimilarity similarity;   // le / gae modes

    RegularizerResult evaluate(const Matrix& z) const {
        switch (mode) {
            case RegularizerMode::mst_mds:
            case RegularizerMode::euclidean_mds:
                return loss_mds(z, distances);
            case RegularizerMode::mst_le:
            case RegularizerMode::euclidean_le:
                return loss_le(z, similarity);
            case RegularizerMode::gae:
                return loss_gae(z, similarity, lambda);
            case RegularizerMode::none: {
                RegularizerResult r;
                r.grad = Matrix(z.rows(), z.cols());
                return r;
            }
        }
        throw std::logic_error("RegularizerConfig: unknown mode");
    }
};

/// Euclidean distance matrix of the original data, for the euclidean_mds
/// mode (same container as the tree-distance target).
inline MstDistanceMatrix euclidean_distances(const DataMatrix& x) {
    const std::size_t m = x.n_rows();
    MstDistanceMatrix d;
    d.values = Matrix(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const double v = row_distance(x.values, i, x.values, j);
            d.values(i, j) = v;
            d.values(j, i) = v;
        }
    return d;
}

/// Euclidean inverse-distance similarity for the euclidean_le mode, built by
/// the same clamped-reciprocal rule as the tree version.
inline GraphSimilarity euclidean_similarity(const DataMatrix& x, double zero_clamp = 1e-6) {
    return mst_similarity(euclidean_distances(x), zero_clamp);
}

}  // namespace mstae
