#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mstae/dataset.hpp"
#include "mstae/nn.hpp"

namespace mstae {

struct TwoNnStats {
    std::vector<double> mu;     // sorted ascending; mu_i = r2/r1
    std::vector<double> f_emp;  // i/m for the sorted order
    double slope = 0.0;
    std::size_t p_hat = 1;
};

/// Two-nearest-neighbor intrinsic dimension estimate: mu_i = r2/r1 per point,
/// empirical CDF over sorted mu, least-squares line through the origin on
/// (log mu, -log(1 - F)). Points with a zero nearest-neighbor distance
/// (duplicates) are dropped from the sample; the top order statistic is
/// excluded from the fit since -log(0) diverges.
inline TwoNnStats estimate_dimension(const DataMatrix& x) {
    const std::size_t m = x.n_rows();
    if (m < 3) throw std::invalid_argument("estimate_dimension: need at least 3 points");

    std::vector<double> mu;
    mu.reserve(m);
    std::vector<double> d2(m);
    for (std::size_t i = 0; i < m; ++i) {
        double r1 = -1.0, r2 = -1.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            const double d = row_distance2(x.values, i, x.values, j);
            if (d <= 0.0) continue;  // duplicate of i, unusable for the ratio
            if (r1 < 0.0 || d < r1) {
                r2 = r1;
                r1 = d;
            } else if (r2 < 0.0 || d < r2) {
                r2 = d;
            }
        }
        if (r1 < 0.0 || r2 < 0.0) continue;
        mu.push_back(std::sqrt(r2 / r1));
    }
    if (mu.size() < 3) throw std::runtime_error("estimate_dimension: too few distinct points");

    std::sort(mu.begin(), mu.end());
    const std::size_t n = mu.size();
    TwoNnStats s;
    s.mu = mu;
    s.f_emp.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.f_emp[i] = static_cast<double>(i + 1) / static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {  // drop the i = n point: -log(0)
        const double xv = std::log(mu[i]);
        const double yv = -std::log(1.0 - s.f_emp[i]);
        sxy += xv * yv;
        sxx += xv * xv;
    }
    if (sxx <= 0.0) throw std::runtime_error("estimate_dimension: all neighbor ratios are 1");
    s.slope = sxy / sxx;
    s.p_hat = static_cast<std::size_t>(std::max(1.0, std::round(s.slope)));
    return s;
}

/// Layer sizes linearly interpolated from the input width d down to the
/// bottleneck width p and mirrored back up; the final decoder layer is
/// identity-activated so z-scored targets are reconstructable.
inline std::vector<LayerSpec> layer_plan(std::size_t d, std::size_t p, std::size_t n_hidden) {
    if (p > d) throw std::invalid_argument("layer_plan: latent dim exceeds input dim");
    if (p < 1) throw std::invalid_argument("layer_plan: latent dim must be >= 1");
    if (n_hidden < 2 || n_hidden % 2 != 0)
        throw std::invalid_argument("layer_plan: n_hidden must be even and >= 2");

    const std::size_t half = n_hidden / 2;  // encoder layers, bottleneck included
    std::vector<std::size_t> enc_sizes(half);
    for (std::size_t i = 0; i < half; ++i) {
        const double t = static_cast<double>(i + 1) / static_cast<double>(half);
        const double w = static_cast<double>(d) - t * static_cast<double>(d - p);
        enc_sizes[i] = std::max<std::size_t>(p, static_cast<std::size_t>(std::llround(w)));
    }
    enc_sizes[half - 1] = p;

    std::vector<LayerSpec> specs;
    std::size_t prev = d;
    for (std::size_t w : enc_sizes) {
        specs.push_back({prev, w, Activation::sigmoid});
        prev = w;
    }
    for (std::size_t i = half - 1; i-- > 0;) {
        specs.push_back({prev, enc_sizes[i], Activation::sigmoid});
        prev = enc_sizes[i];
    }
    specs.push_back({prev, d, Activation::identity});
    return specs;
}

/// Index of the bottleneck layer produced by layer_plan.
inline std::size_t layer_plan_bottleneck(std::size_t n_hidden) { return n_hidden / 2 - 1; }

}  // namespace mstae
