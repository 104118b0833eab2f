#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mstae/dataset.hpp"
#include "mstae/graph.hpp"
#include "mstae/nn.hpp"
#include "mstae/regularizer.hpp"

namespace mstae {

enum class DenoiseKind { none, gaussian, neighbor_average };

struct DenoiseSpec {
    DenoiseKind kind = DenoiseKind::none;
    double noise_std = 0.3;  // gaussian
    std::size_t k = 5;       // neighbor_average
};

struct TrainConfig {
    std::size_t epochs = 500;
    double learning_rate = 0.01;
    double dropout_rate = 0.5;
    DenoiseSpec denoise;
    std::uint64_t seed = 0;
};

struct TrainRecord {
    std::vector<double> recon_loss;      // per epoch
    std::vector<double> embedding_loss;  // per epoch
    std::vector<double> total_loss;      // per epoch
    NetworkParams params;
    Matrix latent;  // eval-mode latent of the uncorrupted input
};

/// Input corruption for the denoising variants. gaussian adds i.i.d. noise;
/// neighbor_average replaces each row by the mean of its k nearest neighbors
/// (the point itself excluded).
inline Matrix corrupt(const DataMatrix& x, const DenoiseSpec& spec,
                      const std::vector<std::vector<std::size_t>>* knn, std::uint64_t seed) {
    switch (spec.kind) {
        case DenoiseKind::none:
            return x.values;
        case DenoiseKind::gaussian: {
            Matrix out = x.values;
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> gauss(0.0, spec.noise_std);
            for (double& v : out.data()) v += gauss(rng);
            return out;
        }
        case DenoiseKind::neighbor_average: {
            if (knn == nullptr) throw std::invalid_argument("corrupt: neighbor_average needs a knn table");
            if (knn->size() != x.n_rows()) throw std::invalid_argument("corrupt: knn table size mismatch");
            Matrix out(x.n_rows(), x.n_cols());
            for (std::size_t i = 0; i < x.n_rows(); ++i) {
                const auto& nbrs = (*knn)[i];
                if (nbrs.empty()) throw std::invalid_argument("corrupt: empty neighbor list");
                for (std::size_t j : nbrs)
                    for (std::size_t c = 0; c < x.n_cols(); ++c) out(i, c) += x.values(j, c);
                for (std::size_t c = 0; c < x.n_cols(); ++c)
                    out(i, c) /= static_cast<double>(nbrs.size());
            }
            return out;
        }
    }
    throw std::logic_error("corrupt: unknown denoise kind");
}

/// Full-batch gradient descent on the joint loss
///   ||X - X'||_F^2 + G(Z),
/// forward on the (possibly corrupted) input, reconstruction measured against
/// the original X. The regularizer target is fixed before training. Dropout
/// masks are resampled each epoch from a seed chain derived from cfg.seed.
inline TrainRecord train(const DataMatrix& x, NetworkParams params, const TrainConfig& cfg,
                         const RegularizerConfig& reg) {
    if (!x.standardized) throw std::invalid_argument("train: input must be standardized");
    if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (cfg.learning_rate <= 0.0) throw std::invalid_argument("train: learning_rate must be positive");

    const Matrix& target = x.values;
    Matrix input = target;
    if (cfg.denoise.kind == DenoiseKind::neighbor_average) {
        const auto knn = knn_index(x, cfg.denoise.k);
        input = corrupt(x, cfg.denoise, &knn, cfg.seed ^ 0x9e3779b97f4a7c15ull);
    } else if (cfg.denoise.kind == DenoiseKind::gaussian) {
        input = corrupt(x, cfg.denoise, nullptr, cfg.seed ^ 0x9e3779b97f4a7c15ull);
    }

    TrainRecord rec;
    rec.recon_loss.reserve(cfg.epochs);
    rec.embedding_loss.reserve(cfg.epochs);
    rec.total_loss.reserve(cfg.epochs);

    std::mt19937_64 epoch_seeds(cfg.seed);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const std::uint64_t mask_seed = epoch_seeds();
        ForwardTrace t = forward(params, input, cfg.dropout_rate, ForwardMode::train, mask_seed);

        const double recon = frobenius_diff2(target, t.output);
        const RegularizerResult r = reg.evaluate(t.latent);
        const double total = recon + r.value;
        if (!std::isfinite(total))
            throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch));
        rec.recon_loss.push_back(recon);
        rec.embedding_loss.push_back(r.value);
        rec.total_loss.push_back(total);

        Matrix d_output = t.output;
        for (std::size_t i = 0; i < d_output.data().size(); ++i)
            d_output.data()[i] = 2.0 * (d_output.data()[i] - target.data()[i]);

        const Gradients g = backward(t, params, d_output, r.grad);
        for (std::size_t l = 0; l < params.layers.size(); ++l) {
            DenseLayer& layer = params.layers[l];
            for (std::size_t i = 0; i < layer.weight.data().size(); ++i)
                layer.weight.data()[i] -= cfg.learning_rate * g.d_weight[l].data()[i];
            for (std::size_t j = 0; j < layer.bias.size(); ++j)
                layer.bias[j] -= cfg.learning_rate * g.d_bias[l][j];
        }
        if (!params.all_finite())
            throw std::runtime_error("train: non-finite parameters after epoch " + std::to_string(epoch));
    }

    const ForwardTrace final_trace = forward(params, target, 0.0, ForwardMode::eval, 0);
    rec.latent = final_trace.latent;
    rec.params = std::move(params);
    return rec;
}

}  // namespace mstae
