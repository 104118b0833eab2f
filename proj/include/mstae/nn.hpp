#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "mstae/matrix.hpp"

namespace mstae {

enum class Activation { sigmoid, identity };

struct LayerSpec {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    Activation activation = Activation::sigmoid;
};

struct DenseLayer {
    Matrix weight;             // out_dim x in_dim
    std::vector<double> bias;  // out_dim
    Activation activation = Activation::sigmoid;
};

/// Encoder/decoder parameters as one flat chain of layers. The bottleneck is
/// the last encoder layer; the final decoder layer uses identity activation
/// so standardized (z-scored) targets are reconstructable.
struct NetworkParams {
    std::vector<DenseLayer> layers;
    std::size_t bottleneck = 0;  // index into layers of the latent-producing layer

    std::size_t input_dim() const { return layers.front().weight.cols(); }
    std::size_t latent_dim() const { return layers[bottleneck].weight.rows(); }
    std::size_t output_dim() const { return layers.back().weight.rows(); }

    bool all_finite() const {
        for (const auto& l : layers) {
            if (!l.weight.all_finite()) return false;
            for (double b : l.bias)
                if (!std::isfinite(b)) return false;
        }
        return true;
    }
};

struct Gradients {
    std::vector<Matrix> d_weight;
    std::vector<std::vector<double>> d_bias;
};

enum class ForwardMode { train, eval };

struct ForwardTrace {
    // Per layer: input actually consumed (post-dropout activation of the
    // previous layer), pre-activation, activation, and the inverted-dropout
    // scaled output passed downstream.
    std::vector<Matrix> inputs;
    std::vector<Matrix> pre;
    std::vector<Matrix> act;
    std::vector<Matrix> dropped;
    std::vector<std::vector<double>> dropout_masks;  // scale factors, empty when no dropout
    Matrix latent;  // m x p
    Matrix output;  // m x d
};

/// Xavier-uniform initialization: entries uniform on
/// +-sqrt(6 / (in + out)), biases zero. Encoder layers come first; the last
/// spec is the output layer and gets identity activation by the caller.
inline NetworkParams init_params(const std::vector<LayerSpec>& specs, std::uint64_t seed,
                                 std::size_t bottleneck_index) {
    if (specs.empty()) throw std::invalid_argument("init_params: no layers");
    if (bottleneck_index >= specs.size()) throw std::invalid_argument("init_params: bad bottleneck index");
    for (std::size_t l = 1; l < specs.size(); ++l)
        if (specs[l].in_dim != specs[l - 1].out_dim)
            throw std::invalid_argument("init_params: layer dims do not chain");
    std::mt19937_64 rng(seed);
    NetworkParams p;
    p.bottleneck = bottleneck_index;
    for (const LayerSpec& s : specs) {
        if (s.in_dim < 1 || s.out_dim < 1) throw std::invalid_argument("init_params: zero dim");
        DenseLayer layer;
        layer.activation = s.activation;
        layer.weight = Matrix(s.out_dim, s.in_dim);
        const double bound = std::sqrt(6.0 / static_cast<double>(s.in_dim + s.out_dim));
        std::uniform_real_distribution<double> u(-bound, bound);
        for (double& w : layer.weight.data()) w = u(rng);
        layer.bias.assign(s.out_dim, 0.0);
        p.layers.push_back(std::move(layer));
    }
    return p;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Forward pass. In train mode, inverted dropout zeroes hidden units with
/// probability dropout_rate and scales survivors by 1/(1-rate). The
/// bottleneck and the output layer are never dropped.
inline ForwardTrace forward(const NetworkParams& params, const Matrix& x, double dropout_rate,
                            ForwardMode mode, std::uint64_t seed) {
    if (x.cols() != params.input_dim()) throw std::invalid_argument("forward: input dim mismatch");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        throw std::invalid_argument("forward: dropout_rate must be in [0,1)");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    const std::size_t n_layers = params.layers.size();
    ForwardTrace t;
    t.inputs.resize(n_layers);
    t.pre.resize(n_layers);
    t.act.resize(n_layers);
    t.dropped.resize(n_layers);
    t.dropout_masks.resize(n_layers);

    Matrix cur = x;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const DenseLayer& layer = params.layers[l];
        t.inputs[l] = cur;
        Matrix pre = matmul_nt(cur, layer.weight);
        for (std::size_t i = 0; i < pre.rows(); ++i)
            for (std::size_t j = 0; j < pre.cols(); ++j) pre(i, j) += layer.bias[j];
        Matrix act = pre;
        if (layer.activation == Activation::sigmoid)
            for (double& v : act.data()) v = sigmoid(v);
        t.pre[l] = std::move(pre);

        const bool droppable = l != params.bottleneck && l + 1 != n_layers;
        Matrix dropped = act;
        if (mode == ForwardMode::train && dropout_rate > 0.0 && droppable) {
            const double scale = 1.0 / (1.0 - dropout_rate);
            std::vector<double>& mask = t.dropout_masks[l];
            mask.resize(dropped.data().size());
            for (std::size_t i = 0; i < mask.size(); ++i) {
                mask[i] = u01(rng) < dropout_rate ? 0.0 : scale;
                dropped.data()[i] *= mask[i];
            }
        }
        t.act[l] = std::move(act);
        if (l == params.bottleneck) t.latent = t.act[l];  // never dropped
        cur = dropped;
        t.dropped[l] = std::move(dropped);
    }
    t.output = t.dropped.back();
    return t;
}

/// Exact backprop for the joint loss. d_output is dLoss/dX', d_latent is the
/// regularizer's dLoss/dZ injected at the bottleneck; either may be empty
/// (treated as zero).
inline Gradients backward(const ForwardTrace& trace, const NetworkParams& params,
                          const Matrix& d_output, const Matrix& d_latent) {
    const std::size_t n_layers = params.layers.size();
    if (trace.act.size() != n_layers) throw std::invalid_argument("backward: trace/params mismatch");
    const Matrix& out = trace.output;
    if (d_output.rows() > 0 && !d_output.same_shape(out))
        throw std::invalid_argument("backward: d_output shape mismatch");
    if (d_latent.rows() > 0 &&
        (d_latent.rows() != out.rows() || d_latent.cols() != params.latent_dim()))
        throw std::invalid_argument("backward: d_latent shape mismatch");

    Gradients g;
    g.d_weight.resize(n_layers);
    g.d_bias.resize(n_layers);

    // Gradient w.r.t. the dropped (downstream-visible) output of each layer.
    Matrix d_down = d_output.rows() > 0 ? d_output : Matrix(out.rows(), out.cols());
    for (std::size_t li = n_layers; li-- > 0;) {
        const DenseLayer& layer = params.layers[li];
        Matrix d_act = std::move(d_down);
        if (!trace.dropout_masks[li].empty()) {
            const std::vector<double>& mask = trace.dropout_masks[li];
            for (std::size_t i = 0; i < d_act.data().size(); ++i) d_act.data()[i] *= mask[i];
        }
        if (li == params.bottleneck && d_latent.rows() > 0)
            for (std::size_t i = 0; i < d_act.data().size(); ++i)
                d_act.data()[i] += d_latent.data()[i];

        Matrix d_pre = std::move(d_act);
        if (layer.activation == Activation::sigmoid) {
            const Matrix& a = trace.act[li];
            for (std::size_t i = 0; i < d_pre.data().size(); ++i) {
                const double s = a.data()[i];
                d_pre.data()[i] *= s * (1.0 - s);
            }
        }

        g.d_weight[li] = matmul_tn(d_pre, trace.inputs[li]);
        g.d_bias[li].assign(layer.weight.rows(), 0.0);
        for (std::size_t i = 0; i < d_pre.rows(); ++i)
            for (std::size_t j = 0; j < d_pre.cols(); ++j) g.d_bias[li][j] += d_pre(i, j);

        if (li > 0) d_down = matmul_nn(d_pre, layer.weight);
    }
    return g;
}

}  // namespace mstae
