#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mstae/nn.hpp"

namespace mstae {

/// Text checkpoint: header line `mstae-params <n_layers> <bottleneck>`, then
/// per layer one line `layer <out> <in> <sigmoid|identity>` followed by the
/// row-major weight entries and the bias entries, whitespace-separated, at
/// full double precision.
inline void save_params(std::ostream& out, const NetworkParams& p) {
    out.precision(17);
    out << "mstae-params " << p.layers.size() << ' ' << p.bottleneck << '\n';
    for (const DenseLayer& l : p.layers) {
        out << "layer " << l.weight.rows() << ' ' << l.weight.cols() << ' '
            << (l.activation == Activation::sigmoid ? "sigmoid" : "identity") << '\n';
        for (std::size_t i = 0; i < l.weight.data().size(); ++i)
            out << l.weight.data()[i] << (i + 1 == l.weight.data().size() ? '\n' : ' ');
        for (std::size_t i = 0; i < l.bias.size(); ++i)
            out << l.bias[i] << (i + 1 == l.bias.size() ? '\n' : ' ');
    }
}

inline void save_params(const std::string& path, const NetworkParams& p) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
    save_params(out, p);
}

inline NetworkParams load_params(std::istream& in) {
    std::string magic;
    std::size_t n_layers = 0, bottleneck = 0;
    in >> magic >> n_layers >> bottleneck;
    if (magic != "mstae-params" || n_layers == 0)
        throw std::runtime_error("not a parameter checkpoint");
    NetworkParams p;
    p.bottleneck = bottleneck;
    for (std::size_t l = 0; l < n_layers; ++l) {
        std::string tag, act;
        std::size_t rows = 0, cols = 0;
        in >> tag >> rows >> cols >> act;
        if (tag != "layer" || rows == 0 || cols == 0)
            throw std::runtime_error("malformed checkpoint layer header");
        DenseLayer layer;
        layer.activation = act == "sigmoid" ? Activation::sigmoid : Activation::identity;
        layer.weight = Matrix(rows, cols);
        for (double& v : layer.weight.data()) in >> v;
        layer.bias.resize(rows);
        for (double& v : layer.bias) in >> v;
        if (!in) throw std::runtime_error("truncated checkpoint");
        p.layers.push_back(std::move(layer));
    }
    if (p.bottleneck >= p.layers.size()) throw std::runtime_error("checkpoint bottleneck out of range");
    return p;
}

inline NetworkParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
    return load_params(in);
}

}  // namespace mstae
