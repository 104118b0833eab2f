#include <doctest.h>

#include <random>

#include "mstae/checkpoint.hpp"
#include "mstae/intrinsic_dim.hpp"
#include "mstae/nn.hpp"
#include "mstae/regularizer.hpp"
#include "oracles.hpp"

using namespace mstae;

TEST_CASE("init_params: Xavier bound, determinism, chained dims") {
    const std::vector<LayerSpec> specs{{4, 4, Activation::sigmoid}};
    const NetworkParams p = init_params(specs, 5, 0);
    const double bound = std::sqrt(6.0 / 8.0);
    for (double w : p.layers[0].weight.data()) {
        CHECK(w >= -bound);
        CHECK(w <= bound);
    }
    for (double b : p.layers[0].bias) CHECK(b == 0.0);

    const NetworkParams q = init_params(specs, 5, 0);
    CHECK(p.layers[0].weight.data() == q.layers[0].weight.data());

    CHECK_THROWS(init_params({{4, 3, Activation::sigmoid}, {4, 2, Activation::sigmoid}}, 1, 0));
}

TEST_CASE("init_params: empirical variance approximates 2/(in+out)") {
    const NetworkParams p = init_params({{1000, 1000, Activation::sigmoid}}, 77, 0);
    double mean = 0.0;
    for (double w : p.layers[0].weight.data()) mean += w;
    mean /= static_cast<double>(p.layers[0].weight.data().size());
    double var = 0.0;
    for (double w : p.layers[0].weight.data()) var += (w - mean) * (w - mean);
    var /= static_cast<double>(p.layers[0].weight.data().size());
    const double expected = 2.0 / 2000.0;
    CHECK(std::abs(var - expected) / expected < 0.1);
}

TEST_CASE("forward: zero params give sigmoid(0) = 0.5 everywhere hidden") {
    NetworkParams p = init_params(layer_plan(4, 2, 4), 1, layer_plan_bottleneck(4));
    for (auto& l : p.layers) {
        for (double& w : l.weight.data()) w = 0.0;
        for (double& b : l.bias) b = 0.0;
    }
    Matrix x(5, 4);
    const ForwardTrace t = forward(p, x, 0.0, ForwardMode::eval, 0);
    for (double v : t.latent.data()) CHECK(v == doctest::Approx(0.5));
    for (double v : t.output.data()) CHECK(v == 0.0);  // identity output of zero weights
}

TEST_CASE("forward: eval mode ignores the seed") {
    const NetworkParams p = init_params(layer_plan(6, 2, 4), 3, layer_plan_bottleneck(4));
    Matrix x(7, 6);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 1.0);
    for (double& v : x.data()) v = g(rng);
    const ForwardTrace a = forward(p, x, 0.5, ForwardMode::eval, 1);
    const ForwardTrace b = forward(p, x, 0.5, ForwardMode::eval, 999);
    CHECK(a.output.data() == b.output.data());
}

TEST_CASE("forward: single identity layer with W = I reproduces the input") {
    NetworkParams p;
    p.bottleneck = 0;
    DenseLayer l;
    l.activation = Activation::identity;
    l.weight = Matrix(3, 3);
    for (std::size_t i = 0; i < 3; ++i) l.weight(i, i) = 1.0;
    l.bias.assign(3, 0.0);
    p.layers.push_back(std::move(l));
    Matrix x(4, 3);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 1.0);
    for (double& v : x.data()) v = g(rng);
    const ForwardTrace t = forward(p, x, 0.0, ForwardMode::eval, 0);
    for (std::size_t i = 0; i < x.data().size(); ++i)
        CHECK(t.output.data()[i] == doctest::Approx(x.data()[i]));
}

TEST_CASE("backward: zero upstream gradients give zero parameter gradients") {
    const NetworkParams p = init_params(layer_plan(5, 2, 4), 8, layer_plan_bottleneck(4));
    Matrix x(6, 5);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (double& v : x.data()) v = g(rng);
    const ForwardTrace t = forward(p, x, 0.0, ForwardMode::eval, 0);
    const Gradients grads = backward(t, p, Matrix(6, 5), Matrix(6, 2));
    for (const auto& w : grads.d_weight)
        for (double v : w.data()) CHECK(v == 0.0);
}

TEST_CASE("backward is linear in the output gradient") {
    const NetworkParams p = init_params(layer_plan(5, 2, 4), 12, layer_plan_bottleneck(4));
    Matrix x(6, 5);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    for (double& v : x.data()) v = g(rng);
    const ForwardTrace t = forward(p, x, 0.0, ForwardMode::eval, 0);
    Matrix d1(6, 5);
    for (double& v : d1.data()) v = g(rng);
    Matrix d2 = d1;
    for (double& v : d2.data()) v *= 2.0;
    const Gradients g1 = backward(t, p, d1, Matrix());
    const Gradients g2 = backward(t, p, d2, Matrix());
    for (std::size_t l = 0; l < g1.d_weight.size(); ++l)
        for (std::size_t i = 0; i < g1.d_weight[l].data().size(); ++i)
            CHECK(g2.d_weight[l].data()[i] == doctest::Approx(2.0 * g1.d_weight[l].data()[i]));
}

TEST_CASE("gradient check: joint loss vs central differences, both regularizer forms") {
    for (const std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(0.0, 1.0);
        const std::size_t m = 10, d = 5, p_dim = 2;
        Matrix x(m, d);
        for (double& v : x.data()) v = g(rng);

        DataMatrix dx;
        dx.values = x;
        dx.standardized = true;
        MstDistanceMatrix target = tree_distances(euclidean_mst(dx));
        GraphSimilarity sim = mst_similarity(target);

        for (const bool use_le : {false, true}) {
            NetworkParams params = init_params(layer_plan(d, p_dim, 4), seed * 31 + use_le,
                                               layer_plan_bottleneck(4));
            const auto joint_loss = [&]() {
                const ForwardTrace t = forward(params, x, 0.0, ForwardMode::eval, 0);
                const double recon = frobenius_diff2(x, t.output);
                return recon + (use_le ? loss_le(t.latent, sim).value
                                       : loss_mds(t.latent, target).value);
            };
            const ForwardTrace t = forward(params, x, 0.0, ForwardMode::eval, 0);
            Matrix d_out = t.output;
            for (std::size_t i = 0; i < d_out.data().size(); ++i)
                d_out.data()[i] = 2.0 * (d_out.data()[i] - x.data()[i]);
            const Matrix d_latent =
                use_le ? loss_le(t.latent, sim).grad : loss_mds(t.latent, target).grad;
            const Gradients analytic = backward(t, params, d_out, d_latent);
            const Gradients numeric = oracle::finite_diff_params(params, joint_loss);
            CHECK(oracle::max_grad_rel_err(analytic, numeric) < 1e-4);
        }
    }
}

TEST_CASE("inverted dropout: train-mode mask average approximates eval activations") {
    const std::size_t m = 4, d = 6;
    const NetworkParams p = init_params(layer_plan(d, 2, 4), 55, layer_plan_bottleneck(4));
    Matrix x(m, d);
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g(0.0, 1.0);
    for (double& v : x.data()) v = g(rng);

    const ForwardTrace ref = forward(p, x, 0.0, ForwardMode::eval, 0);
    Matrix acc(ref.dropped[0].rows(), ref.dropped[0].cols());
    const int draws = 10000;
    for (int it = 0; it < draws; ++it) {
        const ForwardTrace t = forward(p, x, 0.5, ForwardMode::train, static_cast<std::uint64_t>(it));
        for (std::size_t i = 0; i < acc.data().size(); ++i) acc.data()[i] += t.dropped[0].data()[i];
    }
    // per-unit comparison: average each hidden unit over rows and draws
    for (std::size_t c = 0; c < acc.cols(); ++c) {
        double got = 0.0, want = 0.0;
        for (std::size_t r = 0; r < acc.rows(); ++r) {
            got += acc(r, c) / draws;
            want += ref.act[0](r, c);
        }
        CHECK(std::abs(got - want) / std::abs(want) < 0.02);
    }
}

TEST_CASE("checkpoint round-trip preserves parameters exactly") {
    const NetworkParams p = init_params(layer_plan(7, 3, 4), 41, layer_plan_bottleneck(4));
    std::stringstream ss;
    save_params(ss, p);
    const NetworkParams q = load_params(ss);
    REQUIRE(q.layers.size() == p.layers.size());
    CHECK(q.bottleneck == p.bottleneck);
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        CHECK(q.layers[l].weight.data() == p.layers[l].weight.data());
        CHECK(q.layers[l].bias == p.layers[l].bias);
        CHECK(q.layers[l].activation == p.layers[l].activation);
    }
}
