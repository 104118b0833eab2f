#include <doctest.h>

#include <random>

#include "mstae/eval.hpp"

using namespace mstae;

namespace {

LabelVector make_labels(const std::vector<int>& flags) {
    LabelVector v;
    for (int f : flags) {
        v.labels.push_back(f ? Label::anomaly : Label::normal);
        if (f) ++v.anomaly_count;
    }
    return v;
}

}  // namespace

TEST_CASE("detection_metrics matches a brute-force confusion count") {
    std::mt19937_64 rng(101);
    std::bernoulli_distribution coin(0.3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> pred(50), truth(50);
        for (int i = 0; i < 50; ++i) {
            pred[i] = coin(rng) ? 1 : 0;
            truth[i] = coin(rng) ? 1 : 0;
        }
        std::size_t tp = 0, fp = 0, fn = 0;
        for (int i = 0; i < 50; ++i) {
            if (pred[i] && truth[i]) ++tp;
            if (pred[i] && !truth[i]) ++fp;
            if (!pred[i] && truth[i]) ++fn;
        }
        const DetectionMetrics m = detection_metrics(make_labels(pred), make_labels(truth));
        CHECK(m.true_positives == tp);
        CHECK(m.false_positives == fp);
        CHECK(m.false_negatives == fn);
        const double p = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
        const double r = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
        CHECK(m.precision == doctest::Approx(p));
        CHECK(m.recall == doctest::Approx(r));
        const double f1 = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
        CHECK(m.f1 == doctest::Approx(f1));
    }
}

TEST_CASE("detection_metrics: flagging exactly |O| points makes P = R = F1") {
    std::mt19937_64 rng(7);
    std::vector<int> truth(40, 0);
    for (int i = 0; i < 8; ++i) truth[i] = 1;
    std::shuffle(truth.begin(), truth.end(), rng);
    std::vector<int> pred(40, 0);
    // flag 8 arbitrary points, some right, some wrong
    std::vector<int> order(40);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 0; i < 8; ++i) pred[order[i]] = 1;
    const DetectionMetrics m = detection_metrics(make_labels(pred), make_labels(truth));
    CHECK(m.precision == doctest::Approx(m.recall));
    CHECK(m.f1 == doctest::Approx(m.precision));
}

TEST_CASE("detection_metrics: hand-worked F1 = 0.6 and zero-flag conventions") {
    // tp=3, fp=2, fn=2 -> p = r = 0.6, f1 = 0.6
    const auto pred = make_labels({1, 1, 1, 1, 1, 0, 0, 0, 0, 0});
    const auto truth = make_labels({1, 1, 1, 0, 0, 1, 1, 0, 0, 0});
    const DetectionMetrics m = detection_metrics(pred, truth);
    CHECK(m.f1 == doctest::Approx(0.6));

    const auto none = make_labels({0, 0, 0});
    const DetectionMetrics z = detection_metrics(none, make_labels({1, 0, 0}));
    CHECK(z.precision == 0.0);
    CHECK(z.f1 == 0.0);
    const DetectionMetrics zz = detection_metrics(none, none);
    CHECK(zz.recall == 0.0);
    CHECK(zz.f1 == 0.0);

    CHECK_THROWS(detection_metrics(none, make_labels({0, 0})));
}

TEST_CASE("kmeans: recovers well-separated blobs") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 0.2);
    const double cx[3] = {0.0, 10.0, -10.0};
    const double cy[3] = {0.0, 10.0, 10.0};
    Matrix z(90, 2);
    std::vector<std::size_t> truth(90);
    for (std::size_t i = 0; i < 90; ++i) {
        const std::size_t c = i % 3;
        truth[i] = c;
        z(i, 0) = cx[c] + g(rng);
        z(i, 1) = cy[c] + g(rng);
    }
    const auto assign = kmeans(z, 3, 42);
    const ClusteringMetrics m = clustering_metrics(assign, truth);
    CHECK(m.nmi == doctest::Approx(1.0));
    CHECK(m.acc == doctest::Approx(1.0));
}

TEST_CASE("kmeans: determinism, k=m, and argument validation") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix z(20, 3);
    for (double& v : z.data()) v = g(rng);
    CHECK(kmeans(z, 4, 11) == kmeans(z, 4, 11));

    const auto full = kmeans(z, 20, 1);
    std::vector<std::size_t> sorted(full);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < 20; ++i) CHECK(sorted[i] == i);  // all singletons

    CHECK_THROWS(kmeans(z, 1, 0));
    CHECK_THROWS(kmeans(z, 21, 0));
}

TEST_CASE("clustering_metrics: relabeling keeps NMI and ACC at 1") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<std::size_t> uc(0, 3);
    std::vector<std::size_t> truth(200);
    for (auto& v : truth) v = uc(rng);
    std::vector<std::size_t> renamed(truth);
    for (auto& v : renamed) v = (v + 2) % 4 + 10;  // bijective relabel, shifted ids
    const ClusteringMetrics m = clustering_metrics(renamed, truth);
    CHECK(m.nmi == doctest::Approx(1.0));
    CHECK(m.acc == doctest::Approx(1.0));
}

TEST_CASE("clustering_metrics: independent random labels have near-zero NMI") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> uc(0, 2);
    std::vector<std::size_t> a(2000), b(2000);
    for (std::size_t i = 0; i < 2000; ++i) {
        a[i] = uc(rng);
        b[i] = uc(rng);
    }
    CHECK(clustering_metrics(a, b).nmi < 0.05);
}

TEST_CASE("clustering_metrics: even 2x2 split gives ACC = 0.5") {
    // joint counts all equal: any matching gets half the points right
    std::vector<std::size_t> a, b;
    for (std::size_t i = 0; i < 25; ++i) {
        a.push_back(0); b.push_back(0);
        a.push_back(0); b.push_back(1);
        a.push_back(1); b.push_back(0);
        a.push_back(1); b.push_back(1);
    }
    const ClusteringMetrics m = clustering_metrics(a, b);
    CHECK(m.acc == doctest::Approx(0.5));
    CHECK(m.nmi == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("clustering_metrics: single cluster against itself") {
    const std::vector<std::size_t> ones(10, 1);
    const ClusteringMetrics m = clustering_metrics(ones, ones);
    CHECK(m.nmi == 1.0);  // zero-entropy convention
    CHECK(m.acc == 1.0);
    CHECK_THROWS(clustering_metrics({}, {}));
}

TEST_CASE("trustworthiness: isometric embedding scores exactly 1") {
    std::mt19937_64 rng(19);
    std::normal_distribution<double> g(0.0, 1.0);
    DataMatrix x;
    x.values = Matrix(60, 2);
    for (double& v : x.values.data()) v = g(rng);

    // rigid rotation: distances are preserved, so ranks are preserved
    const double th = 0.4;
    Matrix z(60, 2);
    for (std::size_t i = 0; i < 60; ++i) {
        z(i, 0) = std::cos(th) * x.values(i, 0) - std::sin(th) * x.values(i, 1);
        z(i, 1) = std::sin(th) * x.values(i, 0) + std::cos(th) * x.values(i, 1);
    }
    CHECK(trustworthiness(x, z, 10) == doctest::Approx(1.0));
    CHECK(trustworthiness(x, x.values, 5) == doctest::Approx(1.0));
}

TEST_CASE("trustworthiness: random embedding scores poorly") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g(0.0, 1.0);
    DataMatrix x;
    x.values = Matrix(500, 5);
    for (double& v : x.values.data()) v = g(rng);
    Matrix z(500, 2);
    for (double& v : z.data()) v = g(rng);
    const double t = trustworthiness(x, z, 10);
    CHECK(t < 0.6);
    CHECK(t >= 0.0);
}

TEST_CASE("trustworthiness validates its arguments") {
    DataMatrix x;
    x.values = Matrix(10, 2);
    CHECK_THROWS(trustworthiness(x, Matrix(9, 2), 2));
    CHECK_THROWS(trustworthiness(x, Matrix(10, 2), 0));
    CHECK_THROWS(trustworthiness(x, Matrix(10, 2), 5));  // 2k >= m
}
