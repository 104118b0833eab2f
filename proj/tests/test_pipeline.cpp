#include <doctest.h>

#include <cstdio>
#include <random>
#include <sstream>

#include "mstae/pipeline.hpp"

using namespace mstae;

namespace {

struct TempCsv {
    std::string path;
    explicit TempCsv(std::string p) : path(std::move(p)) {}
    ~TempCsv() { std::remove(path.c_str()); }
};

/// 60 blob points plus 3 gross outliers, written through save_dataset.
TempCsv planted_outliers(const std::string& name) {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g(0.0, 1.0);
    DataMatrix x;
    x.values = Matrix(63, 3);
    std::vector<Label> labels(63, Label::normal);
    for (std::size_t i = 0; i < 60; ++i)
        for (std::size_t c = 0; c < 3; ++c) x.values(i, c) = g(rng);
    for (std::size_t i = 60; i < 63; ++i) {
        for (std::size_t c = 0; c < 3; ++c) x.values(i, c) = 12.0 + g(rng);
        labels[i] = Label::anomaly;
    }
    TempCsv f(name);
    save_dataset(f.path, x, LabelVector::from(std::move(labels)));
    return f;
}

RunConfig base_config(const std::string& path) {
    RunConfig cfg;
    cfg.data_path = path;
    cfg.reg_mode = RegularizerMode::mst_le;
    cfg.latent_dim = 2;
    cfg.train.epochs = 150;
    cfg.train.learning_rate = 1e-3;
    cfg.train.dropout_rate = 0.0;
    cfg.seeds = {1, 2, 3};
    cfg.score_method = ScoreMethod::recon;
    return cfg;
}

}  // namespace

TEST_CASE("run_detect finds planted gross outliers") {
    const TempCsv f = planted_outliers("pipeline_planted.csv");
    const RunConfig cfg = base_config(f.path);
    const RunReport rep = run_detect(cfg);
    CHECK(rep.m == 63);
    CHECK(rep.d == 3);
    CHECK(rep.latent_dim == 2);
    CHECK(rep.flag_n == 3);  // defaults to the ground-truth anomaly count
    REQUIRE(rep.per_seed.size() == 3);
    for (const SeedResult& s : rep.per_seed) {
        CHECK(s.scores.scores.size() == 63);
        CHECK(s.predicted.anomaly_count == 3);
        CHECK(s.final_total_loss < s.initial_total_loss);
    }
    CHECK(rep.median_f1 >= 2.0 / 3.0);
}

TEST_CASE("run_detect score section is byte-identical across repeated runs") {
    const TempCsv f = planted_outliers("pipeline_repeat.csv");
    RunConfig cfg = base_config(f.path);
    cfg.train.epochs = 40;
    cfg.train.dropout_rate = 0.5;
    const std::string a = score_section(run_detect(cfg));
    const std::string b = score_section(run_detect(cfg));
    CHECK(!a.empty());
    CHECK(a == b);
}

TEST_CASE("run_detect honors the dense-matrix row cap") {
    const TempCsv f = planted_outliers("pipeline_cap.csv");
    RunConfig cfg = base_config(f.path);
    cfg.max_rows = 10;
    CHECK_THROWS_AS(run_detect(cfg), std::runtime_error);
}

TEST_CASE("run_detect estimates the latent dimension when not overridden") {
    RunConfig cfg;
    cfg.synthetic = SyntheticSpec{SyntheticKind::hypercube, 400, 6, 2, 0.0, 3};
    cfg.reg_mode = RegularizerMode::none;
    cfg.train.epochs = 5;
    cfg.train.learning_rate = 1e-5;
    cfg.train.dropout_rate = 0.0;
    cfg.seeds = {1};
    cfg.flag_n = 5;  // synthetic data has no labeled anomalies
    const RunReport rep = run_detect(cfg);
    CHECK(rep.latent_dim >= 1);
    CHECK(rep.latent_dim <= 3);  // two-NN on a clean 2-plane
    CHECK(rep.twonn_slope > 0.0);
}

TEST_CASE("write_report emits the full score table") {
    const TempCsv f = planted_outliers("pipeline_report.csv");
    RunConfig cfg = base_config(f.path);
    cfg.train.epochs = 10;
    cfg.seeds = {4, 5};
    const RunReport rep = run_detect(cfg);
    std::ostringstream out;
    write_report(out, rep);
    const std::string text = out.str();
    CHECK(text.find("median_f1\t") != std::string::npos);
    CHECK(text.find("reg\tmst-le") != std::string::npos);
    std::size_t n_score_lines = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("score\t", 0) == 0) ++n_score_lines;
    CHECK(n_score_lines == 2 * 63);
}

TEST_CASE("run_detect rejects empty configuration") {
    RunConfig cfg;
    CHECK_THROWS_AS(run_detect(cfg), std::runtime_error);
    RunConfig no_seeds;
    no_seeds.synthetic = SyntheticSpec{SyntheticKind::hypercube, 50, 3, 2, 0.0, 1};
    no_seeds.seeds.clear();
    CHECK_THROWS_AS(run_detect(no_seeds), std::runtime_error);
}
