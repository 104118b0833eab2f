#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mstae/dataset.hpp"
#include "mstae/eval.hpp"
#include "mstae/graph.hpp"
#include "mstae/intrinsic_dim.hpp"
#include "mstae/nn.hpp"
#include "mstae/regularizer.hpp"
#include "mstae/scoring.hpp"
#include "mstae/trainer.hpp"

namespace mstae {

inline constexpr const char* kLibraryVersion = "0.1.0";

struct RunConfig {
    // data source: either a file or a synthetic spec
    std::string data_path;
    std::string label_column;
    std::optional<SyntheticSpec> synthetic;

    RegularizerMode reg_mode = RegularizerMode::mst_le;
    double lambda = 1.0;           // gae only
    double zero_clamp = 1e-6;      // duplicate-distance clamp for 1/M
    std::size_t gae_k = 5;

    TrainConfig train;
    std::vector<std::uint64_t> seeds{0};

    ScoreMethod score_method = ScoreMethod::recon;
    std::size_t score_k = 15;          // lomst / cof neighborhood
    bool score_on_corrupted = false;
    std::optional<std::size_t> flag_n;  // default: ground-truth anomaly count

    std::optional<std::size_t> latent_dim;  // overrides the two-NN estimate
    std::size_t n_hidden = 4;
    std::size_t max_rows = 20000;  // dense m x m memory guard
};

struct SeedResult {
    std::uint64_t seed = 0;
    ScoreVector scores;
    LabelVector predicted;
    DetectionMetrics metrics;
    double initial_total_loss = 0.0;
    double final_total_loss = 0.0;
    double final_recon_loss = 0.0;
    double final_embedding_loss = 0.0;
    Matrix latent;
};

struct RunReport {
    RunConfig config;
    std::size_t m = 0;
    std::size_t d = 0;
    std::size_t latent_dim = 0;
    double twonn_slope = 0.0;
    std::size_t flag_n = 0;
    std::vector<SeedResult> per_seed;
    double median_f1 = 0.0;
    double wall_seconds = 0.0;
};

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::pair<DataMatrix, LabelVector> load_run_input(const RunConfig& cfg) {
    if (cfg.synthetic) return make_synthetic(*cfg.synthetic);
    if (cfg.data_path.empty()) throw std::runtime_error("run: no data source configured");
    return load_dataset(cfg.data_path, cfg.label_column);
}

/// Builds the regularizer target from the standardized data, once.
inline RegularizerConfig build_regularizer(const DataMatrix& xs, const RunConfig& cfg) {
    RegularizerConfig reg;
    reg.mode = cfg.reg_mode;
    reg.lambda = cfg.lambda;
    switch (cfg.reg_mode) {
        case RegularizerMode::mst_mds:
            reg.distances = tree_distances(euclidean_mst(xs));
            break;
        case RegularizerMode::mst_le:
            reg.similarity = mst_similarity(tree_distances(euclidean_mst(xs)), cfg.zero_clamp);
            break;
        case RegularizerMode::euclidean_mds:
            reg.distances = euclidean_distances(xs);
            break;
        case RegularizerMode::euclidean_le:
            reg.similarity = euclidean_similarity(xs, cfg.zero_clamp);
            break;
        case RegularizerMode::gae: {
            if (cfg.lambda <= 0.0) throw std::runtime_error("run: gae mode requires lambda > 0");
            reg.similarity = knn_heat_similarity(xs, cfg.gae_k, heat_bandwidth(xs, cfg.gae_k));
            break;
        }
        case RegularizerMode::none:
            break;
    }
    return reg;
}

/// Full detection pipeline: load, standardize, size the network, build the
/// graph target, train per seed, score, flag top-N, compute metrics.
inline RunReport run_detect(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.seeds.empty()) throw std::runtime_error("run: seeds must be non-empty");

    auto [x_raw, truth] = load_run_input(cfg);
    const std::size_t m = x_raw.n_rows();
    const std::size_t d = x_raw.n_cols();
    if (m > cfg.max_rows)
        throw std::runtime_error("run: dataset has " + std::to_string(m) +
                                 " rows, above the dense-matrix cap of " +
                                 std::to_string(cfg.max_rows) + " (raise --max-m to override)");

    const DataMatrix xs = standardize(x_raw);

    RunReport report;
    report.config = cfg;
    report.m = m;
    report.d = d;

    std::size_t p;
    if (cfg.latent_dim) {
        p = *cfg.latent_dim;
    } else {
        const TwoNnStats stats = estimate_dimension(xs);
        report.twonn_slope = stats.slope;
        p = stats.p_hat;
    }
    p = std::min(p, d);
    report.latent_dim = p;

    const std::size_t n_flag =
        cfg.flag_n ? *cfg.flag_n : std::max<std::size_t>(1, truth.anomaly_count);
    if (n_flag > m) throw std::runtime_error("run: flag N exceeds dataset size");
    report.flag_n = n_flag;

    const RegularizerConfig reg = build_regularizer(xs, cfg);
    const std::vector<LayerSpec> specs = layer_plan(d, p, cfg.n_hidden);
    const std::size_t bottleneck = layer_plan_bottleneck(cfg.n_hidden);

    std::vector<double> f1s;
    for (const std::uint64_t seed : cfg.seeds) {
        TrainConfig tc = cfg.train;
        tc.seed = seed;
        NetworkParams params = init_params(specs, seed, bottleneck);
        TrainRecord rec = train(xs, std::move(params), tc, reg);

        SeedResult r;
        r.seed = seed;
        r.initial_total_loss = rec.total_loss.front();
        r.final_total_loss = rec.total_loss.back();
        r.final_recon_loss = rec.recon_loss.back();
        r.final_embedding_loss = rec.embedding_loss.back();
        r.latent = rec.latent;

        Matrix score_input = xs.values;
        if (cfg.score_on_corrupted && cfg.train.denoise.kind != DenoiseKind::none) {
            if (cfg.train.denoise.kind == DenoiseKind::neighbor_average) {
                const auto knn = knn_index(xs, cfg.train.denoise.k);
                score_input = corrupt(xs, cfg.train.denoise, &knn, seed ^ 0x9e3779b97f4a7c15ull);
            } else {
                score_input = corrupt(xs, cfg.train.denoise, nullptr, seed ^ 0x9e3779b97f4a7c15ull);
            }
        }

        switch (cfg.score_method) {
            case ScoreMethod::recon: {
                const ForwardTrace t =
                    forward(rec.params, score_input, 0.0, ForwardMode::eval, 0);
                DataMatrix ref = xs;
                ref.values = score_input;
                r.scores = recon_scores(ref, t.output);
                break;
            }
            case ScoreMethod::lomst:
                r.scores = lomst_scores(rec.latent, std::min(cfg.score_k, m - 1));
                break;
            case ScoreMethod::cof:
                r.scores = cof_scores(rec.latent, std::min(cfg.score_k, m - 1));
                break;
        }
        r.predicted = flag_top_n(r.scores, {n_flag});
        r.metrics = detection_metrics(r.predicted, truth);
        f1s.push_back(r.metrics.f1);
        report.per_seed.push_back(std::move(r));
    }
    report.median_f1 = median(f1s);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

inline const char* reg_mode_name(RegularizerMode m) {
    switch (m) {
        case RegularizerMode::mst_mds: return "mst-mds";
        case RegularizerMode::mst_le: return "mst-le";
        case RegularizerMode::gae: return "gae";
        case RegularizerMode::euclidean_mds: return "euc-mds";
        case RegularizerMode::euclidean_le: return "euc-le";
        case RegularizerMode::none: return "none";
    }
    return "?";
}

inline const char* score_method_name(ScoreMethod m) {
    switch (m) {
        case ScoreMethod::recon: return "recon";
        case ScoreMethod::lomst: return "lomst";
        case ScoreMethod::cof: return "cof";
    }
    return "?";
}

inline const char* denoise_name(DenoiseKind k) {
    switch (k) {
        case DenoiseKind::none: return "none";
        case DenoiseKind::gaussian: return "gaussian";
        case DenoiseKind::neighbor_average: return "neighbor";
    }
    return "?";
}

/// Line-delimited report: one tab-separated record per line, key first.
/// The score section (`score` records) is stable and byte-reproducible for a
/// fixed config and binary.
inline void write_report(std::ostream& out, const RunReport& r) {
    out.precision(17);
    out << "version\t" << kLibraryVersion << '\n';
    out << "data\t" << (r.config.synthetic ? "<synthetic>" : r.config.data_path) << '\n';
    out << "reg\t" << reg_mode_name(r.config.reg_mode) << '\n';
    out << "score_method\t" << score_method_name(r.config.score_method) << '\n';
    out << "denoise\t" << denoise_name(r.config.train.denoise.kind) << '\n';
    out << "epochs\t" << r.config.train.epochs << '\n';
    out << "learning_rate\t" << r.config.train.learning_rate << '\n';
    out << "dropout\t" << r.config.train.dropout_rate << '\n';
    out << "m\t" << r.m << '\n';
    out << "d\t" << r.d << '\n';
    out << "latent_dim\t" << r.latent_dim << '\n';
    out << "twonn_slope\t" << r.twonn_slope << '\n';
    out << "flag_n\t" << r.flag_n << '\n';
    for (const SeedResult& s : r.per_seed) {
        out << "seed\t" << s.seed << '\n';
        out << "loss_initial\t" << s.initial_total_loss << '\n';
        out << "loss_final\t" << s.final_total_loss << '\n';
        out << "loss_recon_final\t" << s.final_recon_loss << '\n';
        out << "loss_embed_final\t" << s.final_embedding_loss << '\n';
        out << "precision\t" << s.metrics.precision << '\n';
        out << "recall\t" << s.metrics.recall << '\n';
        out << "f1\t" << s.metrics.f1 << '\n';
        for (std::size_t i = 0; i < s.scores.scores.size(); ++i)
            out << "score\t" << s.seed << '\t' << i << '\t' << s.scores.scores[i] << '\t'
                << (s.predicted.labels[i] == Label::anomaly ? 1 : 0) << '\n';
    }
    out << "median_f1\t" << r.median_f1 << '\n';
    out << "wall_seconds\t" << r.wall_seconds << '\n';
}

/// The score section alone, for determinism comparisons.
inline std::string score_section(const RunReport& r) {
    std::ostringstream out;
    out.precision(17);
    for (const SeedResult& s : r.per_seed)
        for (std::size_t i = 0; i < s.scores.scores.size(); ++i)
            out << "score\t" << s.seed << '\t' << i << '\t' << s.scores.scores[i] << '\t'
                << (s.predicted.labels[i] == Label::anomaly ? 1 : 0) << '\n';
    return out.str();
}

}  // namespace mstae
