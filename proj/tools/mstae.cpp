// mstae: MST-regularized autoencoder toolkit for unsupervised anomaly
// detection and clustering.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mstae/checkpoint.hpp"
#include "mstae/pipeline.hpp"

namespace {

using namespace mstae;

RegularizerMode parse_reg(const std::string& s) {
    if (s == "mst-mds") return RegularizerMode::mst_mds;
    if (s == "mst-le") return RegularizerMode::mst_le;
    if (s == "gae") return RegularizerMode::gae;
    if (s == "euc-mds") return RegularizerMode::euclidean_mds;
    if (s == "euc-le") return RegularizerMode::euclidean_le;
    if (s == "none") return RegularizerMode::none;
    throw CLI::ValidationError("--reg", "unknown regularizer '" + s + "'");
}

ScoreMethod parse_score(const std::string& s) {
    if (s == "recon") return ScoreMethod::recon;
    if (s == "lomst") return ScoreMethod::lomst;
    if (s == "cof") return ScoreMethod::cof;
    throw CLI::ValidationError("--score", "unknown score method '" + s + "'");
}

DenoiseKind parse_denoise(const std::string& s) {
    if (s == "none") return DenoiseKind::none;
    if (s == "gaussian") return DenoiseKind::gaussian;
    if (s == "neighbor") return DenoiseKind::neighbor_average;
    throw CLI::ValidationError("--denoise", "unknown denoise kind '" + s + "'");
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoull(tok));
    }
    if (out.empty()) throw CLI::ValidationError("--seeds", "no seeds given");
    return out;
}

struct CommonFlags {
    std::string data;
    std::string label_col;
    std::string reg = "mst-le";
    double lambda = 1.0;
    std::size_t epochs = 500;
    double lr = 0.01;
    double dropout = 0.5;
    std::string denoise = "none";
    double noise_std = 0.3;
    std::size_t denoise_k = 5;
    std::size_t knn_k = 15;
    std::string score = "recon";
    std::size_t flag_n = 0;  // 0 = ground-truth anomaly count
    std::string seeds = "1,2,3,4,5";
    std::size_t latent_dim = 0;  // 0 = two-NN estimate
    std::size_t n_hidden = 4;
    std::size_t max_m = 20000;
    bool score_on_corrupted = false;
    std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_data) {
    auto* d = cmd->add_option("--data", f.data, "dataset file (delimited text with header)");
    if (needs_data) d->required();
    cmd->add_option("--label-col", f.label_col, "label column name (default: last column)");
    cmd->add_option("--reg", f.reg, "regularizer: mst-mds|mst-le|gae|euc-mds|euc-le|none");
    cmd->add_option("--lambda", f.lambda, "gae regularization weight");
    cmd->add_option("--epochs", f.epochs, "training epochs");
    cmd->add_option("--lr", f.lr, "learning rate");
    cmd->add_option("--dropout", f.dropout, "dropout rate in [0,1)");
    cmd->add_option("--denoise", f.denoise, "input corruption: none|gaussian|neighbor");
    cmd->add_option("--noise-std", f.noise_std, "gaussian corruption std");
    cmd->add_option("--denoise-k", f.denoise_k, "neighbor-average corruption k");
    cmd->add_option("--knn-k", f.knn_k, "neighborhood size for lomst/cof scoring");
    cmd->add_option("--score", f.score, "score method: recon|lomst|cof");
    cmd->add_option("--flag-n", f.flag_n, "flag top N (default: ground-truth anomaly count)");
    cmd->add_option("--seeds", f.seeds, "comma-separated run seeds");
    cmd->add_option("--latent-dim", f.latent_dim, "bottleneck width (default: two-NN estimate)");
    cmd->add_option("--n-hidden", f.n_hidden, "total hidden layers, even");
    cmd->add_option("--max-m", f.max_m, "refuse datasets with more rows than this");
    cmd->add_flag("--score-on-corrupted", f.score_on_corrupted,
                  "score the corrupted input instead of the original");
    cmd->add_option("--out", f.out, "report output path (default: stdout)");
}

RunConfig to_run_config(const CommonFlags& f) {
    RunConfig cfg;
    cfg.data_path = f.data;
    cfg.label_column = f.label_col;
    cfg.reg_mode = parse_reg(f.reg);
    cfg.lambda = f.lambda;
    cfg.train.epochs = f.epochs;
    cfg.train.learning_rate = f.lr;
    cfg.train.dropout_rate = f.dropout;
    cfg.train.denoise.kind = parse_denoise(f.denoise);
    cfg.train.denoise.noise_std = f.noise_std;
    cfg.train.denoise.k = f.denoise_k;
    cfg.seeds = parse_seeds(f.seeds);
    cfg.score_method = parse_score(f.score);
    cfg.score_k = f.knn_k;
    cfg.score_on_corrupted = f.score_on_corrupted;
    if (f.flag_n > 0) cfg.flag_n = f.flag_n;
    if (f.latent_dim > 0) cfg.latent_dim = f.latent_dim;
    cfg.n_hidden = f.n_hidden;
    cfg.max_rows = f.max_m;
    return cfg;
}

void emit_report(const RunReport& report, const std::string& out_path) {
    if (out_path.empty()) {
        write_report(std::cout, report);
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write report to '" + out_path + "'");
        write_report(out, report);
    }
}

int cmd_detect(const CommonFlags& f) {
    const RunReport report = run_detect(to_run_config(f));
    emit_report(report, f.out);
    std::cerr << "median f1 " << report.median_f1 << " over " << report.per_seed.size()
              << " seed(s)\n";
    return 0;
}

int cmd_sweep(const CommonFlags& f, const std::string& axis) {
    std::vector<double> values;
    if (axis == "layers") {
        for (std::size_t n = 2; n <= 12; n += 2) values.push_back(static_cast<double>(n));
    } else if (axis == "dropout") {
        for (double r = 0.1; r < 0.95; r += 0.1) values.push_back(r);
    } else if (axis == "noise") {
        for (double s = 0.1; s < 0.85; s += 0.1) values.push_back(s);
    } else {
        throw CLI::ValidationError("--axis", "unknown sweep axis '" + axis + "'");
    }

    std::ostringstream table;
    table.precision(6);
    table << "axis\tvalue\tmedian_f1\tloss_recon_final\tloss_total_final\n";
    for (const double v : values) {
        CommonFlags fv = f;
        if (axis == "layers") fv.n_hidden = static_cast<std::size_t>(v);
        else if (axis == "dropout") fv.dropout = v;
        else {
            fv.denoise = "gaussian";
            fv.noise_std = v;
        }
        const RunReport r = run_detect(to_run_config(fv));
        std::vector<double> recon, total;
        for (const auto& s : r.per_seed) {
            recon.push_back(s.final_recon_loss);
            total.push_back(s.final_total_loss);
        }
        table << axis << '\t' << v << '\t' << r.median_f1 << '\t' << median(recon) << '\t'
              << median(total) << '\n';
    }
    if (f.out.empty()) {
        std::cout << table.str();
    } else {
        std::ofstream out(f.out);
        if (!out) throw std::runtime_error("cannot write sweep report to '" + f.out + "'");
        out << table.str();
    }
    return 0;
}

int cmd_estimate_dim(const std::string& data, const std::string& label_col) {
    auto [x, y] = load_dataset(data, label_col);
    const TwoNnStats stats = estimate_dimension(standardize(x));
    std::cout << "slope\t" << stats.slope << "\np_hat\t" << stats.p_hat << '\n';
    return 0;
}

int cmd_swissroll(std::size_t n_points, const std::string& seeds_str, std::size_t epochs,
                  double lr, const std::string& out_dir) {
    const std::vector<std::uint64_t> seeds = parse_seeds(seeds_str);
    const std::vector<RegularizerMode> modes = {RegularizerMode::mst_le,
                                               RegularizerMode::euclidean_le,
                                               RegularizerMode::none};
    std::cout << "mode\tseed\ttrustworthiness\n";
    for (const std::uint64_t seed : seeds) {
        SyntheticSpec spec;
        spec.kind = SyntheticKind::swiss_roll;
        spec.n_points = n_points;
        spec.seed = seed;
        auto [x, y] = make_synthetic(spec);
        const DataMatrix xs = standardize(x);
        for (const RegularizerMode mode : modes) {
            RunConfig cfg;
            cfg.reg_mode = mode;
            cfg.train.epochs = epochs;
            cfg.train.learning_rate = lr;
            cfg.train.dropout_rate = 0.0;
            const RegularizerConfig reg = build_regularizer(xs, cfg);
            const auto specs = layer_plan(3, 2, cfg.n_hidden);
            TrainConfig tc = cfg.train;
            tc.seed = seed;
            NetworkParams params = init_params(specs, seed, layer_plan_bottleneck(cfg.n_hidden));
            const TrainRecord rec = train(xs, std::move(params), tc, reg);
            const double tw = trustworthiness(xs, rec.latent, 10);
            std::cout << reg_mode_name(mode) << '\t' << seed << '\t' << tw << '\n';
            if (!out_dir.empty()) {
                const std::string path = out_dir + "/swissroll_" + reg_mode_name(mode) + "_seed" +
                                         std::to_string(seed) + ".tsv";
                std::ofstream f(path);
                if (!f) throw std::runtime_error("cannot write coordinates to '" + path + "'");
                f.precision(17);
                for (std::size_t i = 0; i < rec.latent.rows(); ++i)
                    f << rec.latent(i, 0) << '\t' << rec.latent(i, 1) << '\n';
            }
        }
    }
    return 0;
}

int cmd_cluster(const CommonFlags& f, std::size_t n_clusters) {
    // Cluster labels are read as arbitrary integer classes from the label
    // column, so this bypasses the binary-label dataset loader for labels.
    RunConfig cfg = to_run_config(f);
    cfg.flag_n = 1;  // unused by clustering, keeps run_detect's default harmless

    auto [x_raw, truth_bin] = [&]() -> std::pair<DataMatrix, std::vector<std::size_t>> {
        std::ifstream in(f.data);
        if (!in) throw std::runtime_error("cannot open dataset file '" + f.data + "'");
        std::string header;
        std::getline(in, header);
        const char delim = header.find(';') != std::string::npos ? ';' : ',';
        std::vector<std::string> names;
        {
            std::stringstream ss(header);
            std::string tok;
            while (std::getline(ss, tok, delim)) names.push_back(tok);
        }
        std::size_t label_idx = names.size() - 1;
        if (!f.label_col.empty()) {
            for (std::size_t i = 0; i < names.size(); ++i)
                if (names[i] == f.label_col) label_idx = i;
        }
        std::vector<std::vector<double>> rows;
        std::vector<std::size_t> classes;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            std::string tok;
            std::vector<std::string> fields;
            while (std::getline(ss, tok, delim)) fields.push_back(tok);
            if (fields.size() != names.size()) throw std::runtime_error("ragged row in cluster data");
            std::vector<double> row;
            for (std::size_t c = 0; c < fields.size(); ++c) {
                if (c == label_idx) classes.push_back(static_cast<std::size_t>(std::stoll(fields[c])));
                else row.push_back(std::stod(fields[c]));
            }
            rows.push_back(std::move(row));
        }
        DataMatrix x;
        x.values = Matrix(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < rows[i].size(); ++j) x.values(i, j) = rows[i][j];
        return {std::move(x), std::move(classes)};
    }();

    const DataMatrix xs = standardize(x_raw);
    std::size_t p = f.latent_dim > 0 ? f.latent_dim : estimate_dimension(xs).p_hat;
    p = std::min(p, xs.n_cols());
    const RegularizerConfig reg = build_regularizer(xs, cfg);
    const auto specs = layer_plan(xs.n_cols(), p, cfg.n_hidden);

    std::cout << "seed\tnmi\tacc\n";
    for (const std::uint64_t seed : cfg.seeds) {
        TrainConfig tc = cfg.train;
        tc.seed = seed;
        NetworkParams params = init_params(specs, seed, layer_plan_bottleneck(cfg.n_hidden));
        const TrainRecord rec = train(xs, std::move(params), tc, reg);
        const auto assign = kmeans(rec.latent, n_clusters, seed);
        const ClusteringMetrics cm = clustering_metrics(assign, truth_bin);
        std::cout << seed << '\t' << cm.nmi << '\t' << cm.acc << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MST-regularized autoencoder for unsupervised anomaly detection"};
    app.require_subcommand(1);

    CommonFlags detect_flags;
    auto* detect = app.add_subcommand("detect", "run the detection pipeline on a dataset");
    add_common(detect, detect_flags, true);

    CommonFlags sweep_flags;
    std::string sweep_axis = "dropout";
    auto* sweep = app.add_subcommand("sweep", "repeat detection over a hyperparameter axis");
    add_common(sweep, sweep_flags, true);
    sweep->add_option("--axis", sweep_axis, "sweep axis: layers|dropout|noise");

    std::string ed_data, ed_label;
    auto* estdim = app.add_subcommand("estimate-dim", "two-NN intrinsic dimension estimate");
    estdim->add_option("--data", ed_data, "dataset file")->required();
    estdim->add_option("--label-col", ed_label, "label column name");

    std::size_t sw_n = 1500, sw_epochs = 900;
    double sw_lr = 2e-5;
    std::string sw_seeds = "1,2,3,4,5", sw_out;
    auto* swiss = app.add_subcommand("swissroll", "swiss-roll structure-preservation demo");
    swiss->add_option("--n", sw_n, "number of points");
    swiss->add_option("--seeds", sw_seeds, "comma-separated seeds");
    swiss->add_option("--epochs", sw_epochs, "training epochs");
    swiss->add_option("--lr", sw_lr, "learning rate");
    swiss->add_option("--out", sw_out, "directory for latent coordinate files");

    CommonFlags cluster_flags;
    std::size_t n_clusters = 2;
    auto* cluster = app.add_subcommand("cluster", "k-means on the latent space, NMI/ACC vs labels");
    add_common(cluster, cluster_flags, true);
    cluster->add_option("--clusters", n_clusters, "number of clusters")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (detect->parsed()) return cmd_detect(detect_flags);
        if (sweep->parsed()) return cmd_sweep(sweep_flags, sweep_axis);
        if (estdim->parsed()) return cmd_estimate_dim(ed_data, ed_label);
        if (swiss->parsed()) return cmd_swissroll(sw_n, sw_seeds, sw_epochs, sw_lr, sw_out);
        if (cluster->parsed()) return cmd_cluster(cluster_flags, n_clusters);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
