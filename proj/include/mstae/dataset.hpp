#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mstae/matrix.hpp"

namespace mstae {

struct DataMatrix {
    Matrix values;                                 // m x d
    bool standardized = false;
    std::optional<std::vector<std::string>> feature_names;

    std::size_t n_rows() const { return values.rows(); }
    std::size_t n_cols() const { return values.cols(); }
};

enum class Label : int { normal = 0, anomaly = 1 };

struct LabelVector {
    std::vector<Label> labels;
    std::size_t anomaly_count = 0;

    static LabelVector from(std::vector<Label> ls) {
        LabelVector v;
        v.anomaly_count = static_cast<std::size_t>(
            std::count(ls.begin(), ls.end(), Label::anomaly));
        v.labels = std::move(ls);
        return v;
    }
};

enum class SyntheticKind { swiss_roll, hypercube };

struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::hypercube;
    std::size_t n_points = 0;
    std::size_t ambient_dim = 0;
    std::size_t intrinsic_dim = 0;
    double noise_std = 0.0;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, delim)) out.push_back(trim(field));
    if (!line.empty() && line.back() == delim) out.push_back("");
    return out;
}

inline Label parse_label(const std::string& raw) {
    const std::string v = lower(trim(raw));
    if (v == "0" || v == "no" || v == "n" || v == "normal") return Label::normal;
    if (v == "1" || v == "yes" || v == "o" || v == "anomaly") return Label::anomaly;
    throw std::runtime_error("unparseable label value '" + raw + "'");
}

}  // namespace detail

/// Loads a delimited text file with one header row. The delimiter (',' or ';')
/// is auto-detected from the header line. label_column selects the label by
/// header name; empty means the last column.
inline std::pair<DataMatrix, LabelVector> load_dataset(const std::string& path,
                                                       const std::string& label_column = "") {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file '" + path + "'");

    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("empty dataset file '" + path + "'");
    const char delim =
        std::count(header.begin(), header.end(), ';') > std::count(header.begin(), header.end(), ',')
            ? ';'
            : ',';
    const std::vector<std::string> names = detail::split(header, delim);
    if (names.size() < 2) throw std::runtime_error("dataset needs at least one feature and a label column");

    std::size_t label_idx = names.size() - 1;
    if (!label_column.empty()) {
        auto it = std::find(names.begin(), names.end(), label_column);
        if (it == names.end())
            throw std::runtime_error("label column '" + label_column + "' not found in header");
        label_idx = static_cast<std::size_t>(it - names.begin());
    }

    std::vector<std::vector<double>> rows;
    std::vector<Label> labels;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const std::vector<std::string> fields = detail::split(line, delim);
        if (fields.size() != names.size())
            throw std::runtime_error("ragged row at line " + std::to_string(lineno) + " in '" + path +
                                     "' (" + std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(names.size()) + ")");
        std::vector<double> row;
        row.reserve(fields.size() - 1);
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (c == label_idx) continue;
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(fields[c], &pos);
            } catch (const std::exception&) {
                throw std::runtime_error("non-numeric value '" + fields[c] + "' at line " +
                                         std::to_string(lineno));
            }
            if (pos != fields[c].size() || !std::isfinite(v))
                throw std::runtime_error("non-finite or malformed value '" + fields[c] +
                                         "' at line " + std::to_string(lineno));
            row.push_back(v);
        }
        labels.push_back(detail::parse_label(fields[label_idx]));
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw std::runtime_error("fewer than 2 usable rows in '" + path + "'");

    DataMatrix x;
    x.values = Matrix(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) x.values(i, j) = rows[i][j];
    std::vector<std::string> feat_names;
    for (std::size_t c = 0; c < names.size(); ++c)
        if (c != label_idx) feat_names.push_back(names[c]);
    x.feature_names = std::move(feat_names);
    return {std::move(x), LabelVector::from(std::move(labels))};
}

/// Writes a DataMatrix (and labels) back out in the same CSV format that
/// load_dataset reads, at full double precision.
inline void save_dataset(const std::string& path, const DataMatrix& x, const LabelVector& y) {
    if (y.labels.size() != x.n_rows()) throw std::invalid_argument("save_dataset: label length mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset file '" + path + "'");
    out.precision(17);
    for (std::size_t c = 0; c < x.n_cols(); ++c) {
        if (x.feature_names && c < x.feature_names->size())
            out << (*x.feature_names)[c];
        else
            out << "f" << c;
        out << ',';
    }
    out << "label\n";
    for (std::size_t i = 0; i < x.n_rows(); ++i) {
        for (std::size_t c = 0; c < x.n_cols(); ++c) out << x.values(i, c) << ',';
        out << (y.labels[i] == Label::anomaly ? 1 : 0) << '\n';
    }
}

/// Column-wise z-scoring with the population denominator m. Constant columns
/// become all-zero.
inline DataMatrix standardize(const DataMatrix& x) {
    if (x.standardized) throw std::invalid_argument("standardize: input already standardized");
    const std::size_t m = x.n_rows();
    const std::size_t d = x.n_cols();
    if (m < 2) throw std::invalid_argument("standardize: need at least 2 rows");
    DataMatrix out = x;
    for (std::size_t c = 0; c < d; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < m; ++i) mean += x.values(i, c);
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double v = x.values(i, c) - mean;
            var += v * v;
        }
        var /= static_cast<double>(m);
        const double sd = std::sqrt(var);
        if (sd == 0.0) {
            for (std::size_t i = 0; i < m; ++i) out.values(i, c) = 0.0;
        } else {
            for (std::size_t i = 0; i < m; ++i) out.values(i, c) = (x.values(i, c) - mean) / sd;
        }
    }
    out.standardized = true;
    return out;
}

namespace detail {

/// Seeded random orthonormal basis: ambient x intrinsic with orthonormal
/// columns, via Gram-Schmidt on Gaussian draws.
inline Matrix random_embedding(std::size_t ambient, std::size_t intrinsic, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix q(ambient, intrinsic);
    for (std::size_t c = 0; c < intrinsic; ++c) {
        std::vector<double> v(ambient);
        for (auto& e : v) e = gauss(rng);
        for (std::size_t prev = 0; prev < c; ++prev) {
            double dot = 0.0;
            for (std::size_t r = 0; r < ambient; ++r) dot += v[r] * q(r, prev);
            for (std::size_t r = 0; r < ambient; ++r) v[r] -= dot * q(r, prev);
        }
        double norm = 0.0;
        for (double e : v) norm += e * e;
        norm = std::sqrt(norm);
        if (norm < 1e-12) { --c; continue; }  // re-draw a degenerate direction
        for (std::size_t r = 0; r < ambient; ++r) q(r, c) = v[r] / norm;
    }
    return q;
}

}  // namespace detail

/// Deterministic synthetic generators. Swiss roll uses (t cos t, h, t sin t)
/// with t uniform on [1.5*pi, 4.5*pi] and h uniform on [0, 21]; hypercube
/// samples [0,1]^intrinsic and embeds via a seeded random orthonormal map.
inline std::pair<DataMatrix, LabelVector> make_synthetic(const SyntheticSpec& spec) {
    if (spec.n_points < 2) throw std::invalid_argument("make_synthetic: n_points must be >= 2");
    if (spec.noise_std < 0.0) throw std::invalid_argument("make_synthetic: negative noise_std");
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    DataMatrix x;

    if (spec.kind == SyntheticKind::swiss_roll) {
        constexpr double pi = 3.14159265358979323846;
        x.values = Matrix(spec.n_points, 3);
        std::uniform_real_distribution<double> ut(1.5 * pi, 4.5 * pi);
        std::uniform_real_distribution<double> uh(0.0, 21.0);
        for (std::size_t i = 0; i < spec.n_points; ++i) {
            const double t = ut(rng);
            const double h = uh(rng);
            x.values(i, 0) = t * std::cos(t);
            x.values(i, 1) = h;
            x.values(i, 2) = t * std::sin(t);
        }
        if (spec.noise_std > 0.0)
            for (double& v : x.values.data()) v += spec.noise_std * gauss(rng);
    } else {
        if (spec.intrinsic_dim < 1 || spec.intrinsic_dim > spec.ambient_dim)
            throw std::invalid_argument("make_synthetic: need 1 <= intrinsic_dim <= ambient_dim");
        Matrix latent(spec.n_points, spec.intrinsic_dim);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        for (double& v : latent.data()) v = u01(rng);
        if (spec.intrinsic_dim == spec.ambient_dim) {
            x.values = std::move(latent);
        } else {
            const Matrix q = detail::random_embedding(spec.ambient_dim, spec.intrinsic_dim, rng);
            x.values = Matrix(spec.n_points, spec.ambient_dim);
            for (std::size_t i = 0; i < spec.n_points; ++i)
                for (std::size_t r = 0; r < spec.ambient_dim; ++r) {
                    double s = 0.0;
                    for (std::size_t c = 0; c < spec.intrinsic_dim; ++c)
                        s += latent(i, c) * q(r, c);
                    x.values(i, r) = s;
                }
        }
        if (spec.noise_std > 0.0)
            for (double& v : x.values.data()) v += spec.noise_std * gauss(rng);
    }

    LabelVector y;
    y.labels.assign(spec.n_points, Label::normal);
    y.anomaly_count = 0;
    return {std::move(x), std::move(y)};
}

}  // namespace mstae
