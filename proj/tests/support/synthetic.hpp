#pragma once

// Seeded synthetic datasets shared by the unit and acceptance suites.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "elmkit/dataset.hpp"
#include "elmkit/random_layer.hpp"
#include "elmkit/schema.hpp"

namespace synth {

struct CtrConfig {
    std::size_t n = 100000;
    std::size_t n_fields = 20;
    std::size_t vocab = 50;  // distinct values per field
    double positive_rate = 0.17;
    std::uint64_t seed = 7;
    // per-field weight scales: the first few fields carry most of the signal
    double strong_scale = 1.0;
    double weak_scale = 0.25;
    std::size_t strong_fields = 8;
};

/// Categorical CTR data with a planted logistic ground truth: each
/// (field, value) pair owns a weight, the intercept is calibrated so the
/// empirical positive rate matches, and labels are Bernoulli draws.
struct CtrData {
    elmkit::FeatureSchema schema;
    std::vector<elmkit::RawRecord> records;
    std::vector<double> true_logits;  // planted logit per record (before intercept)
    double intercept = 0.0;
};

inline CtrData make_ctr(const CtrConfig& cfg) {
    CtrData out;
    out.schema.delimiter = '\t';
    out.schema.has_header = false;
    out.schema.label_column = 0;
    for (std::size_t f = 0; f < cfg.n_fields; ++f)
        out.schema.fields.push_back({"f" + std::to_string(f), elmkit::FieldKind::categorical});

    elmkit::UniformSampler sampler(cfg.seed);
    auto gauss = [&sampler]() {
        // Box-Muller on the deterministic sampler
        double u1 = sampler.unit();
        while (u1 <= 0.0) u1 = sampler.unit();
        const double u2 = sampler.unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    };

    std::vector<std::vector<double>> weights(cfg.n_fields, std::vector<double>(cfg.vocab));
    for (std::size_t f = 0; f < cfg.n_fields; ++f) {
        const double scale = f < cfg.strong_fields ? cfg.strong_scale : cfg.weak_scale;
        for (std::size_t v = 0; v < cfg.vocab; ++v) weights[f][v] = scale * gauss();
    }

    std::vector<std::vector<std::size_t>> value_ids(cfg.n);
    out.true_logits.resize(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        value_ids[i].resize(cfg.n_fields);
        double logit = 0.0;
        for (std::size_t f = 0; f < cfg.n_fields; ++f) {
            const std::size_t v = std::size_t(sampler.unit() * double(cfg.vocab));
            value_ids[i][f] = v;
            logit += weights[f][v];
        }
        out.true_logits[i] = logit;
    }

    // intercept via bisection so the mean probability hits the target rate
    double lo = -30.0, hi = 30.0;
    for (int iter = 0; iter < 80; ++iter) {
        const double b = 0.5 * (lo + hi);
        double mean = 0.0;
        for (double z : out.true_logits) mean += 1.0 / (1.0 + std::exp(-(z + b)));
        mean /= double(cfg.n);
        (mean < cfg.positive_rate ? lo : hi) = b;
    }
    out.intercept = 0.5 * (lo + hi);

    out.records.resize(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const double p = 1.0 / (1.0 + std::exp(-(out.true_logits[i] + out.intercept)));
        elmkit::RawRecord& rec = out.records[i];
        rec.label = sampler.unit() < p ? 1 : 0;
        rec.values.reserve(cfg.n_fields);
        for (std::size_t f = 0; f < cfg.n_fields; ++f)
            rec.values.emplace_back("v" + std::to_string(value_ids[i][f]));
    }
    return out;
}

/// Serializes records to a delimited file matching the schema layout
/// (label column in place).
inline void write_delimited(const std::string& path, const elmkit::FeatureSchema& schema,
                            const std::vector<elmkit::RawRecord>& records) {
    std::ofstream out(path);
    for (const auto& rec : records) {
        std::size_t field = 0;
        for (std::size_t col = 0; col < schema.column_count(); ++col) {
            if (col) out << schema.delimiter;
            if (col == schema.label_column)
                out << rec.label;
            else {
                if (rec.values[field].has_value()) out << *rec.values[field];
                ++field;
            }
        }
        out << '\n';
    }
}

/// Writes the schema in the CLI's key-value format.
inline void write_schema_file(const std::string& path, const elmkit::FeatureSchema& schema) {
    std::ofstream out(path);
    out << "delimiter=" << (schema.delimiter == '\t' ? "tab" : std::string(1, schema.delimiter))
        << "\n";
    out << "header=" << (schema.has_header ? "true" : "false") << "\n";
    out << "label=" << schema.label_column << "\n";
    for (const auto& f : schema.fields)
        out << "field=" << f.name << ':'
            << (f.kind == elmkit::FieldKind::categorical ? "categorical" : "integer") << "\n";
}

/// Smooth 1-D regression target on [-8, 8], sampled uniformly at random so
/// inputs stay distinct.
inline elmkit::DenseDataset smooth_curve(std::size_t n, std::uint64_t seed) {
    elmkit::UniformSampler sampler(seed);
    elmkit::DenseDataset ds;
    ds.x.resize(Eigen::Index(n), 1);
    ds.y.resize(Eigen::Index(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double x = -8.0 + 16.0 * sampler.unit();
        ds.x(Eigen::Index(i), 0) = x;
        ds.y[Eigen::Index(i)] = std::sin(0.8 * x) + 0.3 * std::cos(1.6 * x);
    }
    return ds;
}

/// Random dense regression batch: inputs uniform in [-3,3]^dims, targets
/// uniform in [0,1].
inline elmkit::DenseDataset random_dense(std::size_t n, std::size_t dims, std::uint64_t seed) {
    elmkit::UniformSampler sampler(seed);
    elmkit::DenseDataset ds;
    ds.x.resize(Eigen::Index(n), Eigen::Index(dims));
    ds.y.resize(Eigen::Index(n));
    for (Eigen::Index i = 0; i < ds.x.rows(); ++i) {
        for (Eigen::Index j = 0; j < ds.x.cols(); ++j) ds.x(i, j) = 3.0 * sampler.symmetric();
        ds.y[i] = sampler.unit();
    }
    return ds;
}

}  // namespace synth
