#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "elmkit/dataset.hpp"
#include "elmkit/errors.hpp"
#include "elmkit/hash.hpp"
#include "elmkit/io.hpp"
#include "elmkit/metrics.hpp"
#include "elmkit/random_layer.hpp"
#include "elmkit/schema.hpp"

namespace elmkit {

/// Per-field embedding tables: raw categorical values hash into a fixed
/// number of buckets per field (OOV and rare values share buckets) and each
/// bucket owns a dense float32 row. Field order matches the schema.
struct EmbeddingTable {
    struct Field {
        std::uint64_t bucket_count = 0;
        Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows;
    };

    std::uint64_t hash_seed = 0;
    std::vector<Field> fields;

    std::size_t dim() const { return fields.empty() ? 0 : std::size_t(fields[0].rows.cols()); }
    std::size_t output_dim() const { return fields.size() * dim(); }

    std::uint64_t bucket(std::size_t field_index, std::string_view value) const {
        return hash_bytes(field_seed(hash_seed, field_index), value) %
               fields[field_index].bucket_count;
    }

    void validate() const {
        if (fields.empty()) throw ShapeError("embedding table has no fields");
        const auto d = fields[0].rows.cols();
        if (d < 1) throw ShapeError("embedding dim must be >= 1");
        for (const auto& f : fields) {
            if (f.bucket_count < 1) throw ShapeError("embedding bucket count must be >= 1");
            if (f.rows.rows() != Eigen::Index(f.bucket_count) || f.rows.cols() != d)
                throw ShapeError("embedding table field shape mismatch");
            if (!f.rows.allFinite()) throw NumericError("embedding table has non-finite entries");
        }
    }
};

/// Dense model input: concatenated field embeddings plus the label.
struct DenseInstance {
    Eigen::VectorXd values;
    int label = 0;
};

/// Looks up each field's bucket row and concatenates them in schema order;
/// missing fields contribute a zero block.
inline DenseInstance embed_transform(const RawRecord& record, const EmbeddingTable& table) {
    if (record.values.size() != table.fields.size())
        throw ShapeError("record has " + std::to_string(record.values.size()) +
                         " fields, table has " + std::to_string(table.fields.size()));
    const std::size_t d = table.dim();
    DenseInstance out;
    out.label = record.label;
    out.values = Eigen::VectorXd::Zero(Eigen::Index(record.values.size() * d));
    for (std::size_t i = 0; i < record.values.size(); ++i) {
        if (!record.values[i].has_value()) continue;
        const auto b = table.bucket(i, *record.values[i]);
        out.values.segment(Eigen::Index(i * d), Eigen::Index(d)) =
            table.fields[i].rows.row(Eigen::Index(b)).cast<double>();
    }
    return out;
}

/// Transforms a whole record set into a dense dataset for the ELM.
inline DenseDataset embed_dataset(std::span<const RawRecord> records, const EmbeddingTable& table) {
    DenseDataset ds;
    ds.x.resize(Eigen::Index(records.size()), Eigen::Index(table.output_dim()));
    ds.y.resize(Eigen::Index(records.size()));
    for (std::size_t i = 0; i < records.size(); ++i) {
        DenseInstance inst = embed_transform(records[i], table);
        ds.x.row(Eigen::Index(i)) = inst.values.transpose();
        ds.y[Eigen::Index(i)] = double(inst.label);
    }
    return ds;
}

struct EmbeddingPretrainOptions {
    std::size_t dim = 8;
    std::vector<std::size_t> bucket_counts;  // one per field, or a single shared value
    std::size_t epochs = 1;
    double learning_rate = 0.05;
    std::uint64_t seed = 42;  // initialization; also the table's hash seed
};

/// The trained surrogate: the embedding table plus the linear head that
/// scored it during pretraining. The table is what downstream models use;
/// the head survives so the surrogate itself can be evaluated as a
/// classifier (it doubles as a plain logistic-regression oracle when
/// dim = 1 and buckets are collision-free).
struct EmbeddingPretrainResult {
    EmbeddingTable table;
    std::vector<Eigen::VectorXd> field_weights;
    double bias = 0.0;
    double first_decile_loss = 0.0;
    double last_decile_loss = 0.0;

    double score(const RawRecord& record) const {
        double z = bias;
        for (std::size_t i = 0; i < record.values.size(); ++i) {
            if (!record.values[i].has_value()) continue;
            const auto b = table.bucket(i, *record.values[i]);
            z += table.fields[i].rows.row(Eigen::Index(b)).cast<double>().dot(field_weights[i]);
        }
        return 1.0 / (1.0 + std::exp(-z));
    }
};

/// One-epoch-style streaming pretrainer: a logistic model
/// y^ = sigmoid(w0 + sum_f u_f . e_f(x)) trained by plain SGD on log loss,
/// in data order, single-threaded, fully determined by the seed. Stands in
/// for the gradient factorization model that would normally produce the
/// tables; externally trained tables load through the same file format.
inline EmbeddingPretrainResult pretrain_surrogate(std::span<const RawRecord> records,
                                                  const FeatureSchema& schema,
                                                  const EmbeddingPretrainOptions& opt) {
    if (records.empty()) throw DataError("pretraining dataset is empty");
    if (opt.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (opt.dim < 1) throw ConfigError("embedding dim must be >= 1");
    const std::size_t n_fields = schema.fields.size();
    std::vector<std::size_t> buckets = opt.bucket_counts;
    if (buckets.size() == 1) buckets.assign(n_fields, buckets[0]);
    if (buckets.size() != n_fields)
        throw ConfigError("bucket_counts must have one entry per field");

    EmbeddingPretrainResult out;
    out.table.hash_seed = opt.seed;
    out.table.fields.resize(n_fields);
    out.field_weights.resize(n_fields);

    UniformSampler sampler(opt.seed);
    for (std::size_t f = 0; f < n_fields; ++f) {
        auto& rows = out.table.fields[f].rows;
        out.table.fields[f].bucket_count = buckets[f];
        rows.resize(Eigen::Index(buckets[f]), Eigen::Index(opt.dim));
        for (Eigen::Index r = 0; r < rows.rows(); ++r)
            for (Eigen::Index c = 0; c < rows.cols(); ++c)
                rows(r, c) = float(0.05 * sampler.symmetric());
    }
    for (std::size_t f = 0; f < n_fields; ++f) {
        auto& u = out.field_weights[f];
        u.resize(Eigen::Index(opt.dim));
        for (Eigen::Index c = 0; c < u.size(); ++c) u[c] = 0.05 * sampler.symmetric();
    }

    const std::size_t total_steps = records.size() * opt.epochs;
    std::array<double, 10> decile_loss{};
    std::array<std::size_t, 10> decile_count{};
    std::vector<std::uint64_t> hit_buckets(n_fields);
    Eigen::VectorXd embedding(Eigen::Index(opt.dim));

    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
        for (const RawRecord& rec : records) {
            if (rec.values.size() != n_fields)
                throw ShapeError("record/schema field count mismatch during pretraining");
            double z = out.bias;
            for (std::size_t f = 0; f < n_fields; ++f) {
                if (!rec.values[f].has_value()) {
                    hit_buckets[f] = std::uint64_t(-1);
                    continue;
                }
                hit_buckets[f] = out.table.bucket(f, *rec.values[f]);
                z += out.table.fields[f]
                         .rows.row(Eigen::Index(hit_buckets[f]))
                         .cast<double>()
                         .dot(out.field_weights[f]);
            }
            if (!std::isfinite(z))
                throw DivergenceError("pretraining diverged at step " + std::to_string(step) +
                                      "; lower the learning rate");
            const double p = 1.0 / (1.0 + std::exp(-z));
            const double y = double(rec.label);
            const double err = p - y;

            const double pc = clip_probability(p);
            const std::size_t decile = std::min<std::size_t>(9, step * 10 / total_steps);
            decile_loss[decile] -= y > 0.5 ? std::log(pc) : std::log1p(-pc);
            decile_count[decile] += 1;

            out.bias -= opt.learning_rate * err;
            for (std::size_t f = 0; f < n_fields; ++f) {
                if (hit_buckets[f] == std::uint64_t(-1)) continue;
                auto row = out.table.fields[f].rows.row(Eigen::Index(hit_buckets[f]));
                embedding = row.cast<double>();
                row -= (opt.learning_rate * err * out.field_weights[f]).cast<float>().transpose();
                out.field_weights[f] -= opt.learning_rate * err * embedding;
            }
            ++step;
        }
    }

    out.first_decile_loss = decile_count[0] ? decile_loss[0] / double(decile_count[0]) : 0.0;
    out.last_decile_loss = decile_count[9] ? decile_loss[9] / double(decile_count[9]) : 0.0;
    out.table.validate();
    return out;
}

/// The table-producing entry point; the surrogate head is discarded.
inline EmbeddingTable pretrain_embeddings(std::span<const RawRecord> records,
                                          const FeatureSchema& schema,
                                          const EmbeddingPretrainOptions& opt) {
    return pretrain_surrogate(records, schema, opt).table;
}

// ---- table file: magic "ELME", version, field count,
//      per field (bucket_count u64, dim u32, row-major f32), hash seed ----

inline constexpr std::uint32_t kEmbeddingFormatVersion = 1;

inline void save_table(const EmbeddingTable& table, const std::string& path) {
    table.validate();
    BinaryWriter w(path);
    w.write_magic("ELME");
    w.write_u32(kEmbeddingFormatVersion);
    w.write_u32(std::uint32_t(table.fields.size()));
    for (const auto& f : table.fields) {
        w.write_u64(f.bucket_count);
        w.write_u32(std::uint32_t(f.rows.cols()));
        w.write_f32_array(f.rows.data(), std::size_t(f.rows.size()));
    }
    w.write_u64(table.hash_seed);
    w.close();
}

inline EmbeddingTable load_table(const std::string& path) {
    BinaryReader r(path);
    r.expect_magic("ELME");
    const std::uint32_t version = r.read_u32();
    if (version != kEmbeddingFormatVersion)
        throw FormatError("unsupported embedding table version " + std::to_string(version) +
                          " in " + path);
    const std::uint32_t n_fields = r.read_u32();
    if (n_fields == 0) throw FormatError("embedding table with zero fields: " + path);

    EmbeddingTable table;
    table.fields.resize(n_fields);
    for (auto& f : table.fields) {
        f.bucket_count = r.read_u64();
        const std::uint32_t dim = r.read_u32();
        if (f.bucket_count == 0 || dim == 0) throw FormatError("bad field header in " + path);
        f.rows.resize(Eigen::Index(f.bucket_count), Eigen::Index(dim));
        r.read_f32_array(f.rows.data(), std::size_t(f.rows.size()));
    }
    table.hash_seed = r.read_u64();
    if (!r.at_eof()) throw FormatError("trailing bytes in " + path);
    table.validate();
    return table;
}

}  // namespace elmkit
