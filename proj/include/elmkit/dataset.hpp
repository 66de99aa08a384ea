#pragma once

#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "elmkit/encode.hpp"
#include "elmkit/errors.hpp"
#include "elmkit/schema.hpp"
#include "elmkit/split.hpp"

namespace elmkit {

/// In-memory sparse dataset (hashed input mode).
struct EncodedDataset {
    std::size_t dims = 0;
    std::vector<EncodedInstance> rows;

    std::size_t size() const { return rows.size(); }

    std::span<const EncodedInstance> view(IndexRange r) const {
        return {rows.data() + r.begin, r.size()};
    }

    Eigen::VectorXd labels(IndexRange r) const {
        Eigen::VectorXd y(Eigen::Index(r.size()));
        for (std::size_t i = r.begin; i < r.end; ++i)
            y[Eigen::Index(i - r.begin)] = double(rows[i].label);
        return y;
    }

    void apply_order(const std::vector<std::uint32_t>& order) {
        std::vector<EncodedInstance> next(rows.size());
        for (std::size_t i = 0; i < order.size(); ++i) next[i] = std::move(rows[order[i]]);
        rows = std::move(next);
    }
};

/// In-memory dense dataset (embedded input mode and synthetic benchmarks).
struct DenseDataset {
    Eigen::MatrixXd x;  // one instance per row
    Eigen::VectorXd y;

    std::size_t size() const { return std::size_t(x.rows()); }
    std::size_t dims() const { return std::size_t(x.cols()); }

    auto view(IndexRange r) const {
        return x.middleRows(Eigen::Index(r.begin), Eigen::Index(r.size()));
    }

    Eigen::VectorXd labels(IndexRange r) const {
        return y.segment(Eigen::Index(r.begin), Eigen::Index(r.size()));
    }

    void apply_order(const std::vector<std::uint32_t>& order) {
        Eigen::MatrixXd nx(x.rows(), x.cols());
        Eigen::VectorXd ny(y.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            nx.row(Eigen::Index(i)) = x.row(Eigen::Index(order[i]));
            ny[Eigen::Index(i)] = y[Eigen::Index(order[i])];
        }
        x = std::move(nx);
        y = std::move(ny);
    }
};

/// Reads every data line of a delimited file through parse_record,
/// tagging parse failures with their line number.
inline std::vector<RawRecord> load_records(const std::string& path, const FeatureSchema& schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file: " + path);

    std::vector<RawRecord> records;
    std::string line;
    std::size_t line_no = 0;
    bool skip_header = schema.has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (skip_header) {
            skip_header = false;
            continue;
        }
        try {
            records.push_back(parse_record(line, schema));
        } catch (const DataError& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

/// Parse + hash-encode a whole file in one pass.
inline EncodedDataset load_encoded(const std::string& path, const FeatureSchema& schema,
                                   std::size_t hash_dims, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file: " + path);

    EncodedDataset ds;
    ds.dims = hash_dims;
    std::string line;
    std::size_t line_no = 0;
    bool skip_header = schema.has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (skip_header) {
            skip_header = false;
            continue;
        }
        try {
            ds.rows.push_back(hash_encode(parse_record(line, schema), schema, hash_dims, seed));
        } catch (const DataError& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return ds;
}

}  // namespace elmkit
