#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "elmkit/errors.hpp"
#include "elmkit/hash.hpp"
#include "elmkit/schema.hpp"

namespace elmkit {

/// Sparse feature vector. Indices are strictly increasing and below the
/// hash dimensionality; colliding hashes sum their values.
struct EncodedInstance {
    std::vector<std::uint32_t> indices;
    std::vector<double> values;
    int label = 0;

    std::size_t nnz() const { return indices.size(); }
};

/// Feature hashing. Categorical field i with value v contributes
/// hash_bytes(field_seed(seed,i), v) mod dims with weight 1; integer field i
/// contributes field_seed(seed,i) mod dims with weight log(1+max(z,0));
/// missing fields contribute nothing. Total on any RawRecord produced by
/// parse_record against the same schema.
inline EncodedInstance hash_encode(const RawRecord& record, const FeatureSchema& schema,
                                   std::size_t hash_dims, std::uint64_t seed) {
    if (hash_dims < 1) throw ConfigError("hash_dims must be >= 1");
    if (record.values.size() != schema.fields.size())
        throw ShapeError("record has " + std::to_string(record.values.size()) +
                         " fields, schema has " + std::to_string(schema.fields.size()));

    std::vector<std::pair<std::uint32_t, double>> entries;
    entries.reserve(schema.fields.size());
    for (std::size_t i = 0; i < schema.fields.size(); ++i) {
        const auto& cell = record.values[i];
        if (!cell.has_value()) continue;
        const std::uint64_t fs = field_seed(seed, i);
        if (schema.fields[i].kind == FieldKind::categorical) {
            entries.emplace_back(std::uint32_t(hash_bytes(fs, *cell) % hash_dims), 1.0);
        } else {
            long long z = 0;
            detail::parse_i64(*cell, z);  // validated by parse_record
            const double v = std::log1p(double(std::max<long long>(z, 0)));
            entries.emplace_back(std::uint32_t(fs % hash_dims), v);
        }
    }

    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    EncodedInstance out;
    out.label = record.label;
    out.indices.reserve(entries.size());
    out.values.reserve(entries.size());
    for (const auto& [idx, val] : entries) {
        if (!out.indices.empty() && out.indices.back() == idx)
            out.values.back() += val;  // collision: sum
        else {
            out.indices.push_back(idx);
            out.values.push_back(val);
        }
    }
    return out;
}

}  // namespace elmkit
