#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "elmkit/errors.hpp"

namespace elmkit {

enum class FieldKind { categorical, integer };

struct FieldSpec {
    std::string name;
    FieldKind kind = FieldKind::categorical;
};

/// Column layout of a delimited CTR file: an ordered list of feature fields
/// plus the position of the label column among the raw columns.
struct FeatureSchema {
    std::vector<FieldSpec> fields;
    std::size_t label_column = 0;
    char delimiter = '\t';
    bool has_header = false;

    std::size_t column_count() const { return fields.size() + 1; }

    void validate() const {
        if (fields.empty()) throw ConfigError("schema has no fields");
        if (label_column >= column_count())
            throw ConfigError("label column out of range: " + std::to_string(label_column));
        std::unordered_set<std::string_view> seen;
        for (const auto& f : fields) {
            if (f.name.empty()) throw ConfigError("schema field with empty name");
            if (!seen.insert(f.name).second)
                throw ConfigError("duplicate schema field: " + f.name);
        }
    }
};

/// One parsed line: an optional string per feature field (absent = missing
/// cell) and the 0/1 label.
struct RawRecord {
    std::vector<std::optional<std::string>> values;
    int label = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool parse_i64(std::string_view s, long long& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace detail

/// Splits one data line into a RawRecord. Cell count must match the schema;
/// empty cells become missing values; non-empty integer cells must parse as
/// signed integers so that encoding stays a total function downstream.
inline RawRecord parse_record(std::string_view line, const FeatureSchema& schema) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    RawRecord rec;
    rec.values.reserve(schema.fields.size());

    std::size_t col = 0;
    std::size_t field = 0;
    std::size_t start = 0;
    const std::size_t n_cols = schema.column_count();
    for (std::size_t pos = 0; pos <= line.size(); ++pos) {
        if (pos < line.size() && line[pos] != schema.delimiter) continue;
        std::string_view cell = line.substr(start, pos - start);
        start = pos + 1;
        if (col >= n_cols) {  // keep counting so over-long lines are reported
            ++col;
            continue;
        }
        if (col == schema.label_column) {
            if (cell == "0")
                rec.label = 0;
            else if (cell == "1")
                rec.label = 1;
            else
                throw LabelError("label must be 0 or 1, got \"" + std::string(cell) + "\"");
        } else {
            const FieldSpec& spec = schema.fields[field];
            if (cell.empty()) {
                rec.values.emplace_back(std::nullopt);
            } else {
                if (spec.kind == FieldKind::integer) {
                    long long z;
                    if (!detail::parse_i64(cell, z))
                        throw ParseError("field '" + spec.name + "': expected integer, got \"" +
                                         std::string(cell) + "\"");
                }
                rec.values.emplace_back(std::string(cell));
            }
            ++field;
        }
        ++col;
    }
    if (col != n_cols)
        throw ParseError("expected " + std::to_string(n_cols) + " columns, got " +
                         std::to_string(col));
    return rec;
}

/// Loads a schema description. Key-value lines, '#' comments:
///   delimiter=tab|comma|<char>
///   header=true|false
///   label=<raw column index>
///   field=<name>:<categorical|integer>   (one per feature, in column order)
inline FeatureSchema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open schema: " + path);

    FeatureSchema schema;
    bool saw_label = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = detail::trim(line);
        if (s.empty() || s.front() == '#') continue;
        auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected key=value");
        std::string_view key = detail::trim(s.substr(0, eq));
        std::string_view val = detail::trim(s.substr(eq + 1));
        if (key == "delimiter") {
            if (val == "tab")
                schema.delimiter = '\t';
            else if (val == "comma")
                schema.delimiter = ',';
            else if (val.size() == 1)
                schema.delimiter = val[0];
            else
                throw ParseError(path + ":" + std::to_string(line_no) + ": bad delimiter");
        } else if (key == "header") {
            if (val == "true")
                schema.has_header = true;
            else if (val == "false")
                schema.has_header = false;
            else
                throw ParseError(path + ":" + std::to_string(line_no) + ": header must be true|false");
        } else if (key == "label") {
            long long idx;
            if (!detail::parse_i64(val, idx) || idx < 0)
                throw ParseError(path + ":" + std::to_string(line_no) + ": bad label column");
            schema.label_column = std::size_t(idx);
            saw_label = true;
        } else if (key == "field") {
            auto colon = val.find(':');
            if (colon == std::string_view::npos)
                throw ParseError(path + ":" + std::to_string(line_no) + ": field=<name>:<kind>");
            FieldSpec f;
            f.name = std::string(detail::trim(val.substr(0, colon)));
            std::string_view kind = detail::trim(val.substr(colon + 1));
            if (kind == "categorical")
                f.kind = FieldKind::categorical;
            else if (kind == "integer")
                f.kind = FieldKind::integer;
            else
                throw ParseError(path + ":" + std::to_string(line_no) + ": unknown field kind \"" +
                                 std::string(kind) + "\"");
            schema.fields.push_back(std::move(f));
        } else {
            throw ParseError(path + ":" + std::to_string(line_no) + ": unknown key \"" +
                             std::string(key) + "\"");
        }
    }
    if (!saw_label) throw ParseError(path + ": missing label=<index>");
    schema.validate();
    return schema;
}

}  // namespace elmkit
