#pragma once

#include <string>
#include <variant>

#include <Eigen/Core>

#include "elmkit/elm.hpp"
#include "elmkit/errors.hpp"
#include "elmkit/io.hpp"
#include "elmkit/ml_elm.hpp"

namespace elmkit {

// ELM model file ("ELMK"), little-endian:
//   magic, version, activation id, D, L, N_Y, seed, lambda,
//   W~ (D x L row-major f64), b (L f64), W (rows x N_Y row-major f64).
// Version 1 is exactly that layout. Version 2 inserts a flags word after
// the version; bit 0 marks the optional constant hidden unit, which adds
// one intercept row to W. ML-ELM files ("ELMM") hold a layer count, the AE
// layers, then the head in the same conventions. Round-trips are bit-exact.

inline constexpr std::uint32_t kElmFormatVersion = 1;
inline constexpr std::uint32_t kElmFormatVersionFlags = 2;
inline constexpr std::uint32_t kMlElmFormatVersion = 1;

namespace detail {

inline void write_matrix_rowmajor(BinaryWriter& w, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) w.write_f64(m(i, j));
}

inline void read_matrix_rowmajor(BinaryReader& r, Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = r.read_f64();
}

inline void write_elm_payload(BinaryWriter& w, const ElmModel& model) {
    const bool flags = model.layer.constant_unit;
    w.write_u32(flags ? kElmFormatVersionFlags : kElmFormatVersion);
    if (flags) w.write_u32(model.layer.constant_unit ? 1u : 0u);
    w.write_u32(std::uint32_t(model.layer.activation));
    w.write_u64(model.layer.input_dim);
    w.write_u64(model.layer.hidden_dim);
    w.write_u64(std::uint64_t(model.output_weights.cols()));
    w.write_u64(model.layer.seed);
    w.write_f64(model.lambda);
    // weights_t's raw buffer is the D x L row-major weight matrix
    w.write_f64_array(model.layer.weights_t.data(), std::size_t(model.layer.weights_t.size()));
    w.write_f64_array(model.layer.bias.data(), std::size_t(model.layer.bias.size()));
    write_matrix_rowmajor(w, model.output_weights);
}

inline ElmModel read_elm_payload(BinaryReader& r) {
    ElmModel model;
    const std::uint32_t version = r.read_u32();
    if (version != kElmFormatVersion && version != kElmFormatVersionFlags)
        throw FormatError("unsupported model version " + std::to_string(version) + " in " +
                          r.path());
    if (version == kElmFormatVersionFlags) {
        const std::uint32_t flags = r.read_u32();
        if (flags > 1) throw FormatError("unknown model flags in " + r.path());
        model.layer.constant_unit = (flags & 1) != 0;
    }
    model.layer.activation = activation_from_id(r.read_u32());
    model.layer.input_dim = r.read_u64();
    model.layer.hidden_dim = r.read_u64();
    const std::uint64_t n_y = r.read_u64();
    model.layer.seed = r.read_u64();
    model.lambda = r.read_f64();
    if (model.layer.input_dim < 1 || model.layer.hidden_dim < 1 || n_y < 1)
        throw FormatError("bad dimensions in " + r.path());

    model.layer.weights_t.resize(Eigen::Index(model.layer.hidden_dim),
                                 Eigen::Index(model.layer.input_dim));
    r.read_f64_array(model.layer.weights_t.data(), std::size_t(model.layer.weights_t.size()));
    model.layer.bias.resize(Eigen::Index(model.layer.hidden_dim));
    r.read_f64_array(model.layer.bias.data(), std::size_t(model.layer.bias.size()));
    model.output_weights.resize(Eigen::Index(model.layer.output_dim()), Eigen::Index(n_y));
    read_matrix_rowmajor(r, model.output_weights);
    if (!model.layer.weights_t.allFinite() || !model.layer.bias.allFinite() ||
        !model.output_weights.allFinite())
        throw FormatError("non-finite weights in " + r.path());
    model.layer.finalize_rbf_cache();
    return model;
}

inline void write_ae_layer(BinaryWriter& w, const AeLayer& layer) {
    w.write_u32(std::uint32_t(layer.random.activation));
    w.write_u32(std::uint32_t(layer.transform_activation));
    w.write_u64(layer.random.input_dim);
    w.write_u64(layer.random.hidden_dim);
    w.write_u64(layer.random.seed);
    w.write_f64(layer.lambda);
    w.write_f64_array(layer.random.weights_t.data(), std::size_t(layer.random.weights_t.size()));
    w.write_f64_array(layer.random.bias.data(), std::size_t(layer.random.bias.size()));
    write_matrix_rowmajor(w, layer.output_weights);
}

inline AeLayer read_ae_layer(BinaryReader& r) {
    AeLayer layer;
    layer.random.activation = activation_from_id(r.read_u32());
    layer.transform_activation = activation_from_id(r.read_u32());
    layer.random.input_dim = r.read_u64();
    layer.random.hidden_dim = r.read_u64();
    layer.random.seed = r.read_u64();
    layer.lambda = r.read_f64();
    if (layer.random.input_dim < 1 || layer.random.hidden_dim < 1)
        throw FormatError("bad AE layer dimensions in " + r.path());
    layer.random.weights_t.resize(Eigen::Index(layer.random.hidden_dim),
                                  Eigen::Index(layer.random.input_dim));
    r.read_f64_array(layer.random.weights_t.data(), std::size_t(layer.random.weights_t.size()));
    layer.random.bias.resize(Eigen::Index(layer.random.hidden_dim));
    r.read_f64_array(layer.random.bias.data(), std::size_t(layer.random.bias.size()));
    layer.output_weights.resize(Eigen::Index(layer.random.hidden_dim),
                                Eigen::Index(layer.random.input_dim));
    read_matrix_rowmajor(r, layer.output_weights);
    if (!layer.random.weights_t.allFinite() || !layer.random.bias.allFinite() ||
        !layer.output_weights.allFinite())
        throw FormatError("non-finite AE weights in " + r.path());
    layer.random.finalize_rbf_cache();
    return layer;
}

}  // namespace detail

inline void save_model(const ElmModel& model, const std::string& path) {
    BinaryWriter w(path);
    w.write_magic("ELMK");
    detail::write_elm_payload(w, model);
    w.close();
}

inline void save_model(const MlElmModel& model, const std::string& path) {
    model.validate();
    BinaryWriter w(path);
    w.write_magic("ELMM");
    w.write_u32(kMlElmFormatVersion);
    w.write_u64(model.seed);
    w.write_u32(std::uint32_t(model.ae_layers.size()));
    for (const auto& layer : model.ae_layers) detail::write_ae_layer(w, layer);
    detail::write_elm_payload(w, model.head);
    w.close();
}

using AnyModel = std::variant<ElmModel, MlElmModel>;

/// Loads either model kind, dispatching on the magic.
inline AnyModel load_model(const std::string& path) {
    BinaryReader r(path);
    char magic[4];
    r.read_bytes(magic, 4);
    const std::string_view m(magic, 4);
    if (m == "ELMK") {
        ElmModel model = detail::read_elm_payload(r);
        if (!r.at_eof()) throw FormatError("trailing bytes in " + path);
        return model;
    }
    if (m == "ELMM") {
        const std::uint32_t version = r.read_u32();
        if (version != kMlElmFormatVersion)
            throw FormatError("unsupported ML-ELM version " + std::to_string(version) + " in " +
                              path);
        MlElmModel model;
        model.seed = r.read_u64();
        const std::uint32_t n_layers = r.read_u32();
        model.ae_layers.reserve(n_layers);
        for (std::uint32_t k = 0; k < n_layers; ++k)
            model.ae_layers.push_back(detail::read_ae_layer(r));
        model.head = detail::read_elm_payload(r);
        if (!r.at_eof()) throw FormatError("trailing bytes in " + path);
        model.validate();
        return model;
    }
    throw FormatError("bad magic in " + path);
}

inline std::size_t model_input_dim(const AnyModel& model) {
    return std::visit([](const auto& m) { return m.input_dim(); }, model);
}

}  // namespace elmkit
