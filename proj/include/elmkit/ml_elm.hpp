#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "elmkit/elm.hpp"
#include "elmkit/elm_ae.hpp"
#include "elmkit/errors.hpp"
#include "elmkit/hash.hpp"

namespace elmkit {

/// Multilayer ELM: a stack of ELM-AE feature layers finished by a plain ELM
/// head. The dimension chain input -> L1 -> ... -> Lk -> head is validated
/// at construction and again at load time.
struct MlElmModel {
    std::vector<AeLayer> ae_layers;
    ElmModel head;
    std::uint64_t seed = 0;  // run seed all layer seeds derive from

    std::vector<std::size_t> layer_dims() const {
        std::vector<std::size_t> dims;
        dims.reserve(ae_layers.size());
        for (const auto& l : ae_layers) dims.push_back(l.output_dim());
        return dims;
    }

    std::size_t input_dim() const {
        return ae_layers.empty() ? head.input_dim() : ae_layers.front().input_dim();
    }

    void validate() const {
        if (ae_layers.empty()) throw ShapeError("ML-ELM requires at least one AE layer");
        for (std::size_t k = 1; k < ae_layers.size(); ++k)
            if (ae_layers[k].input_dim() != ae_layers[k - 1].output_dim())
                throw ShapeError("AE layer " + std::to_string(k) + " expects " +
                                 std::to_string(ae_layers[k].input_dim()) + " inputs, previous layer yields " +
                                 std::to_string(ae_layers[k - 1].output_dim()));
        if (head.input_dim() != ae_layers.back().output_dim())
            throw ShapeError("head expects " + std::to_string(head.input_dim()) +
                             " inputs, last AE layer yields " +
                             std::to_string(ae_layers.back().output_dim()));
        if (head.n_outputs() != 1) throw ShapeError("CTR head must have one output");
    }
};

/// Maps a batch through a chain of AE layers.
template <typename Dataset>
Eigen::MatrixXd forward_chain(const Dataset& data, std::span<const AeLayer> chain, IndexRange b) {
    if (chain.empty()) throw ShapeError("empty AE chain");
    Eigen::MatrixXd cur = ae_transform(data.view(b), chain.front());
    for (std::size_t k = 1; k < chain.size(); ++k) cur = ae_transform(cur, chain[k]);
    return cur;
}

/// Read-only view of a dataset as seen through an AE chain; lets the plain
/// ELM trainer run unchanged on the learned representation.
template <typename Dataset>
struct TransformedView {
    const Dataset& base;
    std::span<const AeLayer> chain;

    std::size_t size() const { return base.size(); }
    Eigen::VectorXd labels(IndexRange r) const { return base.labels(r); }
};

template <typename Dataset>
std::size_t input_dims(const TransformedView<Dataset>& v) {
    return v.chain.back().output_dim();
}

template <typename Dataset>
Eigen::MatrixXd hidden_batch(const TransformedView<Dataset>& v, IndexRange r,
                             const RandomLayer& layer) {
    return hidden(forward_chain(v.base, v.chain, r), layer);
}

struct MlElmTrainOptions {
    std::vector<std::size_t> layer_dims;  // AE widths, e.g. {500, 500}
    std::size_t head_hidden = 1000;
    double lambda_ae = 1e-2;
    double lambda_head = 1e-2;
    ActivationKind activation = ActivationKind::relu;
    std::uint64_t seed = 42;
    std::size_t batch_size = 10000;
    bool identity_transform = false;
    bool constant_unit = false;
};

struct MlElmTrainResult {
    MlElmModel model;
    TimingReport timing;
};

/// Greedy layerwise ML-ELM training. Each AE layer streams the current
/// representation once (hidden + accumulate with inputs as targets, ridge
/// solve, Procrustes), then the head trains as a regular ELM; a k-layer
/// model therefore costs k+1 data passes.
template <typename Dataset>
MlElmTrainResult train_ml_elm(const Dataset& data, IndexRange range,
                              const MlElmTrainOptions& opt) {
    if (opt.layer_dims.empty()) throw ConfigError("ML-ELM needs at least one AE layer dim");
    if (range.empty()) throw DataError("training split is empty");

    Stopwatch total;
    double batch_sum = 0.0;
    std::size_t batches = 0;

    MlElmModel model;
    model.seed = opt.seed;
    for (std::size_t k = 0; k < opt.layer_dims.size(); ++k) {
        const std::uint64_t layer_seed = hash_u64(opt.seed, k + 1);
        const std::size_t cur_dim =
            model.ae_layers.empty() ? input_dims(data) : model.ae_layers.back().output_dim();

        AeLayer layer;
        layer.random = init_orthogonal(cur_dim, opt.layer_dims[k], layer_seed, opt.activation);
        layer.lambda = opt.lambda_ae;
        layer.transform_activation =
            opt.identity_transform ? ActivationKind::identity : opt.activation;

        NormalEqAccumulator acc(layer.random.output_dim(), cur_dim);
        const std::span<const AeLayer> chain(model.ae_layers);
        for (IndexRange b : BatchRange(range, opt.batch_size)) {
            Stopwatch bt;
            if (chain.empty()) {
                detail::accumulate_targets(acc, hidden_batch(data, b, layer.random), data, b);
            } else {
                Eigen::MatrixXd rep = forward_chain(data, chain, b);
                acc.accumulate(hidden(rep, layer.random), rep);
            }
            batch_sum += bt.seconds();
            ++batches;
        }
        layer.output_weights = procrustes_orthogonalize(ridge_solve(acc, opt.lambda_ae));
        model.ae_layers.push_back(std::move(layer));
    }

    TransformedView<Dataset> tv{data, model.ae_layers};
    ElmTrainOptions head_opt;
    head_opt.hidden_dim = opt.head_hidden;
    head_opt.lambda = opt.lambda_head;
    head_opt.activation = opt.activation;
    head_opt.seed = hash_u64(opt.seed, 0);
    head_opt.batch_size = opt.batch_size;
    head_opt.constant_unit = opt.constant_unit;
    ElmTrainResult head = train_elm(tv, range, head_opt);
    model.head = std::move(head.model);
    model.validate();

    MlElmTrainResult out{std::move(model), {}};
    out.timing.finish(total.seconds(),
                      batch_sum + head.timing.batch_seconds_mean * double(head.timing.batches),
                      batches + head.timing.batches, range.size());
    return out;
}

/// Forward pass: AE feature layers in order, then the ELM head.
template <typename Dataset>
Eigen::MatrixXd predict_ml(const MlElmModel& model, const Dataset& data, IndexRange range,
                           std::size_t batch_size = 10000) {
    TransformedView<Dataset> tv{data, model.ae_layers};
    return predict(model.head, tv, range, batch_size);
}

}  // namespace elmkit
