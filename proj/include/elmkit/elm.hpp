#pragma once

#include <cstdint>
#include <utility>

#include <Eigen/Core>

#include "elmkit/dataset.hpp"
#include "elmkit/errors.hpp"
#include "elmkit/normal_eq.hpp"
#include "elmkit/random_layer.hpp"
#include "elmkit/split.hpp"
#include "elmkit/timing.hpp"

namespace elmkit {

inline std::size_t input_dims(const EncodedDataset& ds) { return ds.dims; }
inline std::size_t input_dims(const DenseDataset& ds) { return ds.dims(); }

inline Eigen::MatrixXd hidden_batch(const EncodedDataset& ds, IndexRange r,
                                    const RandomLayer& layer) {
    return hidden(ds.view(r), layer);
}
inline Eigen::MatrixXd hidden_batch(const DenseDataset& ds, IndexRange r,
                                    const RandomLayer& layer) {
    return hidden(ds.view(r), layer);
}

/// Trained ELM: the frozen random layer plus the ridge-learned output
/// weights. Immutable after training and safe to share across threads.
struct ElmModel {
    RandomLayer layer;
    Eigen::MatrixXd output_weights;  // output_dim() x N_Y
    double lambda = 0.0;

    std::size_t input_dim() const { return layer.input_dim; }
    std::size_t n_outputs() const { return std::size_t(output_weights.cols()); }
};

struct ElmTrainOptions {
    std::size_t hidden_dim = 1000;
    double lambda = 1e-2;
    ActivationKind activation = ActivationKind::relu;
    std::uint64_t seed = 42;
    std::size_t batch_size = 10000;
    bool constant_unit = false;
};

struct ElmTrainResult {
    ElmModel model;
    TimingReport timing;
};

/// ELM training: initialize the random layer, stream hidden batches into
/// the normal-equation accumulator, then solve once. One data pass, O(L^2)
/// solver memory.
template <typename Dataset>
ElmTrainResult train_elm(const Dataset& data, IndexRange range, const ElmTrainOptions& opt) {
    if (range.empty()) throw DataError("training split is empty");

    RandomLayer layer =
        init_random_layer(input_dims(data), opt.hidden_dim, opt.seed, opt.activation,
                          opt.constant_unit);
    NormalEqAccumulator acc(layer.output_dim(), 1);

    Stopwatch total;
    double batch_sum = 0.0;
    std::size_t batches = 0;
    for (IndexRange b : BatchRange(range, opt.batch_size)) {
        Stopwatch bt;
        acc.accumulate(hidden_batch(data, b, layer), data.labels(b));
        batch_sum += bt.seconds();
        ++batches;
    }
    Eigen::MatrixXd w = ridge_solve(acc, opt.lambda);

    ElmTrainResult out{{std::move(layer), std::move(w), opt.lambda}, {}};
    out.timing.finish(total.seconds(), batch_sum, batches, range.size());
    return out;
}

/// Raw scores H * W for a slice of a dataset, computed batch-wise. Scores
/// are unbounded reals; probability clipping happens in the metrics module.
template <typename Dataset>
Eigen::MatrixXd predict(const ElmModel& model, const Dataset& data, IndexRange range,
                        std::size_t batch_size = 10000) {
    Eigen::MatrixXd scores(Eigen::Index(range.size()), model.output_weights.cols());
    for (IndexRange b : BatchRange(range, batch_size)) {
        scores.middleRows(Eigen::Index(b.begin - range.begin), Eigen::Index(b.size())).noalias() =
            hidden_batch(data, b, model.layer) * model.output_weights;
    }
    return scores;
}

}  // namespace elmkit
