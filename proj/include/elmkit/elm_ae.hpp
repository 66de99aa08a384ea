#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include <Eigen/Core>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "elmkit/dataset.hpp"
#include "elmkit/elm.hpp"
#include "elmkit/errors.hpp"
#include "elmkit/normal_eq.hpp"
#include "elmkit/random_layer.hpp"

namespace elmkit {

/// One ELM-autoencoder layer: an orthonormal random layer (W~'W~ = I on the
/// smaller side, ||b|| = 1) plus the orthogonalized output weights whose
/// transpose maps inputs to features.
struct AeLayer {
    RandomLayer random;              // orthonormal weights, unit-norm bias
    Eigen::MatrixXd output_weights;  // W_orth, hidden_dim x input_dim
    double lambda = 0.0;
    // Activation used by ae_transform. Defaults to the training activation;
    // identity is available for a purely linear feature map.
    ActivationKind transform_activation = ActivationKind::sigmoid;

    std::size_t input_dim() const { return random.input_dim; }
    std::size_t output_dim() const { return random.hidden_dim; }
};

/// Random layer under the ELM-AE orthogonality constraints: weights drawn
/// uniform [-1,1] and orthonormalized by QR on the smaller side (columns
/// when L <= D, rows when L > D), bias normalized to unit length. Signs are
/// fixed by the R diagonal so the result is deterministic in the seed.
inline RandomLayer init_orthogonal(std::size_t input_dim, std::size_t hidden_dim,
                                   std::uint64_t seed, ActivationKind activation) {
    if (input_dim < 1 || hidden_dim < 1)
        throw ConfigError("layer dimensions must be >= 1");

    const Eigen::Index d = Eigen::Index(input_dim);
    const Eigen::Index l = Eigen::Index(hidden_dim);
    UniformSampler sampler(seed);

    RandomLayer layer;
    layer.input_dim = input_dim;
    layer.hidden_dim = hidden_dim;
    layer.activation = activation;
    layer.seed = seed;

    for (int attempt = 0;; ++attempt) {
        if (attempt >= 8) throw NumericError("orthogonal init: repeated rank deficiency");

        Eigen::MatrixXd m(d, l);
        for (Eigen::Index f = 0; f < d; ++f)
            for (Eigen::Index j = 0; j < l; ++j) m(f, j) = sampler.symmetric();

        // QR of the tall side; a random matrix is full rank with probability 1.
        Eigen::MatrixXd tall = (l <= d) ? m : Eigen::MatrixXd(m.transpose());
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(tall);
        const Eigen::Index k = tall.cols();
        Eigen::VectorXd rdiag = qr.matrixQR().diagonal().head(k);
        if (rdiag.cwiseAbs().minCoeff() < 1e-12 * double(tall.rows())) continue;

        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(tall.rows(), k);
        for (Eigen::Index j = 0; j < k; ++j)
            if (rdiag[j] < 0.0) q.col(j) = -q.col(j);

        // weights_t is L x D = (D x L W~) transposed
        layer.weights_t = (l <= d) ? Eigen::MatrixXd(q.transpose()) : std::move(q);
        break;
    }

    Eigen::VectorXd b(l);
    for (Eigen::Index j = 0; j < l; ++j) b[j] = sampler.symmetric();
    const double norm = b.norm();
    if (norm == 0.0) throw NumericError("orthogonal init: zero bias draw");
    layer.bias = b / norm;
    layer.finalize_rbf_cache();
    return layer;
}

/// Nearest (semi-)orthogonal matrix in Frobenius norm: the polar factor
/// U V^T of the SVD. Among all semi-orthogonal Q of the same shape it
/// maximizes trace(W_ridge^T Q).
inline Eigen::MatrixXd procrustes_orthogonalize(const Eigen::MatrixXd& w_ridge) {
    if (!w_ridge.allFinite()) throw NumericError("procrustes: non-finite input");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(w_ridge, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().transpose();
}

/// Feature map of a trained AE layer: g(X W_orth^T). The bias plays no part
/// here; only the transpose of the learned output weights is reused.
template <typename Derived>
Eigen::MatrixXd ae_transform(const Eigen::MatrixBase<Derived>& x, const AeLayer& layer) {
    if (std::size_t(x.cols()) != layer.input_dim())
        throw ShapeError("batch has " + std::to_string(x.cols()) + " columns, AE layer expects " +
                         std::to_string(layer.input_dim()));
    Eigen::MatrixXd z = x * layer.output_weights.transpose();
    apply_activation(layer.transform_activation, z);
    return z;
}

/// Sparse-input variant of the AE feature map.
inline Eigen::MatrixXd ae_transform(std::span<const EncodedInstance> batch, const AeLayer& layer) {
    const Eigen::Index l = Eigen::Index(layer.output_dim());
    Eigen::MatrixXd zt = Eigen::MatrixXd::Zero(l, Eigen::Index(batch.size()));
    for (std::size_t r = 0; r < batch.size(); ++r) {
        const EncodedInstance& inst = batch[r];
        auto col = zt.col(Eigen::Index(r));
        for (std::size_t k = 0; k < inst.indices.size(); ++k) {
            const std::uint32_t f = inst.indices[k];
            if (f >= layer.input_dim())
                throw ShapeError("feature index " + std::to_string(f) + " >= AE input dim " +
                                 std::to_string(layer.input_dim()));
            col += inst.values[k] * layer.output_weights.col(Eigen::Index(f));
        }
    }
    Eigen::MatrixXd z = zt.transpose();
    apply_activation(layer.transform_activation, z);
    return z;
}

namespace detail {
inline void accumulate_targets(NormalEqAccumulator& acc, const Eigen::MatrixXd& h,
                               const EncodedDataset& ds, IndexRange b) {
    acc.accumulate_sparse_targets(h, ds.view(b));
}
inline void accumulate_targets(NormalEqAccumulator& acc, const Eigen::MatrixXd& h,
                               const DenseDataset& ds, IndexRange b) {
    acc.accumulate(h, Eigen::MatrixXd(ds.view(b)));
}
}  // namespace detail

/// Ridge output weights of an autoencoder: W_ridge = (H^T H + lambda I)^-1 H^T X,
/// streamed through the normal-equation accumulator with the inputs as
/// their own targets.
template <typename Dataset>
Eigen::MatrixXd ae_ridge_targets(const Dataset& data, IndexRange range, const RandomLayer& layer,
                                 double lambda, std::size_t batch_size) {
    NormalEqAccumulator acc(layer.output_dim(), input_dims(data));
    for (IndexRange b : BatchRange(range, batch_size))
        detail::accumulate_targets(acc, hidden_batch(data, b, layer), data, b);
    return ridge_solve(acc, lambda);
}

/// Full single-layer ELM-AE training step.
template <typename Dataset>
AeLayer train_ae_layer(const Dataset& data, IndexRange range, std::size_t hidden_dim,
                       double lambda, ActivationKind activation, std::uint64_t seed,
                       std::size_t batch_size, bool identity_transform = false) {
    AeLayer out;
    out.random = init_orthogonal(input_dims(data), hidden_dim, seed, activation);
    out.output_weights =
        procrustes_orthogonalize(ae_ridge_targets(data, range, out.random, lambda, batch_size));
    out.lambda = lambda;
    out.transform_activation = identity_transform ? ActivationKind::identity : activation;
    return out;
}

}  // namespace elmkit
