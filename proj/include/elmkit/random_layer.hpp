#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>

#include <Eigen/Core>

#include "elmkit/activation.hpp"
#include "elmkit/encode.hpp"
#include "elmkit/errors.hpp"

namespace elmkit {

/// Deterministic uniform sampler: mt19937_64 (whose output sequence is fixed
/// by the standard) plus an explicit 53-bit mapping to doubles, so sampled
/// weights are identical on every platform.
class UniformSampler {
public:
    explicit UniformSampler(std::uint64_t seed) : rng_(seed) {}

    /// [0, 1)
    double unit() { return double(rng_() >> 11) * 0x1.0p-53; }
    /// [-1, 1)
    double symmetric() { return 2.0 * unit() - 1.0; }

private:
    std::mt19937_64 rng_;
};

/// Frozen random input layer. Weights are stored transposed
/// (hidden_dim x input_dim, column-major) so that weights_t.col(f) is the
/// contiguous slice touched by input feature f; the raw buffer is exactly
/// the D x L row-major weight matrix written to model files.
struct RandomLayer {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    ActivationKind activation = ActivationKind::relu;
    std::uint64_t seed = 0;
    bool constant_unit = false;  // appends a fixed 1.0 hidden node (intercept)

    Eigen::MatrixXd weights_t;        // hidden_dim x input_dim
    Eigen::VectorXd bias;             // hidden_dim
    Eigen::VectorXd weight_sq_norms;  // cached ||w_j||^2, RBF only

    /// Columns of the hidden matrix this layer produces.
    std::size_t output_dim() const { return hidden_dim + (constant_unit ? 1 : 0); }

    void finalize_rbf_cache() {
        if (is_rbf(activation)) weight_sq_norms = weights_t.rowwise().squaredNorm();
    }
};

/// Step i of ELM training: weights i.i.d. uniform on [-1,1] drawn in D x L
/// row-major order, then biases (uniform [-1,1] for additive nodes,
/// uniform (0,1] for RBF nodes). Fully determined by the seed.
inline RandomLayer init_random_layer(std::size_t input_dim, std::size_t hidden_dim,
                                     std::uint64_t seed, ActivationKind activation,
                                     bool constant_unit = false) {
    if (input_dim < 1 || hidden_dim < 1)
        throw ConfigError("layer dimensions must be >= 1");

    RandomLayer layer;
    layer.input_dim = input_dim;
    layer.hidden_dim = hidden_dim;
    layer.activation = activation;
    layer.seed = seed;
    layer.constant_unit = constant_unit;
    layer.weights_t.resize(Eigen::Index(hidden_dim), Eigen::Index(input_dim));
    layer.bias.resize(Eigen::Index(hidden_dim));

    UniformSampler sampler(seed);
    double* w = layer.weights_t.data();  // col-major L x D == row-major D x L
    const std::size_t n = input_dim * hidden_dim;
    for (std::size_t k = 0; k < n; ++k) w[k] = sampler.symmetric();
    if (is_rbf(activation)) {
        for (std::size_t j = 0; j < hidden_dim; ++j) layer.bias[Eigen::Index(j)] = 1.0 - sampler.unit();
    } else {
        for (std::size_t j = 0; j < hidden_dim; ++j) layer.bias[Eigen::Index(j)] = sampler.symmetric();
    }
    layer.finalize_rbf_cache();
    return layer;
}

namespace detail {

// Shared epilogue: given the linear part (hidden_dim x batch, column per
// instance) and per-instance squared norms, produce the activated H
// (batch x output_dim) with the optional constant unit appended.
inline Eigen::MatrixXd activate_transposed(Eigen::MatrixXd&& zt, const Eigen::VectorXd& x_sq_norms,
                                           const RandomLayer& layer) {
    const auto batch = zt.cols();
    if (is_rbf(layer.activation)) {
        // ||x - w_j||^2 = ||x||^2 - 2 x.w_j + ||w_j||^2, clamped at 0 against round-off
        zt *= -2.0;
        zt.colwise() += layer.weight_sq_norms;
        zt.rowwise() += x_sq_norms.transpose();
        zt = zt.cwiseMax(0.0).cwiseSqrt();
        zt.array().colwise() *= layer.bias.array();
        apply_activation(ActivationKind::gaussian_rbf, zt);
    } else {
        zt.colwise() += layer.bias;
        apply_activation(layer.activation, zt);
    }
    Eigen::MatrixXd h(batch, Eigen::Index(layer.output_dim()));
    h.leftCols(zt.rows()) = zt.transpose();
    if (layer.constant_unit) h.col(h.cols() - 1).setOnes();
    return h;
}

}  // namespace detail

/// Hidden matrix for a batch of sparse instances. The product X*W never
/// densifies X: each nonzero performs one contiguous axpy of length L.
inline Eigen::MatrixXd hidden(std::span<const EncodedInstance> batch, const RandomLayer& layer) {
    const Eigen::Index L = Eigen::Index(layer.hidden_dim);
    Eigen::MatrixXd zt = Eigen::MatrixXd::Zero(L, Eigen::Index(batch.size()));
    Eigen::VectorXd x_sq(Eigen::Index(batch.size()));
    const bool rbf = is_rbf(layer.activation);
    for (std::size_t r = 0; r < batch.size(); ++r) {
        const EncodedInstance& inst = batch[r];
        double sq = 0.0;
        auto col = zt.col(Eigen::Index(r));
        for (std::size_t k = 0; k < inst.indices.size(); ++k) {
            const std::uint32_t f = inst.indices[k];
            if (f >= layer.input_dim)
                throw ShapeError("feature index " + std::to_string(f) + " >= layer input dim " +
                                 std::to_string(layer.input_dim));
            const double v = inst.values[k];
            col += v * layer.weights_t.col(Eigen::Index(f));
            sq += v * v;
        }
        x_sq[Eigen::Index(r)] = sq;
    }
    return detail::activate_transposed(std::move(zt), x_sq, layer);
}

/// Hidden matrix for a dense batch (one instance per row).
template <typename Derived>
Eigen::MatrixXd hidden(const Eigen::MatrixBase<Derived>& x, const RandomLayer& layer) {
    if (std::size_t(x.cols()) != layer.input_dim)
        throw ShapeError("batch has " + std::to_string(x.cols()) + " columns, layer expects " +
                         std::to_string(layer.input_dim));
    Eigen::MatrixXd zt = layer.weights_t * x.transpose();
    Eigen::VectorXd x_sq;
    if (is_rbf(layer.activation)) x_sq = x.rowwise().squaredNorm();
    return detail::activate_transposed(std::move(zt), x_sq, layer);
}

}  // namespace elmkit
