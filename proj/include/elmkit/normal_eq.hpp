#pragma once

#include <cstdint>
#include <span>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "elmkit/encode.hpp"
#include "elmkit/errors.hpp"

namespace elmkit {

/// Running normal equations: A = sum of H^T H and c = sum of H^T Y over all
/// batches seen. Memory is O(L * (L + N_Y)) regardless of the instance
/// count, which is what makes the one-pass streaming ridge solve work.
/// Only the lower triangle of A is maintained; gram() symmetrizes.
class NormalEqAccumulator {
public:
    NormalEqAccumulator(std::size_t hidden_dim, std::size_t output_dim)
        : a_(Eigen::MatrixXd::Zero(Eigen::Index(hidden_dim), Eigen::Index(hidden_dim))),
          c_(Eigen::MatrixXd::Zero(Eigen::Index(hidden_dim), Eigen::Index(output_dim))) {}

    void accumulate(const Eigen::MatrixXd& h, const Eigen::MatrixXd& y) {
        check_h(h);
        if (y.rows() != h.rows())
            throw ShapeError("H has " + std::to_string(h.rows()) + " rows, Y has " +
                             std::to_string(y.rows()));
        if (y.cols() != c_.cols())
            throw ShapeError("Y has " + std::to_string(y.cols()) + " outputs, accumulator expects " +
                             std::to_string(c_.cols()));
        if (h.rows() == 0) return;
        a_.selfadjointView<Eigen::Lower>().rankUpdate(h.transpose(), 1.0);
        c_.noalias() += h.transpose() * y;
        count_ += std::size_t(h.rows());
    }

    void accumulate(const Eigen::MatrixXd& h, const Eigen::VectorXd& y) {
        accumulate(h, Eigen::MatrixXd(y));
    }

    /// Autoencoder variant: targets are the sparse inputs themselves, so
    /// c += H^T X is accumulated column-by-column from the nonzeros.
    void accumulate_sparse_targets(const Eigen::MatrixXd& h, std::span<const EncodedInstance> x) {
        check_h(h);
        if (std::size_t(h.rows()) != x.size())
            throw ShapeError("H rows and target batch size differ");
        for (std::size_t r = 0; r < x.size(); ++r) {
            for (std::size_t k = 0; k < x[r].indices.size(); ++k) {
                const std::uint32_t f = x[r].indices[k];
                if (f >= std::size_t(c_.cols()))
                    throw ShapeError("target index " + std::to_string(f) + " out of range");
                c_.col(Eigen::Index(f)) += x[r].values[k] * h.row(Eigen::Index(r)).transpose();
            }
        }
        if (x.empty()) return;
        a_.selfadjointView<Eigen::Lower>().rankUpdate(h.transpose(), 1.0);
        count_ += x.size();
    }

    /// Associative merge, so sharded accumulators can be combined.
    void merge(const NormalEqAccumulator& other) {
        if (other.a_.rows() != a_.rows() || other.c_.cols() != c_.cols())
            throw ShapeError("cannot merge accumulators of different shapes");
        a_ += other.a_;
        c_ += other.c_;
        count_ += other.count_;
    }

    /// Symmetrized Gram matrix H^T H.
    Eigen::MatrixXd gram() const { return a_.selfadjointView<Eigen::Lower>(); }

    /// H^T Y moment.
    const Eigen::MatrixXd& moment() const { return c_; }

    std::size_t count() const { return count_; }
    std::size_t hidden_dim() const { return std::size_t(a_.rows()); }
    std::size_t output_dim() const { return std::size_t(c_.cols()); }

    /// (A + lambda I) w - c for the residual check, computed from the lower
    /// triangle without materializing the full Gram matrix.
    Eigen::MatrixXd residual(const Eigen::MatrixXd& w, double lambda) const {
        Eigen::MatrixXd r = a_.selfadjointView<Eigen::Lower>() * w;
        r += lambda * w;
        r -= c_;
        return r;
    }

private:
    void check_h(const Eigen::MatrixXd& h) const {
        if (h.cols() != a_.rows())
            throw ShapeError("H has " + std::to_string(h.cols()) + " columns, accumulator expects " +
                             std::to_string(a_.rows()));
    }

    Eigen::MatrixXd a_;  // lower triangle valid
    Eigen::MatrixXd c_;
    std::size_t count_ = 0;
};

/// Closed-form ridge solve W = (H^T H + lambda I)^-1 H^T Y via Cholesky,
/// with iterative refinement until the normal-equation residual meets
/// max|.| <= 1e-8 * (1 + max|c|). lambda = 0 is allowed only when the Gram
/// matrix is numerically invertible.
inline Eigen::MatrixXd ridge_solve(const NormalEqAccumulator& acc, double lambda) {
    if (lambda < 0.0) throw ConfigError("lambda must be non-negative");

    Eigen::MatrixXd m = acc.gram();
    m.diagonal().array() += lambda;
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(m);  // in-place; m is consumed
    if (llt.info() != Eigen::Success)
        throw SingularityError(
            "Cholesky factorization failed (Gram matrix singular); use lambda > 0");

    Eigen::MatrixXd w = llt.solve(acc.moment());
    if (!w.allFinite())
        throw SingularityError("ridge solve produced non-finite weights; use lambda > 0");
    const double bound = 1e-8 * (1.0 + acc.moment().cwiseAbs().maxCoeff());
    for (int iter = 0; iter < 4; ++iter) {
        Eigen::MatrixXd r = acc.residual(w, lambda);
        if (r.cwiseAbs().maxCoeff() <= bound) return w;
        w -= llt.solve(r);
    }
    if (acc.residual(w, lambda).cwiseAbs().maxCoeff() <= bound) return w;
    throw SingularityError("ridge solve did not reach required residual; use a larger lambda");
}

}  // namespace elmkit
