#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <Eigen/Dense>

#include "elmkit/elm_ae.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace elmkit;

namespace {

double column_orthonormality_defect(const Eigen::MatrixXd& q) {
    return (q.transpose() * q - Eigen::MatrixXd::Identity(q.cols(), q.cols()))
        .cwiseAbs()
        .maxCoeff();
}

// orthonormality defect on the smaller side of an L x D matrix
double semi_orthogonality_defect(const Eigen::MatrixXd& m) {
    return m.rows() <= m.cols() ? column_orthonormality_defect(m.transpose())
                                : column_orthonormality_defect(m);
}

}  // namespace

TEST_CASE("init_orthogonal: column orthonormality when L <= D") {
    RandomLayer layer = init_orthogonal(5, 3, 1, ActivationKind::sigmoid);
    // W~ is D x L = weights_t^T; columns of W~ orthonormal
    Eigen::MatrixXd w = layer.weights_t.transpose();
    CHECK(column_orthonormality_defect(w) <= 1e-10);
    CHECK(std::abs(layer.bias.norm() - 1.0) <= 1e-12);
}

TEST_CASE("init_orthogonal: row orthonormality when L > D") {
    RandomLayer layer = init_orthogonal(3, 7, 2, ActivationKind::sigmoid);
    Eigen::MatrixXd w = layer.weights_t.transpose();  // 3 x 7
    CHECK(column_orthonormality_defect(Eigen::MatrixXd(w.transpose())) <= 1e-10);
}

TEST_CASE("init_orthogonal: degenerate 1x1") {
    RandomLayer layer = init_orthogonal(1, 1, 3, ActivationKind::sigmoid);
    CHECK(std::abs(std::abs(layer.weights_t(0, 0)) - 1.0) <= 1e-12);
    CHECK(std::abs(std::abs(layer.bias[0]) - 1.0) <= 1e-12);
}

TEST_CASE("init_orthogonal: 100 seeds all satisfy the gram check") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        RandomLayer layer = init_orthogonal(50, 20, seed, ActivationKind::relu);
        Eigen::MatrixXd w = layer.weights_t.transpose();
        CHECK(column_orthonormality_defect(w) <= 1e-10);
    }
}

TEST_CASE("init_orthogonal is deterministic") {
    RandomLayer a = init_orthogonal(12, 6, 9, ActivationKind::sine);
    RandomLayer b = init_orthogonal(12, 6, 9, ActivationKind::sine);
    CHECK(a.weights_t == b.weights_t);
    CHECK(a.bias == b.bias);
}

TEST_CASE("ae ridge targets: identity reconstruction") {
    // H = X makes perfect self-reconstruction possible: W ~ I
    NormalEqAccumulator acc(6, 6);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(40, 6);
    acc.accumulate(x, x);
    Eigen::MatrixXd w = ridge_solve(acc, 1e-12);
    CHECK((w - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("ae ridge targets: shrinkage limit") {
    NormalEqAccumulator acc(4, 4);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(30, 4);
    acc.accumulate(x, x);
    CHECK(ridge_solve(acc, 1e9).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("ae ridge targets match the dense closed form") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    Eigen::MatrixXd h(40, 8), x(40, 5);
    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);

    NormalEqAccumulator acc(8, 5);
    acc.accumulate(h, x);
    const double lambda = 1e-3;
    Eigen::MatrixXd w = ridge_solve(acc, lambda);
    // direct formula, independent route through a dense inverse
    Eigen::MatrixXd m = h.transpose() * h + lambda * Eigen::MatrixXd::Identity(8, 8);
    Eigen::MatrixXd w_ref = m.inverse() * h.transpose() * x;
    CHECK((w - w_ref).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("procrustes: orthogonal input is a fixed point") {
    std::mt19937_64 rng(5);
    Eigen::MatrixXd q = oracle::random_semi_orthogonal(6, 6, rng);
    CHECK((procrustes_orthogonalize(q) - q).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("procrustes: positive diagonal polar factor is the identity") {
    Eigen::MatrixXd d = Eigen::Vector2d(3.0, 0.5).asDiagonal();
    CHECK((procrustes_orthogonalize(d) - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <=
          1e-12);
}

TEST_CASE("procrustes: trace maximality against random orthogonal candidates") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g;
    Eigen::MatrixXd w(3, 3);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = g(rng);
    Eigen::MatrixXd w_orth = procrustes_orthogonalize(w);
    const double best = (w.transpose() * w_orth).trace();
    for (int k = 0; k < 1000; ++k) {
        Eigen::MatrixXd q = oracle::random_semi_orthogonal(3, 3, rng);
        CHECK(best >= (w.transpose() * q).trace() - 1e-10);
    }
}

TEST_CASE("procrustes: Frobenius optimality among semi-orthogonal matrices") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (auto [rows, cols] : {std::pair<int, int>{4, 7}, {7, 4}, {5, 5}}) {
        Eigen::MatrixXd w(rows, cols);
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = g(rng);
        Eigen::MatrixXd w_orth = procrustes_orthogonalize(w);
        CHECK(semi_orthogonality_defect(w_orth) <= 1e-8);
        const double dist = (w - w_orth).norm();
        for (int k = 0; k < 200; ++k) {
            Eigen::MatrixXd q = oracle::random_semi_orthogonal(rows, cols, rng);
            CHECK(dist <= (w - q).norm() + 1e-10);
        }
    }
}

TEST_CASE("procrustes rejects non-finite input") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, 2);
    w(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(procrustes_orthogonalize(w), NumericError);
}

TEST_CASE("ae_transform: identity layer passes inputs through") {
    AeLayer layer;
    layer.random = init_orthogonal(4, 4, 8, ActivationKind::sigmoid);
    layer.output_weights = Eigen::MatrixXd::Identity(4, 4);
    layer.transform_activation = ActivationKind::identity;
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(6, 4);
    CHECK((ae_transform(x, layer) - x).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("ae_transform: zero input under sigmoid maps to 0.5") {
    AeLayer layer;
    layer.random = init_orthogonal(5, 3, 9, ActivationKind::sigmoid);
    layer.output_weights = procrustes_orthogonalize(Eigen::MatrixXd::Random(3, 5));
    layer.transform_activation = ActivationKind::sigmoid;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 5);
    Eigen::MatrixXd f = ae_transform(x, layer);
    CHECK((f.array() - 0.5).abs().maxCoeff() <= 1e-15);
}

TEST_CASE("ae_transform matches a scalar reference loop") {
    AeLayer layer;
    layer.random = init_orthogonal(6, 4, 10, ActivationKind::sigmoid);
    layer.output_weights = procrustes_orthogonalize(Eigen::MatrixXd::Random(4, 6));
    layer.transform_activation = ActivationKind::sigmoid;

    Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 6);
    Eigen::MatrixXd f = ae_transform(x, layer);
    for (Eigen::Index i = 0; i < 5; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
            double z = 0.0;
            for (Eigen::Index c = 0; c < 6; ++c) z += x(i, c) * layer.output_weights(j, c);
            CHECK(f(i, j) == Catch::Approx(1.0 / (1.0 + std::exp(-z))).margin(1e-12));
        }
    }
}

TEST_CASE("ae_transform sparse equals dense") {
    AeLayer layer;
    layer.random = init_orthogonal(20, 6, 11, ActivationKind::sigmoid);
    layer.output_weights = procrustes_orthogonalize(Eigen::MatrixXd::Random(6, 20));
    layer.transform_activation = ActivationKind::sigmoid;

    std::vector<EncodedInstance> sparse(4);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(4, 20);
    std::mt19937_64 rng(12);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::uint32_t f = 0; f < 20; f += 1 + rng() % 5) {
            const double v = double(rng() % 7) - 3.0;
            sparse[r].indices.push_back(f);
            sparse[r].values.push_back(v);
            dense(Eigen::Index(r), Eigen::Index(f)) = v;
        }
    }
    Eigen::MatrixXd fs = ae_transform(std::span<const EncodedInstance>(sparse), layer);
    Eigen::MatrixXd fd = ae_transform(dense, layer);
    CHECK((fs - fd).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("trained AE layer has semi-orthogonal output weights") {
    DenseDataset ds = synth::random_dense(300, 12, 70);
    for (std::size_t L : {4, 12, 20}) {
        AeLayer layer = train_ae_layer(ds, {0, ds.size()}, L, 1e-4, ActivationKind::sigmoid,
                                       71, 100);
        CHECK(semi_orthogonality_defect(layer.output_weights) <= 1e-8);
    }
}

TEST_CASE("linear AE reconstructs data from an L-dimensional subspace") {
    // rank-L data whose span includes the constant direction; with identity
    // activation the hidden layer spans the same subspace, so the ridge
    // reconstruction H W_ridge is exact up to round-off
    const std::size_t n = 200, d = 30, l = 10;
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    Eigen::MatrixXd z(n, l), basis(l, d);
    for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < basis.size(); ++i) basis.data()[i] = g(rng);
    z.col(0).setOnes();  // the AE bias lives in the data subspace
    DenseDataset ds;
    ds.x = z * basis;
    ds.y = Eigen::VectorXd::Zero(n);

    RandomLayer rl = init_orthogonal(d, l, 14, ActivationKind::identity);
    NormalEqAccumulator acc(l, d);
    Eigen::MatrixXd h = hidden(ds.x, rl);
    acc.accumulate(h, ds.x);
    Eigen::MatrixXd w_ridge = ridge_solve(acc, 1e-10);
    const double err = (h * w_ridge - ds.x).norm() / ds.x.norm();
    CHECK(err <= 1e-6);
}
