#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "elmkit/ml_elm.hpp"
#include "elmkit/model_io.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace elmkit;

namespace {

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

MlElmTrainOptions small_options() {
    MlElmTrainOptions opt;
    opt.layer_dims = {10, 6};
    opt.head_hidden = 24;
    opt.lambda_ae = 1e-4;
    opt.lambda_head = 1e-3;
    opt.activation = ActivationKind::sigmoid;
    opt.seed = 5;
    opt.batch_size = 64;
    return opt;
}

}  // namespace

TEST_CASE("train_ml_elm builds the requested layer stack") {
    DenseDataset ds = synth::random_dense(300, 15, 80);
    MlElmTrainResult r = train_ml_elm(ds, {0, ds.size()}, small_options());
    CHECK(r.model.layer_dims() == std::vector<std::size_t>{10, 6});
    CHECK(r.model.ae_layers[0].input_dim() == 15);
    CHECK(r.model.ae_layers[1].input_dim() == 10);
    CHECK(r.model.head.input_dim() == 6);
    CHECK_NOTHROW(r.model.validate());
}

TEST_CASE("a 500;500 layer stack trains and chains dimensions") {
    DenseDataset ds = synth::random_dense(400, 25, 81);
    MlElmTrainOptions opt = small_options();
    opt.layer_dims = {500, 500};
    opt.head_hidden = 50;
    opt.batch_size = 200;
    MlElmTrainResult r = train_ml_elm(ds, {0, ds.size()}, opt);
    CHECK(r.model.ae_layers.size() == 2);
    CHECK(r.model.ae_layers[0].output_dim() == 500);
    CHECK(r.model.ae_layers[1].output_dim() == 500);
    CHECK(r.model.head.input_dim() == 500);
}

TEST_CASE("ml-elm training is deterministic down to the bytes") {
    DenseDataset ds = synth::random_dense(200, 10, 82);
    const auto dir = std::filesystem::temp_directory_path();
    const auto p1 = (dir / "elmkit_ml_a.elm").string();
    const auto p2 = (dir / "elmkit_ml_b.elm").string();
    save_model(train_ml_elm(ds, {0, ds.size()}, small_options()).model, p1);
    save_model(train_ml_elm(ds, {0, ds.size()}, small_options()).model, p2);
    CHECK(file_bytes(p1) == file_bytes(p2));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("identity chain: predict_ml equals head predict on raw input") {
    DenseDataset ds = synth::random_dense(50, 8, 83);
    AeLayer identity_layer;
    identity_layer.random = init_orthogonal(8, 8, 1, ActivationKind::sigmoid);
    identity_layer.output_weights = Eigen::MatrixXd::Identity(8, 8);
    identity_layer.transform_activation = ActivationKind::identity;

    MlElmModel model;
    model.ae_layers.push_back(identity_layer);
    ElmTrainOptions head_opt;
    head_opt.hidden_dim = 12;
    head_opt.lambda = 1e-3;
    head_opt.activation = ActivationKind::sigmoid;
    head_opt.seed = 2;
    head_opt.batch_size = 50;
    model.head = train_elm(ds, {0, ds.size()}, head_opt).model;
    model.validate();

    Eigen::MatrixXd via_chain = predict_ml(model, ds, {0, ds.size()});
    Eigen::MatrixXd direct = predict(model.head, ds, {0, ds.size()});
    CHECK((via_chain - direct).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("predict_ml matches a layer-by-layer reference loop") {
    DenseDataset ds = synth::random_dense(40, 9, 84);
    MlElmTrainOptions opt = small_options();
    opt.layer_dims = {7, 5};
    MlElmModel model = train_ml_elm(ds, {0, ds.size()}, opt).model;

    Eigen::MatrixXd scores = predict_ml(model, ds, {0, ds.size()});
    for (Eigen::Index i = 0; i < 40; ++i) {
        // forward one instance by hand
        Eigen::MatrixXd cur = ds.x.row(i);
        for (const AeLayer& layer : model.ae_layers) {
            Eigen::MatrixXd z = cur * layer.output_weights.transpose();
            apply_activation(layer.transform_activation, z);
            cur = z;
        }
        Eigen::MatrixXd h = oracle::hidden_reference(cur, model.head.layer);
        const double ref = (h * model.head.output_weights)(0, 0);
        CHECK(scores(i, 0) == Catch::Approx(ref).margin(1e-10));
    }
}

TEST_CASE("prediction is batch-size invariant") {
    DenseDataset ds = synth::random_dense(101, 12, 85);
    MlElmModel model = train_ml_elm(ds, {0, ds.size()}, small_options()).model;
    Eigen::MatrixXd one_go = predict_ml(model, ds, {0, ds.size()}, 101);
    Eigen::MatrixXd tiny_batches = predict_ml(model, ds, {0, ds.size()}, 1);
    Eigen::MatrixXd odd_batches = predict_ml(model, ds, {0, ds.size()}, 13);
    CHECK((one_go - tiny_batches).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((one_go - odd_batches).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("single batch-of-1 equals the matching row of a full batch") {
    DenseDataset ds = synth::random_dense(20, 6, 86);
    MlElmTrainOptions opt = small_options();
    opt.layer_dims = {5};
    MlElmModel model = train_ml_elm(ds, {0, ds.size()}, opt).model;
    Eigen::MatrixXd full = predict_ml(model, ds, {0, 20});
    Eigen::MatrixXd row7 = predict_ml(model, ds, {7, 8});
    CHECK(row7(0, 0) == Catch::Approx(full(7, 0)).margin(1e-14));
}

TEST_CASE("dimension chain violations are rejected") {
    MlElmModel model;
    CHECK_THROWS_AS(model.validate(), ShapeError);  // no AE layers

    AeLayer a;
    a.random = init_orthogonal(6, 4, 1, ActivationKind::sigmoid);
    a.output_weights = Eigen::MatrixXd::Zero(4, 6);
    AeLayer b;
    b.random = init_orthogonal(5, 3, 2, ActivationKind::sigmoid);  // wants 5, gets 4
    b.output_weights = Eigen::MatrixXd::Zero(3, 5);
    model.ae_layers = {a, b};
    model.head.layer = init_random_layer(3, 8, 3, ActivationKind::sigmoid);
    model.head.output_weights = Eigen::MatrixXd::Zero(8, 1);
    CHECK_THROWS_AS(model.validate(), ShapeError);
}

TEST_CASE("single identity-activation AE layer at full rank tracks plain ELM") {
    // D = L with identity transform: the AE becomes an orthogonal rotation
    // of the inputs, so head quality should match plain ELM up to the
    // rotation's effect on the random features
    DenseDataset train = synth::smooth_curve(600, 87);
    DenseDataset test = synth::smooth_curve(300, 88);
    // lift to 6 dims via a fixed smooth map so the rotation is non-trivial
    auto lift = [](const DenseDataset& src) {
        DenseDataset out;
        out.x.resize(src.x.rows(), 6);
        for (Eigen::Index i = 0; i < src.x.rows(); ++i) {
            const double x = src.x(i, 0);
            out.x.row(i) << x, std::sin(x), std::cos(x), std::sin(2 * x), std::cos(2 * x),
                x * x / 8.0;
        }
        out.y = src.y;
        return out;
    };
    DenseDataset ltrain = lift(train), ltest = lift(test);

    double rmse_ml = 0.0, rmse_plain = 0.0;
    {
        MlElmTrainOptions opt;
        opt.layer_dims = {6};
        opt.head_hidden = 60;
        opt.lambda_ae = 1e-8;
        opt.lambda_head = 1e-6;
        opt.activation = ActivationKind::sigmoid;
        opt.identity_transform = true;
        opt.seed = 89;
        opt.batch_size = 600;
        MlElmModel model = train_ml_elm(ltrain, {0, ltrain.size()}, opt).model;
        rmse_ml = oracle::rmse(predict_ml(model, ltest, {0, ltest.size()}).col(0), ltest.y);
    }
    {
        ElmTrainOptions opt;
        opt.hidden_dim = 60;
        opt.lambda = 1e-6;
        opt.activation = ActivationKind::sigmoid;
        opt.seed = hash_u64(89, 0);  // same head seed the ml-elm run derives
        opt.batch_size = 600;
        ElmModel model = train_elm(ltrain, {0, ltrain.size()}, opt).model;
        rmse_plain = oracle::rmse(predict(model, ltest, {0, ltest.size()}).col(0), ltest.y);
    }
    CHECK(rmse_ml < 2.5 * rmse_plain + 0.02);
    CHECK(rmse_plain < 2.5 * rmse_ml + 0.02);
}
