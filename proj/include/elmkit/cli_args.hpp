#pragma once

#include <string>

#include <CLI11.hpp>

#include "elmkit/cli.hpp"

namespace elmkit {

/// Raw flag values as CLI11 collects them; resolve() turns them into a
/// validated RunConfig.
struct ArgValues {
    bool train = false;
    bool eval = false;
    bool predict = false;
    bool pretrain_emb = false;

    RunConfig cfg;  // numeric/path fields bound directly
    std::string mode = "hashed";
    std::string activation = "relu";
    std::string layers;
    std::string split = "0.8,0.1,0.1";
    std::string threshold = "fixed:0.5";
};

inline void attach_options(CLI::App& app, ArgValues& v) {
    app.add_flag("--train", v.train, "train a model");
    app.add_flag("--eval", v.eval, "evaluate a saved model");
    app.add_flag("--predict", v.predict, "score a file with a saved model");
    app.add_flag("--pretrain-emb", v.pretrain_emb, "pretrain an embedding table");

    app.add_option("--data", v.cfg.data_path, "delimited data file");
    app.add_option("--schema", v.cfg.schema_path, "schema description file");
    app.add_option("--model-out", v.cfg.model_out, "where to write the trained model");
    app.add_option("--model-in", v.cfg.model_in, "saved model to load");
    app.add_option("--mode", v.mode, "input mode: hashed|embedded");
    app.add_option("--emb-table", v.cfg.emb_table, "embedding table file");
    app.add_option("--hash-dims", v.cfg.hash_dims, "feature-hashing dimensionality");
    app.add_option("--hidden", v.cfg.hidden, "hidden units (ELM head)");
    app.add_option("--layers", v.layers, "ML-ELM AE layer dims, e.g. 500;500");
    app.add_option("--lambda", v.cfg.lambda, "ridge regularizer for output weights");
    app.add_option("--lambda-ae", v.cfg.lambda_ae, "ridge regularizer for AE layers");
    app.add_option("--activation", v.activation, "sigmoid|sine|rbf|relu");
    app.add_option("--seed", v.cfg.seed, "run seed; all randomness derives from it");
    app.add_option("--batch-size", v.cfg.batch_size, "streaming batch size");
    app.add_option("--split", v.split, "train,validation,test ratios");
    app.add_flag("--shuffle-split", v.cfg.shuffle_split, "shuffle before splitting (seeded)");
    app.add_option("--threshold", v.threshold, "F1 threshold: fixed:<x>|tuned");
    app.add_option("--metrics-out", v.cfg.metrics_out, "write metrics as key=value lines");
    app.add_option("--scores-out", v.cfg.scores_out, "score file for --predict");
    app.add_option("--eval-split", v.cfg.eval_split, "train|validation|test|all");
    app.add_option("--emb-dim", v.cfg.emb_dim, "embedding dimension");
    app.add_option("--emb-buckets", v.cfg.emb_buckets, "hash buckets per field");
    app.add_option("--learning-rate", v.cfg.learning_rate, "surrogate pretrainer step size");
    app.add_option("--epochs", v.cfg.epochs, "surrogate pretrainer epochs");
    app.set_config("--config", "", "read options from a config file (flags win)");
}

inline RunConfig resolve(const ArgValues& v) {
    const int commands = int(v.train) + int(v.eval) + int(v.predict) + int(v.pretrain_emb);
    if (commands != 1)
        throw ConfigError("exactly one of --train, --eval, --predict, --pretrain-emb is required");

    RunConfig cfg = v.cfg;
    if (v.train) cfg.command = Command::train;
    if (v.eval) cfg.command = Command::eval;
    if (v.predict) cfg.command = Command::predict;
    if (v.pretrain_emb) cfg.command = Command::pretrain_emb;
    cfg.mode = mode_from_name(v.mode);
    cfg.activation = activation_from_name(v.activation);
    cfg.layers = parse_layer_dims(v.layers);
    cfg.split = parse_split(v.split);
    cfg.threshold = ThresholdSpec::parse(v.threshold);
    validate(cfg);
    return cfg;
}

}  // namespace elmkit
