#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "elmkit/dataset.hpp"
#include "elmkit/elm.hpp"
#include "elmkit/embedding.hpp"
#include "elmkit/errors.hpp"
#include "elmkit/metrics.hpp"
#include "elmkit/ml_elm.hpp"
#include "elmkit/model_io.hpp"
#include "elmkit/schema.hpp"
#include "elmkit/split.hpp"

namespace elmkit {

enum class Command { train, eval, predict, pretrain_emb };
enum class InputMode { hashed, embedded };

inline const char* command_name(Command c) {
    switch (c) {
        case Command::train: return "train";
        case Command::eval: return "eval";
        case Command::predict: return "predict";
        case Command::pretrain_emb: return "pretrain-emb";
    }
    return "?";
}

inline const char* mode_name(InputMode m) {
    return m == InputMode::hashed ? "hashed" : "embedded";
}

inline InputMode mode_from_name(std::string_view s) {
    if (s == "hashed") return InputMode::hashed;
    if (s == "embedded") return InputMode::embedded;
    throw ConfigError("mode must be hashed or embedded, got \"" + std::string(s) + "\"");
}

/// Classification threshold: a fixed value ("fixed:0.5") or tuned on the
/// evaluation split ("tuned").
struct ThresholdSpec {
    bool tuned = false;
    double fixed = 0.5;

    static ThresholdSpec parse(std::string_view s) {
        ThresholdSpec t;
        if (s == "tuned") {
            t.tuned = true;
            return t;
        }
        if (s.rfind("fixed:", 0) == 0) {
            const std::string_view v = s.substr(6);
            const char* last = v.data() + v.size();
            auto [ptr, ec] = std::from_chars(v.data(), last, t.fixed);
            if (ec == std::errc() && ptr == last) return t;
        }
        throw ConfigError("threshold must be tuned or fixed:<x>, got \"" + std::string(s) + "\"");
    }

    std::string str() const {
        if (tuned) return "tuned";
        std::ostringstream os;
        os << "fixed:" << fixed;
        return os.str();
    }
};

/// Parses "500;500" style layer lists.
inline std::vector<std::size_t> parse_layer_dims(std::string_view s) {
    std::vector<std::size_t> dims;
    if (s.empty()) return dims;
    std::size_t start = 0;
    for (std::size_t pos = 0; pos <= s.size(); ++pos) {
        if (pos < s.size() && s[pos] != ';') continue;
        const std::string_view part = s.substr(start, pos - start);
        start = pos + 1;
        unsigned long long v = 0;
        const char* last = part.data() + part.size();
        auto [ptr, ec] = std::from_chars(part.data(), last, v);
        if (ec != std::errc() || ptr != last || v == 0)
            throw ConfigError("bad layer dims \"" + std::string(s) + "\" (want e.g. 500;500)");
        dims.push_back(std::size_t(v));
    }
    return dims;
}

inline std::array<double, 3> parse_split(std::string_view s) {
    std::array<double, 3> r{};
    std::size_t start = 0, k = 0;
    for (std::size_t pos = 0; pos <= s.size(); ++pos) {
        if (pos < s.size() && s[pos] != ',') continue;
        const std::string_view part = s.substr(start, pos - start);
        start = pos + 1;
        if (k >= 3) throw ConfigError("split wants three ratios, e.g. 0.8,0.1,0.1");
        const char* last = part.data() + part.size();
        auto [ptr, ec] = std::from_chars(part.data(), last, r[k]);
        if (ec != std::errc() || ptr != last)
            throw ConfigError("bad split ratio \"" + std::string(part) + "\"");
        ++k;
    }
    if (k != 3) throw ConfigError("split wants three ratios, e.g. 0.8,0.1,0.1");
    return r;
}

/// Everything a run needs, resolved before any data is touched. Defaults
/// reproduce the reference configuration: batch 10000, 1000 hidden ReLU
/// units, embedding dim 8, 8/1/1 split.
struct RunConfig {
    Command command = Command::train;
    std::string data_path;
    std::string schema_path;
    std::string model_out;
    std::string model_in;
    std::string emb_table;
    std::string metrics_out;
    std::string scores_out;

    InputMode mode = InputMode::hashed;
    std::size_t hash_dims = 4096;
    std::size_t hidden = 1000;
    std::vector<std::size_t> layers;  // non-empty selects ML-ELM
    double lambda = 1e-2;
    double lambda_ae = 1e-2;
    ActivationKind activation = ActivationKind::relu;
    std::uint64_t seed = 42;
    std::size_t batch_size = 10000;
    std::array<double, 3> split{0.8, 0.1, 0.1};
    bool shuffle_split = false;
    ThresholdSpec threshold;
    std::string eval_split = "test";  // train | validation | test | all

    std::size_t emb_dim = 8;
    std::size_t emb_buckets = 65536;
    double learning_rate = 0.05;
    std::size_t epochs = 1;

    bool is_ml_elm() const { return !layers.empty(); }
};

/// All configuration checks; must run (and throw) before any dataset byte
/// is read.
inline void validate(const RunConfig& cfg) {
    if (cfg.data_path.empty()) throw ConfigError("--data is required");
    if (cfg.schema_path.empty()) throw ConfigError("--schema is required");
    switch (cfg.command) {
        case Command::train:
            if (cfg.model_out.empty()) throw ConfigError("--train requires --model-out");
            break;
        case Command::eval:
            if (cfg.model_in.empty()) throw ConfigError("--eval requires --model-in");
            break;
        case Command::predict:
            if (cfg.model_in.empty()) throw ConfigError("--predict requires --model-in");
            if (cfg.scores_out.empty()) throw ConfigError("--predict requires --scores-out");
            break;
        case Command::pretrain_emb:
            if (cfg.emb_table.empty())
                throw ConfigError("--pretrain-emb requires --emb-table (output path)");
            break;
    }
    if (cfg.mode == InputMode::embedded && cfg.command != Command::pretrain_emb &&
        cfg.emb_table.empty())
        throw ConfigError("embedded mode requires --emb-table");
    if (cfg.hash_dims < 1) throw ConfigError("--hash-dims must be >= 1");
    if (cfg.hidden < 1) throw ConfigError("--hidden must be >= 1");
    if (cfg.batch_size < 1) throw ConfigError("--batch-size must be >= 1");
    if (cfg.lambda < 0.0) throw ConfigError("--lambda must be non-negative");
    if (cfg.lambda_ae < 0.0) throw ConfigError("--lambda-ae must be non-negative");
    for (std::size_t l : cfg.layers)
        if (l < 1) throw ConfigError("--layers entries must be >= 1");
    if (cfg.emb_dim < 1) throw ConfigError("--emb-dim must be >= 1");
    if (cfg.emb_buckets < 1) throw ConfigError("--emb-buckets must be >= 1");
    if (!(cfg.learning_rate >= 0.0)) throw ConfigError("--learning-rate must be non-negative");
    if (cfg.epochs < 1) throw ConfigError("--epochs must be >= 1");
    if (cfg.command != Command::predict) validate_ratios(cfg.split);
    if (cfg.eval_split != "train" && cfg.eval_split != "validation" && cfg.eval_split != "test" &&
        cfg.eval_split != "all")
        throw ConfigError("--eval-split must be train|validation|test|all");
    // a shuffled training split cannot be reconstructed at eval time
    if (cfg.command == Command::eval && cfg.shuffle_split && cfg.eval_split != "all")
        throw ConfigError("--shuffle-split splits are not reproducible by --eval; use --eval-split all");
}

inline std::string format_split(const std::array<double, 3>& r) {
    std::ostringstream os;
    os << r[0] << ',' << r[1] << ',' << r[2];
    return os.str();
}

inline std::string format_layers(const std::vector<std::size_t>& dims) {
    std::ostringstream os;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) os << ';';
        os << dims[i];
    }
    return os.str();
}

/// Echo of the effective configuration, one "config key=value" line per
/// knob. Every run starts with this so results stay attributable.
inline void echo_config(const RunConfig& cfg, std::ostream& out) {
    out << "config command=" << command_name(cfg.command) << '\n'
        << "config data=" << cfg.data_path << '\n'
        << "config schema=" << cfg.schema_path << '\n'
        << "config mode=" << mode_name(cfg.mode) << '\n'
        << "config model=" << (cfg.is_ml_elm() ? "ml-elm" : "elm") << '\n'
        << "config hash_dims=" << cfg.hash_dims << '\n'
        << "config hidden=" << cfg.hidden << '\n'
        << "config layers=" << format_layers(cfg.layers) << '\n'
        << "config lambda=" << cfg.lambda << '\n'
        << "config lambda_ae=" << cfg.lambda_ae << '\n'
        << "config activation=" << activation_name(cfg.activation) << '\n'
        << "config seed=" << cfg.seed << '\n'
        << "config batch_size=" << cfg.batch_size << '\n'
        << "config split=" << format_split(cfg.split) << '\n'
        << "config shuffle_split=" << (cfg.shuffle_split ? "true" : "false") << '\n'
        << "config threshold=" << cfg.threshold.str() << '\n'
        << "config emb_dim=" << cfg.emb_dim << '\n'
        << "config emb_buckets=" << cfg.emb_buckets << '\n'
        << "config learning_rate=" << cfg.learning_rate << '\n'
        << "config epochs=" << cfg.epochs << '\n';
    if (!cfg.model_out.empty()) out << "config model_out=" << cfg.model_out << '\n';
    if (!cfg.model_in.empty()) out << "config model_in=" << cfg.model_in << '\n';
    if (!cfg.emb_table.empty()) out << "config emb_table=" << cfg.emb_table << '\n';
    if (!cfg.metrics_out.empty()) out << "config metrics_out=" << cfg.metrics_out << '\n';
    if (!cfg.scores_out.empty()) out << "config scores_out=" << cfg.scores_out << '\n';
    if (cfg.command == Command::eval) out << "config eval_split=" << cfg.eval_split << '\n';
}

namespace detail {

template <typename Dataset>
std::vector<int> int_labels(const Dataset& ds, IndexRange r) {
    const Eigen::VectorXd y = ds.labels(r);
    std::vector<int> out(std::size_t(y.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) out[std::size_t(i)] = y[i] > 0.5 ? 1 : 0;
    return out;
}

template <typename Dataset>
std::vector<double> model_scores(const AnyModel& model, const Dataset& ds, IndexRange r,
                                 std::size_t batch_size) {
    Eigen::VectorXd s = std::visit(
        [&](const auto& m) -> Eigen::VectorXd {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, ElmModel>)
                return predict(m, ds, r, batch_size).col(0);
            else
                return predict_ml(m, ds, r, batch_size).col(0);
        },
        model);
    return {s.data(), s.data() + s.size()};
}

inline MetricReport report_with_threshold(std::span<const double> scores,
                                          std::span<const int> labels,
                                          const ThresholdSpec& spec) {
    const double t = spec.tuned ? tune_threshold(scores, labels) : spec.fixed;
    return evaluate(scores, labels, t);
}

inline void print_report(std::ostream& out, std::string_view name, const MetricReport& r) {
    out << std::left << std::setw(10) << "model" << std::right << std::setw(10) << "logloss"
        << std::setw(10) << "auc" << std::setw(10) << "f1" << std::setw(10) << "precision"
        << std::setw(10) << "recall" << std::setw(12) << "threshold" << '\n';
    out << std::left << std::setw(10) << name << std::right << std::fixed
        << std::setprecision(5) << std::setw(10) << r.logloss << std::setw(10) << r.auc
        << std::setw(10) << r.f1 << std::setw(10) << r.precision << std::setw(10) << r.recall
        << std::setw(12) << r.threshold << '\n';
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);
}

inline void print_timing(std::ostream& out, const TimingReport& t) {
    out << "timing batches=" << t.batches << " batch_time=" << std::fixed << std::setprecision(5)
        << t.batch_seconds_mean << " total_s=" << std::setprecision(3) << t.total_seconds
        << " instances_per_s=" << std::setprecision(0) << t.instances_per_second << '\n';
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);
}

inline void write_metrics_file(const std::string& path, const RunConfig& cfg,
                               const MetricReport* report, const TimingReport* timing) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << std::setprecision(17);
    out << "command=" << command_name(cfg.command) << '\n';
    out << "seed=" << cfg.seed << '\n';
    if (report) {
        out << "logloss=" << report->logloss << '\n'
            << "auc=" << report->auc << '\n'
            << "precision=" << report->precision << '\n'
            << "recall=" << report->recall << '\n'
            << "f1=" << report->f1 << '\n'
            << "threshold=" << report->threshold << '\n'
            << "positives=" << report->positives << '\n'
            << "negatives=" << report->negatives << '\n';
    }
    if (timing) {
        out << "batches=" << timing->batches << '\n'
            << "batch_seconds_mean=" << timing->batch_seconds_mean << '\n'
            << "total_seconds=" << timing->total_seconds << '\n'
            << "instances=" << timing->instances << '\n'
            << "instances_per_second=" << timing->instances_per_second << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

inline IndexRange select_split(const SplitRanges& s, std::string_view name, std::size_t n) {
    if (name == "train") return s.train;
    if (name == "validation") return s.validation;
    if (name == "test") return s.test;
    return {0, n};
}

}  // namespace detail

/// Train one model (ELM or ML-ELM depending on --layers), report validation
/// metrics and timing, and write the model file.
template <typename Dataset>
int run_train_on(const RunConfig& cfg, Dataset& data, std::ostream& out) {
    if (cfg.shuffle_split) data.apply_order(shuffled_indices(data.size(), cfg.seed));
    const SplitRanges splits = split_dataset(data.size(), {cfg.split, cfg.seed});

    TimingReport timing;
    AnyModel model{ElmModel{}};
    if (cfg.is_ml_elm()) {
        MlElmTrainOptions opt;
        opt.layer_dims = cfg.layers;
        opt.head_hidden = cfg.hidden;
        opt.lambda_ae = cfg.lambda_ae;
        opt.lambda_head = cfg.lambda;
        opt.activation = cfg.activation;
        opt.seed = cfg.seed;
        opt.batch_size = cfg.batch_size;
        MlElmTrainResult r = train_ml_elm(data, splits.train, opt);
        timing = r.timing;
        model = std::move(r.model);
    } else {
        ElmTrainOptions opt;
        opt.hidden_dim = cfg.hidden;
        opt.lambda = cfg.lambda;
        opt.activation = cfg.activation;
        opt.seed = cfg.seed;
        opt.batch_size = cfg.batch_size;
        ElmTrainResult r = train_elm(data, splits.train, opt);
        timing = r.timing;
        model = std::move(r.model);
    }

    std::visit([&](const auto& m) { save_model(m, cfg.model_out); }, model);
    out << "model written to " << cfg.model_out << '\n';
    detail::print_timing(out, timing);

    std::optional<MetricReport> report;
    if (!splits.validation.empty()) {
        const auto scores = detail::model_scores(model, data, splits.validation, cfg.batch_size);
        const auto labels = detail::int_labels(data, splits.validation);
        report = detail::report_with_threshold(scores, labels, cfg.threshold);
        out << "validation metrics:\n";
        detail::print_report(out, cfg.is_ml_elm() ? "ml-elm" : "elm", *report);
    } else {
        out << "validation split empty; no metrics\n";
    }
    if (!cfg.metrics_out.empty())
        detail::write_metrics_file(cfg.metrics_out, cfg, report ? &*report : nullptr, &timing);
    return 0;
}

inline int run_train(const RunConfig& cfg, std::ostream& out) {
    const FeatureSchema schema = load_schema(cfg.schema_path);
    if (cfg.mode == InputMode::hashed) {
        EncodedDataset data = load_encoded(cfg.data_path, schema, cfg.hash_dims, cfg.seed);
        return run_train_on(cfg, data, out);
    }
    const EmbeddingTable table = load_table(cfg.emb_table);
    if (table.fields.size() != schema.fields.size())
        throw ShapeError("embedding table has " + std::to_string(table.fields.size()) +
                         " fields, schema has " + std::to_string(schema.fields.size()));
    const std::vector<RawRecord> records = load_records(cfg.data_path, schema);
    DenseDataset data = embed_dataset(records, table);
    return run_train_on(cfg, data, out);
}

namespace detail {

/// Rebuilds the dataset exactly as the model saw it at training time:
/// hashed mode re-encodes with the model's own input width and seed.
inline EncodedDataset load_for_model(const RunConfig& cfg, const FeatureSchema& schema,
                                     const AnyModel& model) {
    const std::uint64_t seed = std::visit(
        [](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, ElmModel>)
                return m.layer.seed;
            else
                return m.seed;
        },
        model);
    return load_encoded(cfg.data_path, schema, model_input_dim(model), seed);
}

template <typename Dataset>
int eval_on(const RunConfig& cfg, const AnyModel& model, const Dataset& data, std::ostream& out) {
    IndexRange range{0, data.size()};
    if (cfg.eval_split != "all")
        range = detail::select_split(split_dataset(data.size(), {cfg.split, cfg.seed}),
                                     cfg.eval_split, data.size());
    if (range.empty()) throw DataError("evaluation split is empty");
    const auto scores = detail::model_scores(model, data, range, cfg.batch_size);
    const auto labels = detail::int_labels(data, range);
    const MetricReport report = detail::report_with_threshold(scores, labels, cfg.threshold);
    out << cfg.eval_split << " metrics:\n";
    detail::print_report(out, std::holds_alternative<ElmModel>(model) ? "elm" : "ml-elm", report);
    if (!cfg.metrics_out.empty())
        detail::write_metrics_file(cfg.metrics_out, cfg, &report, nullptr);
    return 0;
}

}  // namespace detail

inline int run_eval(const RunConfig& cfg, std::ostream& out) {
    const FeatureSchema schema = load_schema(cfg.schema_path);
    const AnyModel model = load_model(cfg.model_in);
    if (cfg.mode == InputMode::hashed) {
        const EncodedDataset data = detail::load_for_model(cfg, schema, model);
        return detail::eval_on(cfg, model, data, out);
    }
    const EmbeddingTable table = load_table(cfg.emb_table);
    if (table.fields.size() != schema.fields.size())
        throw ShapeError("embedding table/schema field count mismatch");
    if (table.output_dim() != model_input_dim(model))
        throw ShapeError("embedding table yields " + std::to_string(table.output_dim()) +
                         " dims, model expects " + std::to_string(model_input_dim(model)));
    const std::vector<RawRecord> records = load_records(cfg.data_path, schema);
    const DenseDataset data = embed_dataset(records, table);
    return detail::eval_on(cfg, model, data, out);
}

/// Scores the whole input file, one score per line, order preserving.
inline int run_predict(const RunConfig& cfg, std::ostream& out) {
    const FeatureSchema schema = load_schema(cfg.schema_path);
    const AnyModel model = load_model(cfg.model_in);

    std::vector<double> scores;
    if (cfg.mode == InputMode::hashed) {
        const EncodedDataset data = detail::load_for_model(cfg, schema, model);
        scores = detail::model_scores(model, data, {0, data.size()}, cfg.batch_size);
    } else {
        const EmbeddingTable table = load_table(cfg.emb_table);
        if (table.fields.size() != schema.fields.size())
            throw ShapeError("embedding table/schema field count mismatch");
        if (table.output_dim() != model_input_dim(model))
            throw ShapeError("embedding table/model dimension mismatch");
        const std::vector<RawRecord> records = load_records(cfg.data_path, schema);
        const DenseDataset data = embed_dataset(records, table);
        scores = detail::model_scores(model, data, {0, data.size()}, cfg.batch_size);
    }

    std::ofstream sf(cfg.scores_out);
    if (!sf) throw DataError("cannot open for writing: " + cfg.scores_out);
    sf << std::setprecision(17);
    for (double s : scores) sf << s << '\n';
    if (!sf) throw DataError("write failed: " + cfg.scores_out);
    out << scores.size() << " scores written to " << cfg.scores_out << '\n';
    return 0;
}

/// Pretrains the embedding surrogate on the training split and writes the
/// table; reports the surrogate's own validation AUC when a validation
/// split exists.
inline int run_pretrain_emb(const RunConfig& cfg, std::ostream& out) {
    const FeatureSchema schema = load_schema(cfg.schema_path);
    std::vector<RawRecord> records = load_records(cfg.data_path, schema);
    if (cfg.shuffle_split) {
        const auto order = shuffled_indices(records.size(), cfg.seed);
        std::vector<RawRecord> next(records.size());
        for (std::size_t i = 0; i < order.size(); ++i) next[i] = std::move(records[order[i]]);
        records = std::move(next);
    }
    const SplitRanges splits = split_dataset(records.size(), {cfg.split, cfg.seed});

    EmbeddingPretrainOptions opt;
    opt.dim = cfg.emb_dim;
    opt.bucket_counts = {cfg.emb_buckets};
    opt.epochs = cfg.epochs;
    opt.learning_rate = cfg.learning_rate;
    opt.seed = cfg.seed;
    const std::span<const RawRecord> train(records.data() + splits.train.begin,
                                           splits.train.size());
    const EmbeddingPretrainResult result = pretrain_surrogate(train, schema, opt);

    save_table(result.table, cfg.emb_table);
    out << "embedding table written to " << cfg.emb_table << '\n';
    out << "surrogate loss: first_decile=" << std::setprecision(5) << result.first_decile_loss
        << " last_decile=" << result.last_decile_loss << '\n';

    if (!splits.validation.empty()) {
        std::vector<double> scores;
        std::vector<int> labels;
        scores.reserve(splits.validation.size());
        labels.reserve(splits.validation.size());
        for (std::size_t i = splits.validation.begin; i < splits.validation.end; ++i) {
            scores.push_back(result.score(records[i]));
            labels.push_back(records[i].label);
        }
        out << "surrogate validation auc=" << auc(scores, labels) << '\n';
    }
    return 0;
}

/// Dispatch. Throws; the binary's main translates exceptions to exit codes.
inline int run(const RunConfig& cfg, std::ostream& out) {
    validate(cfg);
    echo_config(cfg, out);
    switch (cfg.command) {
        case Command::train: return run_train(cfg, out);
        case Command::eval: return run_eval(cfg, out);
        case Command::predict: return run_predict(cfg, out);
        case Command::pretrain_emb: return run_pretrain_emb(cfg, out);
    }
    return 1;
}

}  // namespace elmkit
