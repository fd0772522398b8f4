#pragma once

// Pipeline stages behind the `ldist` command line. Each stage reads and
// writes plain files so any stage can be rerun alone; manifests record the
// SHA-256 of every input and output so a report traces back to its data.
//
// Errors surface as ldist::Error subclasses carrying the exit code.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ldist/dataset.hpp"
#include "ldist/distance.hpp"
#include "ldist/error.hpp"
#include "ldist/fidelity.hpp"
#include "ldist/hash.hpp"
#include "ldist/mlp.hpp"
#include "ldist/trace.hpp"
#include "ldist/trace_io.hpp"
#include "ldist/trainer.hpp"

namespace ldist {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- small file helpers -----------------------------------------------------

inline json read_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": invalid JSON: " + e.what());
    }
}

inline void write_text_file(const fs::path& path, const std::string& text) {
    write_file_bytes(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()),
                                                          text.size()));
}

inline void write_json_file(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

inline void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

inline std::string fixed4(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(4);
    os << v;
    return os.str();
}

// ---- gen-data ---------------------------------------------------------------

struct GenDataOutput {
    fs::path train_csv, test_csv, manifest;
};

inline GenDataOutput cmd_gen_data(const DataConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    ensure_dir(out_dir);
    const Dataset ds = generate(cfg);
    GenDataOutput out{out_dir / "train.csv", out_dir / "test.csv", out_dir / "data_manifest.json"};
    write_csv(ds.train, out.train_csv);
    write_csv(ds.test, out.test_csv);

    json manifest = {
        {"kind", "ldist-data"},
        {"config", to_json(cfg)},
        {"equations", cfg.equations},
        {"interval", {cfg.interval_lo, cfg.interval_hi}},
        {"seed", cfg.seed},
        {"seed_derivation", "splitmix64(seed + 0x1001)"},
        {"n_train", ds.train.size()},
        {"n_test", ds.test.size()},
        {"files",
         {{"train.csv", sha256_file(out.train_csv)}, {"test.csv", sha256_file(out.test_csv)}}},
        {"notes",
         {"labels drawn uniformly over the 7 equations; classes are not balanced exactly",
          "instances are not deduplicated"}},
    };
    write_json_file(out.manifest, manifest);
    return out;
}

// ---- train ------------------------------------------------------------------

struct TrainOutput {
    fs::path train_trace, test_trace, manifest;
    std::vector<EpochMetrics> metrics;
};

inline TrainOutput cmd_train(const TrainConfig& cfg, const fs::path& data_dir, const fs::path& out_dir) {
    cfg.validate();
    const auto train_csv = data_dir / "train.csv";
    const auto test_csv = data_dir / "test.csv";
    if (!fs::exists(train_csv) || !fs::exists(test_csv))
        throw IoError("missing train.csv or test.csv in " + data_dir.string());
    const auto train_set = read_csv(train_csv);
    const auto test_set = read_csv(test_csv);
    if (train_set.empty() || test_set.empty()) throw FormatError("train/test CSV has no rows");

    Standardizer std_ = [&] {
        try {
            return fit_standardizer(train_set);
        } catch (const ValidationError& e) {
            throw NumericError(e.what());
        }
    }();
    const auto xtr = standardize_all(std_, train_set);
    const auto xte = standardize_all(std_, test_set);
    const auto ytr = labels_of(train_set);
    const auto yte = labels_of(test_set);

    ensure_dir(out_dir);
    const auto result = train<EquationMlp>(xtr, ytr, xte, yte, cfg);

    TrainOutput out{out_dir / "train.ldtr", out_dir / "test.ldtr", out_dir / "model_manifest.json",
                    result.metrics};
    write_trace(result.train_trace, out.train_trace);
    write_trace(result.test_trace, out.test_trace);

    json weights = json::array();
    for (std::size_t e = 0; e < result.epoch_weights.size(); ++e) {
        const auto name = "epoch_" + std::to_string(e + 1) + ".wts";
        write_file_bytes(out_dir / name, encode_weights(result.epoch_weights[e]));
        weights.push_back({{"epoch", e + 1}, {"file", name}, {"sha256", sha256_file(out_dir / name)}});
    }
    json epochs = json::array();
    for (const auto& m : result.metrics)
        epochs.push_back({{"epoch", m.epoch},
                          {"mean_loss", m.mean_loss},
                          {"train_accuracy", m.train_accuracy},
                          {"test_accuracy", m.test_accuracy}});

    json inputs = {{"train.csv", sha256_file(train_csv)}, {"test.csv", sha256_file(test_csv)}};
    if (fs::exists(data_dir / "data_manifest.json"))
        inputs["data_manifest.json"] = sha256_file(data_dir / "data_manifest.json");

    json manifest = {
        {"kind", "ldist-model"},
        {"architecture",
         {{"inputs", EquationMlp::kInputs},
          {"hidden", EquationMlp::kHidden},
          {"outputs", EquationMlp::kOutputs},
          {"hidden_activation", "relu"},
          {"output_activation", "softmax"},
          {"loss", "categorical_cross_entropy"},
          {"optimizer", "sgd"},
          {"weight_order", "W1 row-major (8x4), b1, W2 row-major (7x8), b2; little-endian f64"}}},
        {"seed", cfg.seed},
        {"config", to_json(cfg)},
        {"standardizer", {{"mean", std_.mean}, {"stddev", std_.stddev}}},
        {"epochs", epochs},
        {"inputs", inputs},
        {"outputs",
         {{"train.ldtr", sha256_file(out.train_trace)}, {"test.ldtr", sha256_file(out.test_trace)}}},
        {"weights", weights},
    };
    write_json_file(out.manifest, manifest);
    return out;
}

// ---- explain ----------------------------------------------------------------

struct ExplainArgs {
    fs::path train_trace, test_trace;
    std::size_t index = 0;
    DistanceKind metric = DistanceKind::Longitudinal;
    double epsilon = 0.0;
    bool negative = false;
    bool union_sets = false;
    std::optional<fs::path> distances_csv;
};

inline void write_distance_csv(const DistanceVector& dv, const fs::path& path) {
    std::string text = "train_index,distance,flag\n";
    for (std::size_t i = 0; i < dv.values.size(); ++i)
        text += std::to_string(i) + "," + format_double(dv.values[i]) + "," +
                std::to_string(dv.zero_weight_sum[i]) + "\n";
    write_text_file(path, text);
}

inline json cmd_explain(const ExplainArgs& args) {
    const TraceMatrix train = read_trace(args.train_trace);
    const TraceMatrix test = read_trace(args.test_trace);
    if (train.k_epochs() != test.k_epochs())
        throw ValidationError("epoch mismatch: train trace has " + std::to_string(train.k_epochs()) +
                              " epochs, test trace has " + std::to_string(test.k_epochs()));
    if (args.index >= test.n_instances())
        throw ValidationError("index " + std::to_string(args.index) + " out of range (test trace has " +
                              std::to_string(test.n_instances()) + " instances)");
    if (train.n_instances() == 0) throw ValidationError("training trace is empty");
    if (!(args.epsilon >= 0.0)) throw ValidationError("epsilon must be >= 0");

    const auto target = test.row(args.index);
    auto describe = [&](const DistanceVector& dv, const ExplainerResult& ex) {
        json labels = json::array();
        json flagged = json::array();
        for (auto i : ex.members) {
            if (train.has_true_labels()) labels.push_back(train.true_labels()[i]);
            if (dv.zero_weight_sum[i]) flagged.push_back(i);
        }
        std::size_t zero_rows = 0;
        for (auto f : dv.zero_weight_sum) zero_rows += f;
        return json{{"explainer_distance", ex.explainer_distance},
                    {"size", ex.members.size()},
                    {"members", ex.members},
                    {"member_true_labels", train.has_true_labels() ? labels : json(nullptr)},
                    {"flagged_members", flagged},
                    {"zero_weight_training_rows", zero_rows}};
    };

    const unsigned workers = default_workers();
    const auto pos_dv = distances_to_all(train, target, args.metric, Polarity::Positive, args.index, workers);
    const auto pos = explainer_set(pos_dv, args.epsilon);
    if (args.distances_csv) write_distance_csv(pos_dv, *args.distances_csv);

    json out = {{"target_index", args.index},
                {"metric", to_string(args.metric)},
                {"epsilon", args.epsilon},
                {"k_epochs", train.k_epochs()},
                {"target_predictions", std::vector<Label>(target.begin(), target.end())},
                {"positive", describe(pos_dv, pos)}};

    if (args.negative || args.union_sets) {
        const auto neg_dv = distances_to_all(train, target, args.metric, Polarity::Negative, args.index, workers);
        const auto neg = explainer_set(neg_dv, args.epsilon);
        out["negative"] = describe(neg_dv, neg);
        if (args.union_sets) {
            json u = json::array();
            for (const auto& m : explainer_union(pos, neg))
                u.push_back({{"index", m.index}, {"polarity", to_string(m.polarity)}});
            out["union"] = u;
        }
    }
    return out;
}

// ---- evaluate -----------------------------------------------------------------

inline constexpr const char* kOutcomesHeader =
    "target_index,metric,classifier_prediction,true_label,explainer_distance,explainer_set_size,"
    "majority_label,majority_set_size,explanation_correct,classifier_correct,tie_occurred";

inline std::string outcomes_csv(std::span<const ExplanationOutcome> outcomes) {
    std::string text = std::string(kOutcomesHeader) + "\n";
    for (const auto& o : outcomes) {
        text += std::to_string(o.target_index) + "," + to_string(o.kind) + "," +
                std::to_string(o.classifier_prediction) + "," + std::to_string(o.true_label) + "," +
                format_double(o.explainer_distance) + "," + std::to_string(o.explainer_set_size) + "," +
                std::to_string(o.majority_label) + "," + std::to_string(o.majority_set_size) + "," +
                (o.explanation_correct ? "1" : "0") + "," + (o.classifier_correct ? "1" : "0") + "," +
                (o.tie_occurred ? "1" : "0") + "\n";
    }
    return text;
}

inline std::vector<ExplanationOutcome> read_outcomes_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kOutcomesHeader)
        throw FormatError(path.string() + ": missing outcomes header");
    std::vector<ExplanationOutcome> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 11) throw FormatError(path.string() + ": line " + std::to_string(lineno) + ": expected 11 fields");
        try {
            auto u = [](const std::string& s) { return static_cast<std::size_t>(std::stoull(s)); };
            auto flag = [](const std::string& s) {
                if (s != "0" && s != "1") throw std::invalid_argument("flag");
                return s == "1";
            };
            out.push_back({u(f[0]), static_cast<Label>(u(f[2])), static_cast<Label>(u(f[3])),
                           parse_distance_kind(f[1]), std::stod(f[4]), u(f[5]), static_cast<Label>(u(f[6])),
                           u(f[7]), flag(f[8]), flag(f[9]), flag(f[10])});
        } catch (const std::exception&) {
            throw FormatError(path.string() + ": line " + std::to_string(lineno) + ": malformed outcome row");
        }
    }
    return out;
}

struct EvaluateArgs {
    fs::path train_trace, test_trace;
    std::size_t n = 1000;
    std::uint64_t seed = 42;
    std::vector<DistanceKind> metrics{DistanceKind::Longitudinal, DistanceKind::StrictLongitudinal};
    double epsilon = 0.0;
    fs::path out_dir;
};

struct EvaluateOutput {
    FidelityReport report;
    fs::path report_json, outcomes_csv;
    std::string summary_line;
};

inline json contrast_json(const SetSizeContrast& c) {
    auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
    return {{"n_explanation_correct", c.n_correct},
            {"n_explanation_wrong", c.n_wrong},
            {"mean_set_size_explanation_correct", opt(c.mean_size_correct)},
            {"mean_set_size_explanation_wrong", opt(c.mean_size_wrong)},
            {"smallest_set_size_explanation_correct", opt(c.smallest_correct_size)},
            {"small_set_case_exists", c.contrast_case_exists},
            {"statement", c.contrast_case_exists
                              ? "a classifier-wrong target received a correct explanation from a set smaller "
                                "than the mean set of wrong explanations"
                              : "no classifier-wrong target with a correct explanation from a smaller-than-mean "
                                "set occurred in this sample"}};
}

inline EvaluateOutput cmd_evaluate(const EvaluateArgs& args) {
    const TraceMatrix train = read_trace(args.train_trace);
    const TraceMatrix test = read_trace(args.test_trace);
    if (args.metrics.empty()) throw ValidationError("no metrics requested");
    if (!train.has_true_labels()) throw ValidationError("training trace lacks true labels");
    if (!test.has_true_labels()) throw ValidationError("test trace lacks true labels (needed for scoring)");
    if (args.n > test.n_instances())
        throw ValidationError("--n " + std::to_string(args.n) + " exceeds test size " +
                              std::to_string(test.n_instances()));

    EvaluateOutput out;
    out.report = evaluate(train, test, args.n, args.seed, args.metrics, args.epsilon);
    ensure_dir(args.out_dir);
    out.outcomes_csv = args.out_dir / "outcomes.csv";
    out.report_json = args.out_dir / "fidelity_report.json";
    write_text_file(out.outcomes_csv, outcomes_csv(out.report.outcomes));

    const auto& rep = out.report;
    json per_metric = json::object();
    for (const auto& s : rep.per_kind) {
        per_metric[to_string(s.kind)] = {{"correct", s.correct},
                                         {"accuracy", s.accuracy},
                                         {"clf_wrong_expl_correct", s.clf_wrong_expl_correct},
                                         {"clf_wrong_expl_wrong", s.clf_wrong_expl_wrong},
                                         {"majority_ties", s.ties},
                                         {"classifier_wrong_set_sizes",
                                          contrast_json(set_size_contrast(rep.outcomes, s.kind))}};
    }
    json metrics = json::array();
    for (auto k : args.metrics) metrics.push_back(to_string(k));

    json report = {
        {"kind", "ldist-fidelity-report"},
        {"sample_size", rep.sample_size},
        {"seed", args.seed},
        {"seed_derivation", "splitmix64(seed + 0x4004)"},
        {"epsilon", args.epsilon},
        {"metrics", metrics},
        {"classifier", {{"correct", rep.classifier_correct}, {"accuracy", rep.classifier_accuracy}}},
        {"explanation", per_metric},
        {"inputs",
         {{"train_trace_sha256", sha256_file(args.train_trace)},
          {"test_trace_sha256", sha256_file(args.test_trace)}}},
        {"outcomes", {{"file", "outcomes.csv"}, {"sha256", sha256_file(out.outcomes_csv)}}},
        {"reference_targets",
         {{"annotation", "non-reproducible: equations unpublished"},
          {"sample_size", 1000},
          {"correct_ld", 978},
          {"correct_sld", 980},
          {"classifier_correct", 968},
          {"clf_wrong_expl_correct_ld", 10},
          {"clf_wrong_expl_correct_sld", 12},
          {"mean_set_size_clf_wrong_expl_correct", 274},
          {"mean_set_size_clf_wrong_expl_wrong", 23239},
          {"r_distinct_clf_wrong_expl_correct", 0.60},
          {"r_changes_clf_wrong_expl_correct", 0.74},
          {"r_distinct_clf_wrong_expl_wrong", 0.82},
          {"r_changes_clf_wrong_expl_wrong", 0.72}}},
        {"notes",
         {"majority ties resolved toward the lowest label; tie count reported per metric",
          "sampled targets are distinct test indices; test instances themselves are not deduplicated",
          "classifier correctness uses the final-epoch prediction",
          "accuracy is per run"}},
    };
    write_json_file(out.report_json, report);

    std::string line;
    for (const auto& s : rep.per_kind) line += std::string("acc_") + to_string(s.kind) + "=" + fixed4(s.accuracy) + " ";
    line += "acc_clf=" + fixed4(rep.classifier_accuracy);
    out.summary_line = line;
    return out;
}

// ---- analyze ------------------------------------------------------------------

inline constexpr const char* kAnalysisHeader =
    "explainer_set_size,majority_label_set_size,predictions,distinct_predictions,changes";

inline std::string analysis_csv(const AnalysisTable& t) {
    std::string text = std::string(kAnalysisHeader) + "\n";
    for (const auto& r : t.rows) {
        std::string seq;
        for (std::size_t e = 0; e < r.predictions.size(); ++e) {
            if (e) seq += ';';
            seq += std::to_string(r.predictions[e]);
        }
        text += std::to_string(r.explainer_set_size) + "," + std::to_string(r.majority_set_size) + "," + seq +
                "," + std::to_string(r.distinct_predictions) + "," + std::to_string(r.changes) + "\n";
    }
    return text;
}

struct AnalyzeArgs {
    fs::path report_json, test_trace;
    AnalysisFilter filter = AnalysisFilter::ClfWrongExplCorrect;
    DistanceKind metric = DistanceKind::Longitudinal;
    fs::path out_dir;
};

struct AnalyzeOutput {
    AnalysisTable table;
    fs::path csv, summary;
    std::string summary_line;
};

inline AnalyzeOutput cmd_analyze(const AnalyzeArgs& args) {
    const json report = read_json_file(args.report_json);
    std::string expected_test, outcomes_name, expected_outcomes;
    try {
        expected_test = report.at("inputs").at("test_trace_sha256").get<std::string>();
        outcomes_name = report.at("outcomes").at("file").get<std::string>();
        expected_outcomes = report.at("outcomes").at("sha256").get<std::string>();
    } catch (const json::exception& e) {
        throw ValidationError(args.report_json.string() + ": not a fidelity report: " + e.what());
    }
    if (sha256_file(args.test_trace) != expected_test)
        throw ValidationError("test trace " + args.test_trace.string() + " does not match the report's run hash");
    const auto outcomes_path = args.report_json.parent_path() / outcomes_name;
    if (sha256_file(outcomes_path) != expected_outcomes)
        throw ValidationError("outcomes file " + outcomes_path.string() + " does not match the report's hash");

    const TraceMatrix test = read_trace(args.test_trace);
    const auto outcomes = read_outcomes_csv(outcomes_path);

    AnalyzeOutput out;
    out.table = analysis_table(outcomes, test, args.filter, args.metric);
    ensure_dir(args.out_dir);
    const std::string stem = std::string("analysis_") + to_string(args.filter) + "_" + to_string(args.metric);
    out.csv = args.out_dir / (stem + ".csv");
    out.summary = args.out_dir / (stem + ".json");
    write_text_file(out.csv, analysis_csv(out.table));

    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json("undefined"); };
    json summary = {{"kind", "ldist-analysis"},
                    {"filter", to_string(args.filter)},
                    {"metric", to_string(args.metric)},
                    {"rows", out.table.rows.size()},
                    {"r_distinct", opt(out.table.r_distinct)},
                    {"r_changes", opt(out.table.r_changes)},
                    {"mean_explainer_set_size", out.table.mean_explainer_set_size
                                                     ? json(*out.table.mean_explainer_set_size)
                                                     : json(nullptr)},
                    {"inputs",
                     {{"report_sha256", sha256_file(args.report_json)},
                      {"test_trace_sha256", expected_test}}},
                    {"csv_sha256", sha256_file(out.csv)}};
    write_json_file(out.summary, summary);

    auto txt = [](const std::optional<double>& v) { return v ? fixed4(*v) : std::string("undefined"); };
    out.summary_line = std::string("filter=") + to_string(args.filter) + " rows=" +
                       std::to_string(out.table.rows.size()) + " r_distinct=" + txt(out.table.r_distinct) +
                       " r_changes=" + txt(out.table.r_changes);
    return out;
}

// ---- pipeline -----------------------------------------------------------------

struct RunConfig {
    std::uint64_t seed = 42;
    DataConfig data;
    TrainConfig train;
    std::size_t sample_n = 1000;
    double epsilon = 0.0;
    std::vector<DistanceKind> metrics{DistanceKind::Longitudinal, DistanceKind::StrictLongitudinal};

    /// Fans the single run seed out to every stage.
    void apply_seed() {
        data.seed = seed;
        train.seed = seed;
    }
};

inline RunConfig run_config_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("run config must be a JSON object");
    RunConfig cfg;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "seed") {
                cfg.seed = value.get<std::uint64_t>();
            } else if (key == "data") {
                if (value.contains("seed")) throw ValidationError("data.seed not allowed: the run seed is used");
                cfg.data = data_config_from_json(value);
            } else if (key == "train") {
                if (value.contains("seed")) throw ValidationError("train.seed not allowed: the run seed is used");
                cfg.train = train_config_from_json(value);
            } else if (key == "evaluate") {
                for (const auto& [ek, ev] : value.items()) {
                    if (ek == "n") cfg.sample_n = ev.get<std::size_t>();
                    else if (ek == "epsilon") cfg.epsilon = ev.get<double>();
                    else if (ek == "metrics") {
                        cfg.metrics.clear();
                        for (const auto& m : ev) cfg.metrics.push_back(parse_distance_kind(m.get<std::string>()));
                    } else throw ValidationError("unknown evaluate key '" + ek + "'");
                }
            } else {
                throw ValidationError("unknown run config key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("run config: ") + e.what());
    }
    if (!(cfg.epsilon >= 0.0)) throw ValidationError("epsilon must be >= 0");
    if (cfg.metrics.empty()) throw ValidationError("evaluate.metrics is empty");
    cfg.apply_seed();
    return cfg;
}

struct PipelineOutput {
    GenDataOutput data;
    TrainOutput model;
    EvaluateOutput evaluation;
    std::vector<AnalyzeOutput> analyses;
    fs::path run_manifest;
};

inline PipelineOutput cmd_pipeline(RunConfig cfg, const fs::path& out_dir) {
    cfg.apply_seed();
    ensure_dir(out_dir);
    PipelineOutput out;
    out.data = cmd_gen_data(cfg.data, out_dir / "data");
    out.model = cmd_train(cfg.train, out_dir / "data", out_dir / "model");

    EvaluateArgs ev;
    ev.train_trace = out.model.train_trace;
    ev.test_trace = out.model.test_trace;
    ev.n = cfg.sample_n;
    ev.seed = cfg.seed;
    ev.metrics = cfg.metrics;
    ev.epsilon = cfg.epsilon;
    ev.out_dir = out_dir / "report";
    out.evaluation = cmd_evaluate(ev);

    json analyses = json::array();
    for (auto metric : cfg.metrics) {
        for (auto filter : {AnalysisFilter::ClfWrongExplCorrect, AnalysisFilter::ClfWrongExplWrong}) {
            AnalyzeArgs an{out.evaluation.report_json, out.model.test_trace, filter, metric, out_dir / "analysis"};
            out.analyses.push_back(cmd_analyze(an));
            analyses.push_back({{"file", fs::relative(out.analyses.back().summary, out_dir).generic_string()},
                                {"sha256", sha256_file(out.analyses.back().summary)}});
        }
    }

    auto rel = [&](const fs::path& p) { return fs::relative(p, out_dir).generic_string(); };
    json metrics = json::array();
    for (auto k : cfg.metrics) metrics.push_back(to_string(k));
    json manifest = {
        {"kind", "ldist-run"},
        {"seed", cfg.seed},
        {"config",
         {{"data", to_json(cfg.data)},
          {"train", to_json(cfg.train)},
          {"evaluate", {{"n", cfg.sample_n}, {"epsilon", cfg.epsilon}, {"metrics", metrics}}}}},
        {"chain",
         {{"data_manifest", {{"file", rel(out.data.manifest)}, {"sha256", sha256_file(out.data.manifest)}}},
          {"model_manifest", {{"file", rel(out.model.manifest)}, {"sha256", sha256_file(out.model.manifest)}}},
          {"report", {{"file", rel(out.evaluation.report_json)}, {"sha256", sha256_file(out.evaluation.report_json)}}},
          {"analyses", analyses}}},
        {"summary", out.evaluation.summary_line},
    };
    out.run_manifest = out_dir / "run_manifest.json";
    write_json_file(out.run_manifest, manifest);
    return out;
}

}  // namespace ldist
