// ldist: longitudinal-distance instance attribution from the command line.
//
//   ldist gen-data  --config data.json --out DIR
//   ldist train     --config train.json --data DIR --out DIR
//   ldist explain   --train train.ldtr --test test.ldtr --index I [--metric ld|sld]
//                   [--epsilon E] [--negative] [--union] [--distances FILE]
//   ldist evaluate  --train train.ldtr --test test.ldtr [--n 1000] [--seed S]
//                   [--metrics ld,sld] [--epsilon E] --out DIR
//   ldist analyze   --report fidelity_report.json --test test.ldtr
//                   [--filter clf_wrong_expl_correct] [--metric ld] --out DIR
//   ldist pipeline  [--config run.json] [--seed S] --out DIR
//
// Exit codes: 0 success, 2 usage/validation, 3 I/O, 4 numeric failure.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ldist/commands.hpp"

namespace {

using namespace ldist;

std::vector<DistanceKind> parse_metric_list(const std::string& csv) {
    std::vector<DistanceKind> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_distance_kind(item));
    if (out.empty()) throw ValidationError("--metrics is empty");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Longitudinal-distance instance attribution toolkit"};
    app.require_subcommand(1);

    std::string config, out_dir, data_dir, train_path, test_path, report_path, distances_path;
    std::string metric = "ld", metrics = "ld,sld", filter = "clf_wrong_expl_correct";
    std::size_t index = 0, n = 1000;
    std::uint64_t seed = 42;
    double epsilon = 0.0;
    bool negative = false, union_sets = false;

    auto* gen = app.add_subcommand("gen-data", "Generate the synthetic equation dataset");
    gen->add_option("--config", config, "Data config JSON (defaults if omitted)");
    gen->add_option("--out", out_dir, "Output directory")->required();

    auto* trn = app.add_subcommand("train", "Train the MLP and record per-epoch prediction traces");
    trn->add_option("--config", config, "Train config JSON (defaults if omitted)");
    trn->add_option("--data", data_dir, "Directory holding train.csv and test.csv")->required();
    trn->add_option("--out", out_dir, "Output directory")->required();

    auto* exp = app.add_subcommand("explain", "Explainer sets for one test instance");
    exp->add_option("--train", train_path, "Training trace (.ldtr)")->required();
    exp->add_option("--test", test_path, "Test trace (.ldtr)")->required();
    exp->add_option("--index", index, "Test instance index")->required();
    exp->add_option("--metric", metric, "ld or sld");
    exp->add_option("--epsilon", epsilon, "Precision added to the explainer distance");
    exp->add_flag("--negative", negative, "Also compute the negative explainer set");
    exp->add_flag("--union", union_sets, "Report the tagged union of both sets");
    exp->add_option("--distances", distances_path, "Write the positive distance vector as CSV");

    auto* evl = app.add_subcommand("evaluate", "Explanation fidelity over sampled test instances");
    evl->add_option("--train", train_path, "Training trace (.ldtr)")->required();
    evl->add_option("--test", test_path, "Test trace (.ldtr)")->required();
    evl->add_option("--n", n, "Number of sampled targets");
    evl->add_option("--seed", seed, "Sampling seed");
    evl->add_option("--metrics", metrics, "Comma-separated: ld,sld");
    evl->add_option("--epsilon", epsilon, "Precision added to the explainer distance");
    evl->add_option("--out", out_dir, "Output directory")->required();

    auto* ana = app.add_subcommand("analyze", "Prediction-sequence table for a filtered subset");
    ana->add_option("--report", report_path, "fidelity_report.json from evaluate")->required();
    ana->add_option("--test", test_path, "Test trace the report was computed on")->required();
    ana->add_option("--filter", filter, "clf_wrong_expl_correct | clf_wrong_expl_wrong | all");
    ana->add_option("--metric", metric, "ld or sld");
    ana->add_option("--out", out_dir, "Output directory")->required();

    auto* pipe = app.add_subcommand("pipeline", "gen-data -> train -> evaluate -> analyze");
    pipe->add_option("--config", config, "Run config JSON (defaults if omitted)");
    auto* seed_opt = pipe->add_option("--seed", seed, "Run seed (overrides the config)");
    pipe->add_option("--out", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::Usage);
    }

    try {
        if (gen->parsed()) {
            const DataConfig cfg = config.empty() ? DataConfig{} : data_config_from_json(read_json_file(config));
            const auto out = cmd_gen_data(cfg, out_dir);
            std::cout << "wrote " << out.train_csv.string() << " (" << cfg.n_train << " rows), "
                      << out.test_csv.string() << " (" << cfg.n_test << " rows)\n";
        } else if (trn->parsed()) {
            const TrainConfig cfg = config.empty() ? TrainConfig{} : train_config_from_json(read_json_file(config));
            const auto out = cmd_train(cfg, data_dir, out_dir);
            for (const auto& m : out.metrics)
                std::cout << "epoch " << m.epoch << " loss=" << fixed4(m.mean_loss)
                          << " train_acc=" << fixed4(m.train_accuracy) << " test_acc=" << fixed4(m.test_accuracy)
                          << "\n";
        } else if (exp->parsed()) {
            ExplainArgs args{train_path, test_path, index, parse_distance_kind(metric), epsilon, negative, union_sets,
                             distances_path.empty() ? std::nullopt : std::optional<fs::path>(distances_path)};
            std::cout << cmd_explain(args).dump(2) << "\n";
        } else if (evl->parsed()) {
            EvaluateArgs args{train_path, test_path, n, seed, parse_metric_list(metrics), epsilon, out_dir};
            std::cout << cmd_evaluate(args).summary_line << "\n";
        } else if (ana->parsed()) {
            AnalyzeArgs args{report_path, test_path, parse_analysis_filter(filter), parse_distance_kind(metric),
                             out_dir};
            std::cout << cmd_analyze(args).summary_line << "\n";
        } else if (pipe->parsed()) {
            RunConfig cfg = config.empty() ? RunConfig{} : run_config_from_json(read_json_file(config));
            if (seed_opt->count() > 0) cfg.seed = seed;
            const auto out = cmd_pipeline(cfg, out_dir);
            for (const auto& m : out.model.metrics)
                std::cout << "epoch " << m.epoch << " test_acc=" << fixed4(m.test_accuracy) << "\n";
            std::cout << out.evaluation.summary_line << "\n";
            for (const auto& a : out.analyses) std::cout << a.summary_line << "\n";
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::Io);
    }
    return 0;
}
