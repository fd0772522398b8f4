#include <gtest/gtest.h>

#include <vector>

#include "ldist/dataset.hpp"
#include "ldist/trace_io.hpp"
#include "ldist/trainer.hpp"

using namespace ldist;

namespace {

struct Prepared {
    std::vector<Features> xtr, xte;
    std::vector<Label> ytr, yte;
};

Prepared prepare(std::size_t n_train, std::size_t n_test, std::uint64_t seed = 5) {
    DataConfig cfg;
    cfg.n_train = n_train;
    cfg.n_test = n_test;
    cfg.seed = seed;
    const auto ds = generate(cfg);
    const auto s = fit_standardizer(ds.train);
    return {standardize_all(s, ds.train), standardize_all(s, ds.test), labels_of(ds.train), labels_of(ds.test)};
}

TrainResult<EquationMlp> run(const Prepared& p, const TrainConfig& cfg,
                             const std::function<void(const EpochSnapshot&)>& hook = {}) {
    return train<EquationMlp>(p.xtr, p.ytr, p.xte, p.yte, cfg, hook);
}

}  // namespace

TEST(Train, SingleEpochTraceShape) {
    const auto p = prepare(600, 100);
    TrainConfig cfg;
    cfg.epochs = 1;
    const auto r = run(p, cfg);
    EXPECT_EQ(r.train_trace.k_epochs(), 1u);
    EXPECT_EQ(r.test_trace.k_epochs(), 1u);
    EXPECT_EQ(r.train_trace.n_instances(), 600u);
    EXPECT_EQ(r.test_trace.n_instances(), 100u);
    EXPECT_EQ(r.train_trace.n_classes(), 7u);
    ASSERT_TRUE(r.train_trace.has_true_labels());
    EXPECT_TRUE(std::equal(p.ytr.begin(), p.ytr.end(), r.train_trace.true_labels().begin()));
}

TEST(Train, DeterministicAcrossRuns) {
    const auto p = prepare(1500, 300);
    TrainConfig cfg;
    cfg.epochs = 4;
    const auto a = run(p, cfg);
    const auto b = run(p, cfg);
    EXPECT_EQ(a.model, b.model);
    EXPECT_EQ(encode_trace(a.train_trace), encode_trace(b.train_trace));
    EXPECT_EQ(encode_trace(a.test_trace), encode_trace(b.test_trace));
    cfg.seed = 7;
    EXPECT_NE(run(p, cfg).model, a.model);
}

TEST(Train, FinalTraceColumnMatchesFinalModel) {
    const auto p = prepare(2000, 400);
    TrainConfig cfg;
    cfg.epochs = 3;
    const auto r = run(p, cfg);
    for (std::size_t i = 0; i < p.xte.size(); ++i)
        ASSERT_EQ(r.test_trace.final_prediction(i), predict(r.model, p.xte[i]));
}

TEST(Train, SnapshotsFireEveryEpochWithPostEpochState) {
    const auto p = prepare(800, 200);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.snapshot_weights = true;
    std::vector<std::size_t> epochs;
    std::vector<std::vector<Label>> test_cols;
    const auto r = run(p, cfg, [&](const EpochSnapshot& s) {
        epochs.push_back(s.epoch);
        ASSERT_TRUE(s.weights.has_value());
        EquationMlp m;
        std::copy(s.weights->begin(), s.weights->end(), m.params.begin());
        std::vector<Label> col;
        for (const auto& x : p.xte) col.push_back(predict(m, x));
        EXPECT_TRUE(std::equal(col.begin(), col.end(), s.target_predictions.begin()));
        test_cols.push_back(col);
    });
    EXPECT_EQ(epochs, (std::vector<std::size_t>{1, 2, 3}));
    ASSERT_EQ(r.epoch_weights.size(), 3u);
    for (std::size_t e = 0; e < 3; ++e)
        for (std::size_t i = 0; i < p.xte.size(); ++i) ASSERT_EQ(r.test_trace.at(i, e), test_cols[e][i]);
    EXPECT_TRUE(std::equal(r.epoch_weights.back().begin(), r.epoch_weights.back().end(), r.model.params.begin()));
}

TEST(Train, LearnsAboveChance) {
    const auto p = prepare(10'000, 1000);
    TrainConfig cfg;
    cfg.epochs = 5;
    const auto r = run(p, cfg);
    EXPECT_GT(r.metrics.back().test_accuracy, 0.5);
    EXPECT_LT(r.metrics.back().mean_loss, r.metrics.front().mean_loss);
}

TEST(Train, DivergenceReportsEpochAndBatch) {
    const auto p = prepare(500, 50);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.learning_rate = 1e300;
    try {
        run(p, cfg);
        FAIL() << "expected divergence";
    } catch (const NumericError& e) {
        EXPECT_NE(std::string(e.what()).find("epoch 1"), std::string::npos) << e.what();
    }
}

TEST(Train, ConfigValidation) {
    TrainConfig cfg;
    cfg.epochs = 0;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg = {};
    cfg.batch_size = 0;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg = {};
    cfg.learning_rate = -1;
    EXPECT_THROW(cfg.validate(), ValidationError);
    EXPECT_THROW(train_config_from_json(nlohmann::json::parse(R"({"epochs": 0})")), ValidationError);
    EXPECT_EQ(train_config_from_json(nlohmann::json::parse(R"({"epochs": 3})")).epochs, 3u);
}

TEST(Weights, EncodeDecodeLittleEndian) {
    const auto m = init_model<EquationMlp>(3);
    const auto bytes = encode_weights(m.params);
    ASSERT_EQ(bytes.size(), EquationMlp::kParams * 8);
    EXPECT_EQ(decode_weights<EquationMlp>(bytes), m);

    std::array<double, 1> one{1.0};
    const auto b = encode_weights(one);
    const std::vector<std::uint8_t> expected{0, 0, 0, 0, 0, 0, 0xF0, 0x3F};
    EXPECT_EQ(b, expected);
    EXPECT_THROW(decode_weights<EquationMlp>(b), FormatError);
}
