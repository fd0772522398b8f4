#pragma once

// Mini-batch SGD with an end-of-epoch snapshot hook. After every epoch the
// full train and test sets are re-predicted with the post-epoch model; those
// labels become column e of the two prediction traces.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ldist/error.hpp"
#include "ldist/mlp.hpp"
#include "ldist/parallel.hpp"
#include "ldist/random.hpp"
#include "ldist/trace.hpp"
#include "ldist/trace_io.hpp"

namespace ldist {

struct TrainConfig {
    std::size_t epochs = 15;
    std::size_t batch_size = 128;
    double learning_rate = 0.1;
    std::uint64_t seed = 42;
    bool snapshot_weights = false;

    void validate() const {
        if (epochs < 1 || epochs > kMaxEpochs) throw ValidationError("epochs must be in [1, 65535]");
        if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
            throw ValidationError("learning_rate must be a positive finite number");
    }
};

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("train config must be a JSON object");
    TrainConfig cfg;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "epochs") cfg.epochs = value.get<std::size_t>();
            else if (key == "batch_size") cfg.batch_size = value.get<std::size_t>();
            else if (key == "learning_rate") cfg.learning_rate = value.get<double>();
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "snapshot_weights") cfg.snapshot_weights = value.get<bool>();
            else throw ValidationError("unknown train config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("train config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

inline nlohmann::json to_json(const TrainConfig& cfg) {
    return {{"epochs", cfg.epochs},
            {"batch_size", cfg.batch_size},
            {"learning_rate", cfg.learning_rate},
            {"seed", cfg.seed},
            {"snapshot_weights", cfg.snapshot_weights}};
}

struct EpochSnapshot {
    std::size_t epoch;  // 1-based
    std::span<const Label> train_predictions;
    std::span<const Label> target_predictions;
    std::optional<std::vector<double>> weights;
};

struct EpochMetrics {
    std::size_t epoch;  // 1-based
    double mean_loss;
    double train_accuracy;
    double test_accuracy;
};

template <typename Model>
struct TrainResult {
    Model model;
    TraceMatrix train_trace;
    TraceMatrix test_trace;
    std::vector<EpochMetrics> metrics;
    std::vector<std::vector<double>> epoch_weights;  // filled when snapshot_weights is set
};

template <typename Model>
std::vector<Label> predict_all(const Model& m, std::span<const typename Model::Input> xs) {
    std::vector<Label> out(xs.size());
    parallel_for(xs.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) out[i] = predict(m, xs[i]);
    });
    return out;
}

namespace detail {

inline double accuracy(std::span<const Label> predicted, std::span<const Label> truth) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
    return truth.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace detail

template <typename Model>
TrainResult<Model> train(std::span<const typename Model::Input> train_x, std::span<const Label> train_y,
                         std::span<const typename Model::Input> test_x, std::span<const Label> test_y,
                         const TrainConfig& cfg,
                         const std::function<void(const EpochSnapshot&)>& on_snapshot = {}) {
    cfg.validate();
    if (train_x.empty() || test_x.empty()) throw ValidationError("train and test sets must be non-empty");
    if (train_x.size() != train_y.size() || test_x.size() != test_y.size())
        throw ValidationError("features/labels length mismatch");

    const std::size_t n_train = train_x.size();
    const std::size_t n_test = test_x.size();
    const std::size_t k = cfg.epochs;

    Model model = init_model<Model>(cfg.seed);
    Rng shuffler(derive_seed(cfg.seed, SeedRole::Shuffle));

    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<typename Model::Input> batch_x;
    std::vector<Label> batch_y;
    batch_x.reserve(cfg.batch_size);
    batch_y.reserve(cfg.batch_size);

    std::vector<Label> train_grid(n_train * k), test_grid(n_test * k);
    TrainResult<Model> result;

    for (std::size_t e = 0; e < k; ++e) {
        for (std::size_t i = n_train - 1; i > 0; --i) std::swap(order[i], order[shuffler.below(i + 1)]);

        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n_train; start += cfg.batch_size) {
            const std::size_t stop = std::min(n_train, start + cfg.batch_size);
            batch_x.clear();
            batch_y.clear();
            for (std::size_t j = start; j < stop; ++j) {
                batch_x.push_back(train_x[order[j]]);
                batch_y.push_back(train_y[order[j]]);
            }
            double batch_mean = 0.0;
            Model g;
            try {
                g = gradients(model, std::span<const typename Model::Input>(batch_x),
                              std::span<const Label>(batch_y), &batch_mean);
            } catch (const NumericError& err) {
                throw NumericError("diverged at epoch " + std::to_string(e + 1) + ", batch " +
                                   std::to_string(batches + 1) + ": " + err.what());
            }
            if (!std::isfinite(batch_mean))
                throw NumericError("non-finite loss at epoch " + std::to_string(e + 1) + ", batch " +
                                   std::to_string(batches + 1));
            for (std::size_t p = 0; p < Model::kParams; ++p) model.params[p] -= cfg.learning_rate * g.params[p];
            if (!model.all_finite())
                throw NumericError("non-finite weights at epoch " + std::to_string(e + 1) + ", batch " +
                                   std::to_string(batches + 1));
            loss_sum += batch_mean;
            ++batches;
        }

        const auto train_pred = predict_all(model, train_x);
        const auto test_pred = predict_all(model, test_x);
        for (std::size_t i = 0; i < n_train; ++i) train_grid[i * k + e] = train_pred[i];
        for (std::size_t i = 0; i < n_test; ++i) test_grid[i * k + e] = test_pred[i];

        result.metrics.push_back({e + 1, loss_sum / static_cast<double>(batches),
                                  detail::accuracy(train_pred, train_y),
                                  detail::accuracy(test_pred, test_y)});

        EpochSnapshot snap{e + 1, train_pred, test_pred, std::nullopt};
        if (cfg.snapshot_weights) {
            snap.weights.emplace(model.params.begin(), model.params.end());
            result.epoch_weights.push_back(*snap.weights);
        }
        if (on_snapshot) on_snapshot(snap);
    }

    result.model = model;
    result.train_trace = TraceMatrix(n_train, k, Model::kOutputs, std::move(train_grid),
                                     std::vector<Label>(train_y.begin(), train_y.end()));
    result.test_trace = TraceMatrix(n_test, k, Model::kOutputs, std::move(test_grid),
                                    std::vector<Label>(test_y.begin(), test_y.end()));
    return result;
}

// Weight files: raw little-endian f64 in parameter order (W1, b1, W2, b2).
inline std::vector<std::uint8_t> encode_weights(std::span<const double> params) {
    std::vector<std::uint8_t> out;
    out.reserve(params.size() * 8);
    for (double v : params) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int s = 0; s < 64; s += 8) out.push_back(static_cast<std::uint8_t>((bits >> s) & 0xFF));
    }
    return out;
}

template <typename Model>
Model decode_weights(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != Model::kParams * 8)
        throw FormatError("weight file has " + std::to_string(bytes.size()) + " bytes, expected " +
                          std::to_string(Model::kParams * 8));
    Model m;
    for (std::size_t p = 0; p < Model::kParams; ++p) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[p * 8 + b]) << (8 * b);
        std::memcpy(&m.params[p], &bits, sizeof bits);
    }
    return m;
}

}  // namespace ldist
