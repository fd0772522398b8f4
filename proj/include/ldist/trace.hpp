#pragma once

// Prediction traces: the label a classifier assigned to every instance at the
// end of every training epoch, plus optional ground-truth labels.
//
// Layout is instance-major, epoch-minor, so one instance's trace is a
// contiguous span of labels. Epochs are 0-based here; reports print them
// 1-based.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ldist/error.hpp"

namespace ldist {

using Label = std::uint16_t;

inline constexpr std::size_t kMaxEpochs = UINT16_MAX;
inline constexpr std::size_t kMaxClasses = UINT16_MAX;
inline constexpr std::size_t kMaxInstances = UINT32_MAX;

class TraceMatrix {
public:
    TraceMatrix() = default;

    /// Validating constructor over a flat row-major grid.
    TraceMatrix(std::size_t n_instances, std::size_t k_epochs, std::size_t n_classes,
                std::vector<Label> predictions, std::optional<std::vector<Label>> true_labels)
        : n_(n_instances), k_(k_epochs), classes_(n_classes),
          predictions_(std::move(predictions)), true_labels_(std::move(true_labels)) {
        validate();
    }

    std::size_t n_instances() const noexcept { return n_; }
    std::size_t k_epochs() const noexcept { return k_; }
    std::size_t n_classes() const noexcept { return classes_; }

    std::span<const Label> row(std::size_t i) const {
        return std::span<const Label>(predictions_).subspan(i * k_, k_);
    }
    Label at(std::size_t i, std::size_t e) const { return predictions_[i * k_ + e]; }
    Label final_prediction(std::size_t i) const { return at(i, k_ - 1); }

    std::span<const Label> predictions() const noexcept { return predictions_; }

    bool has_true_labels() const noexcept { return true_labels_.has_value(); }
    std::span<const Label> true_labels() const {
        if (!true_labels_) throw ValidationError("trace has no true labels");
        return *true_labels_;
    }

    /// Same predictions, ground truth dropped or replaced.
    TraceMatrix with_true_labels(std::optional<std::vector<Label>> labels) const {
        return TraceMatrix(n_, k_, classes_, predictions_, std::move(labels));
    }

    friend bool operator==(const TraceMatrix&, const TraceMatrix&) = default;

private:
    void validate() const {
        if (k_ == 0) throw ValidationError("trace needs at least one epoch");
        if (k_ > kMaxEpochs) throw ValidationError("k_epochs exceeds 65535");
        if (n_ > kMaxInstances) throw ValidationError("n_instances exceeds 2^32-1");
        if (classes_ < 2 || classes_ > kMaxClasses)
            throw ValidationError("n_classes must be in [2, 65535]");
        if (predictions_.size() != n_ * k_)
            throw ValidationError("prediction grid size " + std::to_string(predictions_.size()) +
                                  " != n_instances * k_epochs");
        for (std::size_t j = 0; j < predictions_.size(); ++j) {
            if (predictions_[j] >= classes_)
                throw ValidationError("prediction label " + std::to_string(predictions_[j]) +
                                      " out of range at instance " + std::to_string(j / k_) +
                                      ", epoch " + std::to_string(j % k_));
        }
        if (true_labels_) {
            if (true_labels_->size() != n_)
                throw ValidationError("true_labels length " + std::to_string(true_labels_->size()) +
                                      " != n_instances " + std::to_string(n_));
            for (std::size_t i = 0; i < n_; ++i) {
                if ((*true_labels_)[i] >= classes_)
                    throw ValidationError("true label out of range at instance " + std::to_string(i));
            }
        }
    }

    std::size_t n_ = 0;
    std::size_t k_ = 0;
    std::size_t classes_ = 0;
    std::vector<Label> predictions_;
    std::optional<std::vector<Label>> true_labels_;
};

/// Builds a trace from a nested grid (one inner vector per instance).
/// Labels arrive as wide integers so negative or oversized values are
/// reported instead of silently truncated.
inline TraceMatrix build_trace(const std::vector<std::vector<long long>>& grid,
                               const std::optional<std::vector<long long>>& true_labels,
                               std::size_t n_classes) {
    if (n_classes < 2) throw ValidationError("n_classes must be >= 2");
    const std::size_t n = grid.size();
    const std::size_t k = n == 0 ? 0 : grid.front().size();
    if (k == 0) throw ValidationError("trace needs at least one epoch");

    auto to_label = [n_classes](long long v, const char* what) {
        if (v < 0 || static_cast<unsigned long long>(v) >= n_classes)
            throw ValidationError(std::string(what) + " " + std::to_string(v) +
                                  " outside [0, " + std::to_string(n_classes) + ")");
        return static_cast<Label>(v);
    };

    std::vector<Label> flat;
    flat.reserve(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        if (grid[i].size() != k)
            throw ValidationError("ragged grid: row " + std::to_string(i) + " has " +
                                  std::to_string(grid[i].size()) + " epochs, expected " +
                                  std::to_string(k));
        for (long long v : grid[i]) flat.push_back(to_label(v, "label"));
    }

    std::optional<std::vector<Label>> truth;
    if (true_labels) {
        if (true_labels->size() != n)
            throw ValidationError("true_labels length mismatch");
        truth.emplace();
        truth->reserve(n);
        for (long long v : *true_labels) truth->push_back(to_label(v, "true label"));
    }
    return TraceMatrix(n, k, n_classes, std::move(flat), std::move(truth));
}

class CorrectnessMask {
public:
    CorrectnessMask(std::size_t n, std::size_t k, std::vector<std::uint8_t> bits)
        : n_(n), k_(k), bits_(std::move(bits)) {}

    std::size_t n_instances() const noexcept { return n_; }
    std::size_t k_epochs() const noexcept { return k_; }
    std::span<const std::uint8_t> row(std::size_t i) const {
        return std::span<const std::uint8_t>(bits_).subspan(i * k_, k_);
    }
    bool at(std::size_t i, std::size_t e) const { return bits_[i * k_ + e] != 0; }

    friend bool operator==(const CorrectnessMask&, const CorrectnessMask&) = default;

private:
    std::size_t n_;
    std::size_t k_;
    std::vector<std::uint8_t> bits_;
};

/// mask[i][e] = 1 exactly when the epoch-e prediction for i equals its true label.
inline CorrectnessMask correctness_mask(const TraceMatrix& trace) {
    if (!trace.has_true_labels())
        throw ValidationError("correctness mask needs true labels");
    const auto truth = trace.true_labels();
    const std::size_t n = trace.n_instances(), k = trace.k_epochs();
    std::vector<std::uint8_t> bits(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = trace.row(i);
        for (std::size_t e = 0; e < k; ++e) bits[i * k + e] = r[e] == truth[i] ? 1 : 0;
    }
    return CorrectnessMask(n, k, std::move(bits));
}

}  // namespace ldist
