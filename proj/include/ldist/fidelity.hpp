#pragma once

// Explanation fidelity on data with known generating labels.
//
// For each sampled test target: build the positive explainer set, split it by
// training label, take the largest group's label as the explanation, and
// score it against the target's true label. Selection only ever sees
// prediction traces; ground-truth test labels enter at the scoring step.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldist/distance.hpp"
#include "ldist/error.hpp"
#include "ldist/parallel.hpp"
#include "ldist/random.hpp"
#include "ldist/trace.hpp"

namespace ldist {

struct Majority {
    Label label;
    std::size_t size;
    bool tie;
};

/// Largest same-label group among the members; ties go to the lowest label.
inline Majority explain_by_majority(std::span<const std::size_t> members, std::span<const Label> train_truth) {
    if (members.empty()) throw ValidationError("majority vote over an empty explainer set");
    std::map<Label, std::size_t> counts;
    for (auto i : members) {
        if (i >= train_truth.size()) throw ValidationError("member index out of range");
        ++counts[train_truth[i]];
    }
    Majority best{0, 0, false};
    for (const auto& [label, count] : counts) {
        if (count > best.size) {
            best = {label, count, false};
        } else if (count == best.size) {
            best.tie = true;
        }
    }
    return best;
}

/// Selection result for one target; everything here is derived from traces only.
struct Selection {
    std::size_t target_index;
    DistanceKind kind;
    Label classifier_prediction;
    double explainer_distance;
    std::size_t explainer_set_size;
    Label majority_label;
    std::size_t majority_set_size;
    bool tie_occurred;
};

struct ExplanationOutcome {
    std::size_t target_index;
    Label classifier_prediction;
    Label true_label;
    DistanceKind kind;
    double explainer_distance;
    std::size_t explainer_set_size;
    Label majority_label;
    std::size_t majority_set_size;
    bool explanation_correct;
    bool classifier_correct;
    bool tie_occurred;

    friend bool operator==(const ExplanationOutcome&, const ExplanationOutcome&) = default;
};

struct KindSummary {
    DistanceKind kind;
    std::size_t correct = 0;
    double accuracy = 0.0;
    std::size_t clf_wrong_expl_correct = 0;
    std::size_t clf_wrong_expl_wrong = 0;
    std::size_t ties = 0;
};

struct FidelityReport {
    std::size_t sample_size = 0;
    std::vector<std::size_t> targets;
    std::size_t classifier_correct = 0;
    double classifier_accuracy = 0.0;
    std::vector<KindSummary> per_kind;
    std::vector<ExplanationOutcome> outcomes;  // ordered by target, then kind

    const KindSummary& summary(DistanceKind k) const {
        for (const auto& s : per_kind)
            if (s.kind == k) return s;
        throw ValidationError(std::string("report has no results for metric ") + to_string(k));
    }
};

/// `sample_n` distinct test indices, ascending; a seeded partial shuffle.
inline std::vector<std::size_t> sample_targets(std::size_t n_test, std::size_t sample_n, std::uint64_t seed) {
    if (sample_n > n_test)
        throw ValidationError("sample size " + std::to_string(sample_n) + " exceeds test size " +
                              std::to_string(n_test));
    std::vector<std::size_t> pool(n_test);
    for (std::size_t i = 0; i < n_test; ++i) pool[i] = i;
    Rng rng(derive_seed(seed, SeedRole::Sample));
    for (std::size_t i = 0; i < sample_n; ++i) std::swap(pool[i], pool[i + rng.below(n_test - i)]);
    pool.resize(sample_n);
    std::sort(pool.begin(), pool.end());
    return pool;
}

/// Trace-only selection. `targets` holds rows with predictions only; the
/// test trace's ground truth never reaches this function.
inline std::vector<Selection> select_explanations(const TraceMatrix& train, const TraceMatrix& targets,
                                                  std::span<const std::size_t> indices,
                                                  std::span<const DistanceKind> kinds, double epsilon = 0.0,
                                                  unsigned workers = default_workers()) {
    if (!train.has_true_labels()) throw ValidationError("training trace needs true labels");
    if (train.k_epochs() != targets.k_epochs())
        throw ValidationError("epoch mismatch: train " + std::to_string(train.k_epochs()) + " vs test " +
                              std::to_string(targets.k_epochs()));
    if (train.n_instances() == 0) throw ValidationError("empty training trace");
    for (auto t : indices)
        if (t >= targets.n_instances()) throw ValidationError("target index out of range");

    const auto truth = train.true_labels();
    std::vector<Selection> out(indices.size() * kinds.size());
    parallel_for(
        indices.size(),
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t j = begin; j < end; ++j) {
                const std::size_t t = indices[j];
                for (std::size_t q = 0; q < kinds.size(); ++q) {
                    const auto dv = distances_to_all(train, targets.row(t), kinds[q], Polarity::Positive, t);
                    const auto ex = explainer_set(dv, epsilon);
                    const auto maj = explain_by_majority(ex.members, truth);
                    out[j * kinds.size() + q] = {t,
                                                 kinds[q],
                                                 targets.final_prediction(t),
                                                 ex.explainer_distance,
                                                 ex.members.size(),
                                                 maj.label,
                                                 maj.size,
                                                 maj.tie};
                }
            }
        },
        workers);
    return out;
}

inline FidelityReport score_selections(std::span<const Selection> selections,
                                       std::span<const std::size_t> indices,
                                       std::span<const DistanceKind> kinds, std::span<const Label> test_truth) {
    FidelityReport rep;
    rep.sample_size = indices.size();
    rep.targets.assign(indices.begin(), indices.end());
    for (auto k : kinds) rep.per_kind.push_back({k});
    rep.outcomes.reserve(selections.size());
    for (std::size_t j = 0; j < selections.size(); ++j) {
        const auto& s = selections[j];
        const Label y = test_truth[s.target_index];
        ExplanationOutcome o{s.target_index,       s.classifier_prediction, y,
                             s.kind,               s.explainer_distance,    s.explainer_set_size,
                             s.majority_label,     s.majority_set_size,     s.majority_label == y,
                             s.classifier_prediction == y, s.tie_occurred};
        auto& sum = rep.per_kind[j % kinds.size()];
        sum.correct += o.explanation_correct;
        sum.ties += o.tie_occurred;
        if (!o.classifier_correct) {
            if (o.explanation_correct) ++sum.clf_wrong_expl_correct;
            else ++sum.clf_wrong_expl_wrong;
        }
        if (j % kinds.size() == 0) rep.classifier_correct += o.classifier_correct;
        rep.outcomes.push_back(o);
    }
    const double n = static_cast<double>(rep.sample_size);
    if (rep.sample_size > 0) {
        rep.classifier_accuracy = static_cast<double>(rep.classifier_correct) / n;
        for (auto& s : rep.per_kind) s.accuracy = static_cast<double>(s.correct) / n;
    }
    return rep;
}

inline FidelityReport evaluate(const TraceMatrix& train, const TraceMatrix& test, std::size_t sample_n,
                               std::uint64_t seed, std::span<const DistanceKind> kinds, double epsilon = 0.0,
                               unsigned workers = default_workers()) {
    if (kinds.empty()) throw ValidationError("no metrics requested");
    if (!test.has_true_labels()) throw ValidationError("test trace needs true labels for scoring");
    if (train.k_epochs() != test.k_epochs())
        throw ValidationError("epoch mismatch: train " + std::to_string(train.k_epochs()) + " vs test " +
                              std::to_string(test.k_epochs()));
    const auto indices = sample_targets(test.n_instances(), sample_n, seed);
    const TraceMatrix unlabeled = test.with_true_labels(std::nullopt);
    const auto selections = select_explanations(train, unlabeled, indices, kinds, epsilon, workers);
    return score_selections(selections, indices, kinds, test.true_labels());
}

/// Among targets the classifier got wrong: mean explainer-set size when the
/// explanation was right vs. wrong, and whether some right explanation came
/// from a set smaller than the wrong-explanation mean.
struct SetSizeContrast {
    std::size_t n_correct = 0;
    std::size_t n_wrong = 0;
    std::optional<double> mean_size_correct;
    std::optional<double> mean_size_wrong;
    std::optional<std::size_t> smallest_correct_size;
    bool contrast_case_exists = false;
};

inline SetSizeContrast set_size_contrast(std::span<const ExplanationOutcome> outcomes, DistanceKind kind) {
    SetSizeContrast c;
    double sum_correct = 0, sum_wrong = 0;
    for (const auto& o : outcomes) {
        if (o.kind != kind || o.classifier_correct) continue;
        if (o.explanation_correct) {
            ++c.n_correct;
            sum_correct += static_cast<double>(o.explainer_set_size);
            c.smallest_correct_size = std::min(c.smallest_correct_size.value_or(o.explainer_set_size),
                                               o.explainer_set_size);
        } else {
            ++c.n_wrong;
            sum_wrong += static_cast<double>(o.explainer_set_size);
        }
    }
    if (c.n_correct) c.mean_size_correct = sum_correct / static_cast<double>(c.n_correct);
    if (c.n_wrong) c.mean_size_wrong = sum_wrong / static_cast<double>(c.n_wrong);
    c.contrast_case_exists = c.smallest_correct_size && c.mean_size_wrong &&
                             static_cast<double>(*c.smallest_correct_size) < *c.mean_size_wrong;
    return c;
}

// ---- prediction-sequence analysis ------------------------------------------

inline std::size_t distinct_count(std::span<const Label> seq) {
    if (seq.empty()) throw ValidationError("distinct count of an empty sequence");
    std::vector<Label> v(seq.begin(), seq.end());
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

inline std::size_t change_count(std::span<const Label> seq) {
    if (seq.empty()) throw ValidationError("change count of an empty sequence");
    std::size_t changes = 0;
    for (std::size_t e = 1; e < seq.size(); ++e) changes += seq[e] != seq[e - 1];
    return changes;
}

/// Sample Pearson correlation coefficient.
inline double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw ValidationError("pearson: length mismatch");
    if (xs.size() < 2) throw ValidationError("pearson: need at least two points");
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw ValidationError("pearson: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

enum class AnalysisFilter { ClfWrongExplCorrect, ClfWrongExplWrong, All };

inline AnalysisFilter parse_analysis_filter(const std::string& s) {
    if (s == "clf_wrong_expl_correct") return AnalysisFilter::ClfWrongExplCorrect;
    if (s == "clf_wrong_expl_wrong") return AnalysisFilter::ClfWrongExplWrong;
    if (s == "all") return AnalysisFilter::All;
    throw ValidationError("unknown filter '" + s +
                          "' (expected clf_wrong_expl_correct, clf_wrong_expl_wrong or all)");
}

inline const char* to_string(AnalysisFilter f) {
    switch (f) {
        case AnalysisFilter::ClfWrongExplCorrect: return "clf_wrong_expl_correct";
        case AnalysisFilter::ClfWrongExplWrong: return "clf_wrong_expl_wrong";
        case AnalysisFilter::All: return "all";
    }
    return "?";
}

struct AnalysisRow {
    std::size_t target_index;
    std::size_t explainer_set_size;
    std::size_t majority_set_size;
    std::vector<Label> predictions;
    std::size_t distinct_predictions;
    std::size_t changes;
};

struct AnalysisTable {
    std::vector<AnalysisRow> rows;
    std::optional<double> r_distinct;  // empty when undefined
    std::optional<double> r_changes;
    std::optional<double> mean_explainer_set_size;
};

inline bool passes(const ExplanationOutcome& o, AnalysisFilter f) {
    switch (f) {
        case AnalysisFilter::ClfWrongExplCorrect: return !o.classifier_correct && o.explanation_correct;
        case AnalysisFilter::ClfWrongExplWrong: return !o.classifier_correct && !o.explanation_correct;
        case AnalysisFilter::All: return true;
    }
    return false;
}

inline AnalysisTable analysis_table(std::span<const ExplanationOutcome> outcomes, const TraceMatrix& test,
                                    AnalysisFilter filter, DistanceKind kind = DistanceKind::Longitudinal) {
    AnalysisTable t;
    for (const auto& o : outcomes) {
        if (o.kind != kind || !passes(o, filter)) continue;
        if (o.target_index >= test.n_instances())
            throw ValidationError("outcome target " + std::to_string(o.target_index) + " not in test trace");
        const auto seq = test.row(o.target_index);
        t.rows.push_back({o.target_index, o.explainer_set_size, o.majority_set_size,
                          std::vector<Label>(seq.begin(), seq.end()), distinct_count(seq), change_count(seq)});
    }
    if (t.rows.empty()) return t;

    std::vector<double> sizes, distinct, changes;
    for (const auto& r : t.rows) {
        sizes.push_back(static_cast<double>(r.explainer_set_size));
        distinct.push_back(static_cast<double>(r.distinct_predictions));
        changes.push_back(static_cast<double>(r.changes));
    }
    double total = 0;
    for (double s : sizes) total += s;
    t.mean_explainer_set_size = total / static_cast<double>(sizes.size());

    auto try_pearson = [](std::span<const double> a, std::span<const double> b) -> std::optional<double> {
        try {
            return pearson(a, b);
        } catch (const ValidationError&) {
            return std::nullopt;
        }
    };
    t.r_distinct = try_pearson(sizes, distinct);
    t.r_changes = try_pearson(sizes, changes);
    return t;
}

}  // namespace ldist
