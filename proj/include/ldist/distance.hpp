#pragma once

// Longitudinal distances between prediction traces and the explainer sets
// derived from them.
//
//   d_L(x_i, x)  = mismatches / k
//   d_SL(x_i, x) = weighted mismatches / sum(w), w_e = [C_e(x_i) == y_i]
//   negative     = 1 - positive (agreement counted instead of disagreement)
//
// Values are computed as a single integer division so they are the correctly
// rounded rationals m/k; 1 - v is then exact enough that d + (1 - d) == 1.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ldist/error.hpp"
#include "ldist/parallel.hpp"
#include "ldist/trace.hpp"

namespace ldist {

enum class DistanceKind { Longitudinal, StrictLongitudinal };
enum class Polarity { Positive, Negative };

inline const char* to_string(DistanceKind k) {
    return k == DistanceKind::Longitudinal ? "ld" : "sld";
}
inline const char* to_string(Polarity p) { return p == Polarity::Positive ? "+" : "-"; }

inline DistanceKind parse_distance_kind(const std::string& s) {
    if (s == "ld") return DistanceKind::Longitudinal;
    if (s == "sld") return DistanceKind::StrictLongitudinal;
    throw ValidationError("unknown metric '" + s + "' (expected ld or sld)");
}

/// Slack added to membership thresholds to absorb rounding of m/k values.
inline constexpr double kMembershipSlack = 1e-12;

namespace detail {

inline void check_rows(std::span<const Label> a, std::span<const Label> b) {
    if (a.size() != b.size())
        throw ValidationError("epoch count mismatch: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    if (a.empty()) throw ValidationError("rows need at least one epoch");
}

inline std::size_t mismatches(std::span<const Label> a, std::span<const Label> b) {
    std::size_t m = 0;
    for (std::size_t e = 0; e < a.size(); ++e) m += a[e] != b[e];
    return m;
}

}  // namespace detail

inline double d_longitudinal(std::span<const Label> row_i, std::span<const Label> row_x) {
    detail::check_rows(row_i, row_x);
    return static_cast<double>(detail::mismatches(row_i, row_x)) / static_cast<double>(row_i.size());
}

inline double d_negative(std::span<const Label> row_i, std::span<const Label> row_x) {
    return 1.0 - d_longitudinal(row_i, row_x);
}

struct StrictDistance {
    double value;
    bool zero_weight_sum;  // training row never correct: value forced to 1
};

/// `weights` is the training row's correctness mask. Asymmetric: only the
/// first argument's weights are used.
inline StrictDistance d_strict(std::span<const Label> row_i, std::span<const std::uint8_t> weights,
                               std::span<const Label> row_x) {
    detail::check_rows(row_i, row_x);
    if (weights.size() != row_i.size()) throw ValidationError("weight vector length mismatch");
    std::size_t total = 0, weighted_mismatch = 0;
    for (std::size_t e = 0; e < row_i.size(); ++e) {
        if (weights[e] > 1) throw ValidationError("weights must be binary");
        total += weights[e];
        weighted_mismatch += weights[e] && row_i[e] != row_x[e];
    }
    if (total == 0) return {1.0, true};
    return {static_cast<double>(weighted_mismatch) / static_cast<double>(total), false};
}

struct DistanceVector {
    std::vector<double> values;
    std::vector<std::uint8_t> zero_weight_sum;
    DistanceKind kind = DistanceKind::Longitudinal;
    Polarity polarity = Polarity::Positive;
    std::size_t target = 0;
};

/// Distance from every training row to `target_row`. Workers split the
/// training rows; each output slot is written by exactly one worker.
inline DistanceVector distances_to_all(const TraceMatrix& train, std::span<const Label> target_row,
                                       DistanceKind kind, Polarity polarity, std::size_t target_id = 0,
                                       unsigned workers = 1) {
    const std::size_t k = train.k_epochs();
    if (target_row.size() != k)
        throw ValidationError("epoch mismatch: training trace has " + std::to_string(k) +
                              " epochs, target has " + std::to_string(target_row.size()));
    const bool strict = kind == DistanceKind::StrictLongitudinal;
    if (strict && !train.has_true_labels())
        throw ValidationError("strict longitudinal distance needs training true labels");

    const std::size_t n = train.n_instances();
    DistanceVector dv;
    dv.values.resize(n);
    dv.zero_weight_sum.assign(n, 0);
    dv.kind = kind;
    dv.polarity = polarity;
    dv.target = target_id;
    const std::span<const Label> truth = strict ? train.true_labels() : std::span<const Label>{};
    const double kd = static_cast<double>(k);

    parallel_for(
        n,
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const Label* r = train.row(i).data();
                double d;
                if (!strict) {
                    std::size_t mm = 0;
                    for (std::size_t e = 0; e < k; ++e) mm += r[e] != target_row[e];
                    d = static_cast<double>(mm) / kd;
                } else {
                    const Label y = truth[i];
                    std::size_t total = 0, mm = 0;
                    for (std::size_t e = 0; e < k; ++e) {
                        const bool w = r[e] == y;
                        total += w;
                        mm += w && r[e] != target_row[e];
                    }
                    if (total == 0) {
                        dv.zero_weight_sum[i] = 1;
                        dv.values[i] = 1.0;
                        continue;
                    }
                    d = static_cast<double>(mm) / static_cast<double>(total);
                }
                dv.values[i] = polarity == Polarity::Positive ? d : 1.0 - d;
            }
        },
        workers);
    return dv;
}

struct ExplainerResult {
    double explainer_distance = 0.0;
    std::vector<std::size_t> members;  // ascending
    double epsilon = 0.0;
    Polarity polarity = Polarity::Positive;
    std::size_t training_size = 0;
};

/// Minimum distance and every training index within epsilon of it.
inline ExplainerResult explainer_set(const DistanceVector& dv, double epsilon = 0.0) {
    if (dv.values.empty()) throw ValidationError("explainer set of an empty training set");
    if (!(epsilon >= 0.0)) throw ValidationError("epsilon must be >= 0");
    ExplainerResult r;
    r.explainer_distance = *std::min_element(dv.values.begin(), dv.values.end());
    r.epsilon = epsilon;
    r.polarity = dv.polarity;
    r.training_size = dv.values.size();
    const double threshold = r.explainer_distance + epsilon + kMembershipSlack;
    for (std::size_t i = 0; i < dv.values.size(); ++i)
        if (dv.values[i] <= threshold) r.members.push_back(i);
    return r;
}

struct TaggedMember {
    std::size_t index;
    Polarity polarity;
    friend bool operator==(const TaggedMember&, const TaggedMember&) = default;
};

/// Tagged union of a positive and a negative set. An index in both sets
/// appears twice, once per polarity, positive first.
inline std::vector<TaggedMember> explainer_union(const ExplainerResult& pos, const ExplainerResult& neg) {
    if (pos.training_size == 0 || neg.training_size == 0)
        throw ValidationError("explainer union over an empty training set");
    if (pos.training_size != neg.training_size)
        throw ValidationError("explainer sets come from different training sets");
    std::vector<TaggedMember> out;
    out.reserve(pos.members.size() + neg.members.size());
    for (auto i : pos.members) out.push_back({i, Polarity::Positive});
    for (auto i : neg.members) out.push_back({i, Polarity::Negative});
    std::sort(out.begin(), out.end(), [](const TaggedMember& a, const TaggedMember& b) {
        return a.index != b.index ? a.index < b.index : a.polarity < b.polarity;
    });
    return out;
}

}  // namespace ldist
