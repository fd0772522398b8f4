#pragma once

// One-hidden-layer perceptron: In -> Hidden (ReLU) -> Out (softmax), trained
// with categorical cross-entropy. Parameters live in one flat array in the
// order W1 (row-major, Hidden x In), b1, W2 (row-major, Out x Hidden), b2,
// which is also the on-disk weight order.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "ldist/error.hpp"
#include "ldist/random.hpp"
#include "ldist/trace.hpp"

namespace ldist {

template <std::size_t In, std::size_t Hidden, std::size_t Out>
struct Mlp {
    static_assert(In > 0 && Hidden > 0 && Out >= 2);

    static constexpr std::size_t kInputs = In;
    static constexpr std::size_t kHidden = Hidden;
    static constexpr std::size_t kOutputs = Out;

    static constexpr std::size_t kW1 = 0;
    static constexpr std::size_t kB1 = kW1 + Hidden * In;
    static constexpr std::size_t kW2 = kB1 + Hidden;
    static constexpr std::size_t kB2 = kW2 + Out * Hidden;
    static constexpr std::size_t kParams = kB2 + Out;

    using Input = std::array<double, In>;
    using Output = std::array<double, Out>;

    std::array<double, kParams> params{};

    double& w1(std::size_t h, std::size_t i) { return params[kW1 + h * In + i]; }
    double w1(std::size_t h, std::size_t i) const { return params[kW1 + h * In + i]; }
    double& b1(std::size_t h) { return params[kB1 + h]; }
    double b1(std::size_t h) const { return params[kB1 + h]; }
    double& w2(std::size_t o, std::size_t h) { return params[kW2 + o * Hidden + h]; }
    double w2(std::size_t o, std::size_t h) const { return params[kW2 + o * Hidden + h]; }
    double& b2(std::size_t o) { return params[kB2 + o]; }
    double b2(std::size_t o) const { return params[kB2 + o]; }

    bool all_finite() const {
        return std::all_of(params.begin(), params.end(), [](double v) { return std::isfinite(v); });
    }

    friend bool operator==(const Mlp&, const Mlp&) = default;
};

/// The classifier used for the equation dataset: 4 features, 8 hidden, 7 classes.
using EquationMlp = Mlp<4, 8, 7>;

inline constexpr double kProbabilityFloor = 1e-12;

/// Fan-in scaled uniform weights, zero biases.
template <typename Model>
Model init_model(std::uint64_t seed) {
    Model m;
    Rng rng(derive_seed(seed, SeedRole::Init));
    const double r1 = std::sqrt(6.0 / static_cast<double>(Model::kInputs));
    const double r2 = std::sqrt(6.0 / static_cast<double>(Model::kHidden));
    for (std::size_t p = Model::kW1; p < Model::kB1; ++p) m.params[p] = rng.uniform(-r1, r1);
    for (std::size_t p = Model::kW2; p < Model::kB2; ++p) m.params[p] = rng.uniform(-r2, r2);
    return m;
}

template <typename Model>
struct Activations {
    std::array<double, Model::kHidden> pre{};
    std::array<double, Model::kHidden> hidden{};
    typename Model::Output logits{};
    typename Model::Output probs{};
};

template <std::size_t N>
std::array<double, N> softmax(const std::array<double, N>& logits) {
    const double top = *std::max_element(logits.begin(), logits.end());
    std::array<double, N> p;
    double sum = 0.0;
    for (std::size_t o = 0; o < N; ++o) {
        p[o] = std::exp(logits[o] - top);
        sum += p[o];
    }
    for (auto& v : p) v /= sum;
    return p;
}

template <typename Model>
Activations<Model> forward_full(const Model& m, const typename Model::Input& x) {
    Activations<Model> a;
    for (std::size_t h = 0; h < Model::kHidden; ++h) {
        double z = m.b1(h);
        for (std::size_t i = 0; i < Model::kInputs; ++i) z += m.w1(h, i) * x[i];
        a.pre[h] = z;
        a.hidden[h] = (z > 0.0 || std::isnan(z)) ? z : 0.0;
    }
    for (std::size_t o = 0; o < Model::kOutputs; ++o) {
        double z = m.b2(o);
        for (std::size_t h = 0; h < Model::kHidden; ++h) z += m.w2(o, h) * a.hidden[h];
        a.logits[o] = z;
    }
    a.probs = softmax(a.logits);
    for (double p : a.probs)
        if (!std::isfinite(p)) throw NumericError("non-finite activation in forward pass");
    return a;
}

template <typename Model>
typename Model::Output forward(const Model& m, const typename Model::Input& x) {
    return forward_full(m, x).probs;
}

/// Index of the largest entry; the lowest index wins ties.
template <std::size_t N>
Label argmax(const std::array<double, N>& v) {
    std::size_t best = 0;
    for (std::size_t o = 1; o < N; ++o)
        if (v[o] > v[best]) best = o;
    return static_cast<Label>(best);
}

template <typename Model>
Label predict(const Model& m, const typename Model::Input& x) {
    return argmax(forward(m, x));
}

/// Cross-entropy -log p[label], with p floored at 1e-12.
template <std::size_t N>
double loss(const std::array<double, N>& probs, Label label) {
    if (label >= N) throw ValidationError("label " + std::to_string(label) + " out of range");
    return -std::log(std::max(probs[label], kProbabilityFloor));
}

/// Gradient of the mean batch loss; returned with the same shape as a model.
template <typename Model>
Model gradients(const Model& m, std::span<const typename Model::Input> xs, std::span<const Label> ys,
                double* mean_loss = nullptr) {
    if (xs.empty()) throw ValidationError("gradient needs a non-empty batch");
    if (xs.size() != ys.size()) throw ValidationError("batch features/labels length mismatch");
    Model g;
    double total = 0.0;
    for (std::size_t s = 0; s < xs.size(); ++s) {
        const auto& x = xs[s];
        const Label y = ys[s];
        if (y >= Model::kOutputs) throw ValidationError("label out of range in batch");
        const auto a = forward_full(m, x);
        total += loss(a.probs, y);

        std::array<double, Model::kOutputs> dlogit;
        for (std::size_t o = 0; o < Model::kOutputs; ++o) dlogit[o] = a.probs[o] - (o == y ? 1.0 : 0.0);

        std::array<double, Model::kHidden> dpre{};
        for (std::size_t o = 0; o < Model::kOutputs; ++o) {
            g.b2(o) += dlogit[o];
            for (std::size_t h = 0; h < Model::kHidden; ++h) {
                g.w2(o, h) += dlogit[o] * a.hidden[h];
                dpre[h] += m.w2(o, h) * dlogit[o];
            }
        }
        for (std::size_t h = 0; h < Model::kHidden; ++h) {
            if (a.pre[h] <= 0.0) continue;
            g.b1(h) += dpre[h];
            for (std::size_t i = 0; i < Model::kInputs; ++i) g.w1(h, i) += dpre[h] * x[i];
        }
    }
    const double scale = 1.0 / static_cast<double>(xs.size());
    for (auto& v : g.params) v *= scale;
    if (!g.all_finite()) throw NumericError("non-finite gradient");
    if (mean_loss) *mean_loss = total * scale;
    return g;
}

/// Mean batch loss, used by finite-difference checks.
template <typename Model>
double batch_loss(const Model& m, std::span<const typename Model::Input> xs, std::span<const Label> ys) {
    double total = 0.0;
    for (std::size_t s = 0; s < xs.size(); ++s) total += loss(forward(m, xs[s]), ys[s]);
    return total / static_cast<double>(xs.size());
}

}  // namespace ldist
