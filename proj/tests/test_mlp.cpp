#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ldist/mlp.hpp"

using namespace ldist;

namespace {

using Small = Mlp<3, 5, 4>;

template <typename Model>
Model random_model(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Model m;
    for (auto& p : m.params) p = u(rng);
    return m;
}

template <typename Model>
typename Model::Input random_input(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    typename Model::Input x;
    for (auto& v : x) v = n(rng);
    return x;
}

// Central finite difference of the mean batch loss, one parameter at a time.
template <typename Model>
Model finite_difference(Model m, const std::vector<typename Model::Input>& xs, const std::vector<Label>& ys,
                        double h) {
    Model g;
    for (std::size_t p = 0; p < Model::kParams; ++p) {
        const double saved = m.params[p];
        m.params[p] = saved + h;
        const double up = batch_loss<Model>(m, xs, ys);
        m.params[p] = saved - h;
        const double down = batch_loss<Model>(m, xs, ys);
        m.params[p] = saved;
        g.params[p] = (up - down) / (2 * h);
    }
    return g;
}

}  // namespace

TEST(InitModel, DeterministicPerSeed) {
    EXPECT_EQ(init_model<EquationMlp>(1), init_model<EquationMlp>(1));
}

TEST(InitModel, DifferentSeedsDiffer) {
    const auto a = init_model<EquationMlp>(1), b = init_model<EquationMlp>(2);
    bool differ = false;
    for (std::size_t p = EquationMlp::kW1; p < EquationMlp::kB1; ++p) differ |= a.params[p] != b.params[p];
    EXPECT_TRUE(differ);
}

TEST(InitModel, ZeroBiasesAndFanInBounds) {
    const auto m = init_model<EquationMlp>(99);
    for (std::size_t h = 0; h < 8; ++h) EXPECT_EQ(m.b1(h), 0.0);
    for (std::size_t o = 0; o < 7; ++o) EXPECT_EQ(m.b2(o), 0.0);
    const double r1 = std::sqrt(6.0 / 4.0), r2 = std::sqrt(6.0 / 8.0);
    for (std::size_t h = 0; h < 8; ++h)
        for (std::size_t i = 0; i < 4; ++i) EXPECT_LE(std::abs(m.w1(h, i)), r1);
    for (std::size_t o = 0; o < 7; ++o)
        for (std::size_t h = 0; h < 8; ++h) EXPECT_LE(std::abs(m.w2(o, h)), r2);
}

TEST(Forward, ZeroModelGivesUniform) {
    const EquationMlp m{};
    const auto p = forward(m, {0, 0, 0, 0});
    for (double v : p) EXPECT_NEAR(v, 1.0 / 7.0, 1e-15);
}

TEST(Forward, OutputsAreDistributions) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const auto m = random_model<EquationMlp>(rng, 3.0);
        const auto p = forward(m, random_input<EquationMlp>(rng));
        double sum = 0;
        for (double v : p) {
            EXPECT_GE(v, 0.0);
            sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-6);
    }
}

TEST(Forward, SoftmaxShiftInvariance) {
    std::mt19937_64 rng(2);
    auto m = random_model<EquationMlp>(rng);
    const auto x = random_input<EquationMlp>(rng);
    const auto before = forward(m, x);
    for (std::size_t o = 0; o < 7; ++o) m.b2(o) += 12.5;
    const auto after = forward(m, x);
    for (std::size_t o = 0; o < 7; ++o) EXPECT_NEAR(before[o], after[o], 1e-15);
}

TEST(Forward, LargeLogitsStayFinite) {
    EquationMlp m{};
    m.b2(3) = 1e4;
    m.b2(4) = -1e4;
    const auto p = forward(m, {0, 0, 0, 0});
    EXPECT_DOUBLE_EQ(p[3], 1.0);
}

TEST(Loss, PerfectPredictionIsZero) {
    std::array<double, 7> p{};
    p[2] = 1.0;
    EXPECT_EQ(loss(p, 2), 0.0);
}

TEST(Loss, UniformIsLogSeven) {
    std::array<double, 7> p;
    p.fill(1.0 / 7.0);
    EXPECT_NEAR(loss(p, 5), 1.9459101490553132, 1e-12);
}

TEST(Loss, FlooredAtTinyProbability) {
    std::array<double, 7> p{};
    p[0] = 1.0;
    EXPECT_NEAR(loss(p, 1), 27.631021115928547, 1e-9);
    EXPECT_THROW(loss(p, 7), ValidationError);
}

TEST(Predict, ArgmaxAndTieBreak) {
    EXPECT_EQ(argmax(std::array<double, 7>{0.1, 0.7, 0.05, 0.05, 0.05, 0.03, 0.02}), 1);
    EXPECT_EQ(argmax(std::array<double, 7>{0.1, 0.1, 0.3, 0.05, 0.05, 0.3, 0.1}), 2);
    const EquationMlp zero{};
    EXPECT_EQ(predict(zero, {1.5, -2.0, 0.3, 4.0}), 0);
}

TEST(Gradients, MatchCentralFiniteDifferences) {
    std::mt19937_64 rng(3);
    for (int config = 0; config < 20; ++config) {
        const auto m = random_model<Small>(rng);
        const std::size_t batch = 1 + rng() % 8;
        std::vector<Small::Input> xs;
        std::vector<Label> ys;
        for (std::size_t s = 0; s < batch; ++s) {
            xs.push_back(random_input<Small>(rng));
            ys.push_back(static_cast<Label>(rng() % 4));
        }
        const auto analytic = gradients<Small>(m, xs, ys);
        const auto numeric = finite_difference(m, xs, ys, 1e-5);
        for (std::size_t p = 0; p < Small::kParams; ++p) {
            const double a = analytic.params[p], n = numeric.params[p];
            if (std::abs(a) < 1e-8 && std::abs(n) < 1e-8) continue;
            EXPECT_LT(std::abs(a - n) / std::max(std::abs(a), std::abs(n)), 1e-4)
                << "config " << config << " param " << p;
        }
    }
}

TEST(Gradients, DuplicatedBatchGivesSameGradient) {
    std::mt19937_64 rng(4);
    const auto m = random_model<EquationMlp>(rng);
    std::vector<EquationMlp::Input> xs;
    std::vector<Label> ys;
    for (int s = 0; s < 5; ++s) {
        xs.push_back(random_input<EquationMlp>(rng));
        ys.push_back(static_cast<Label>(rng() % 7));
    }
    auto xs2 = xs;
    auto ys2 = ys;
    xs2.insert(xs2.end(), xs.begin(), xs.end());
    ys2.insert(ys2.end(), ys.begin(), ys.end());
    const auto g1 = gradients<EquationMlp>(m, xs, ys);
    const auto g2 = gradients<EquationMlp>(m, xs2, ys2);
    for (std::size_t p = 0; p < EquationMlp::kParams; ++p) EXPECT_NEAR(g1.params[p], g2.params[p], 1e-15);
}

// One input presented once with every label, output layer zeroed: the output
// is uniform and the mean of (p - onehot) vanishes, so the point is stationary.
TEST(Gradients, ZeroAtSymmetricStationaryPoint) {
    std::mt19937_64 rng(5);
    auto m = random_model<EquationMlp>(rng);
    for (std::size_t p = EquationMlp::kW2; p < EquationMlp::kParams; ++p) m.params[p] = 0.0;
    const auto x = random_input<EquationMlp>(rng);
    std::vector<EquationMlp::Input> xs(7, x);
    std::vector<Label> ys{0, 1, 2, 3, 4, 5, 6};
    double mean_loss = 0;
    const auto g = gradients<EquationMlp>(m, xs, ys, &mean_loss);
    for (double v : g.params) EXPECT_NEAR(v, 0.0, 1e-15);
    EXPECT_NEAR(mean_loss, std::log(7.0), 1e-12);
}

TEST(Gradients, RejectsEmptyBatch) {
    const EquationMlp m{};
    EXPECT_THROW(gradients<EquationMlp>(m, {}, {}), ValidationError);
}

TEST(Gradients, NonFiniteRaisesNumericError) {
    EquationMlp m{};
    m.w1(0, 0) = NAN;
    std::vector<EquationMlp::Input> xs{{1, 1, 1, 1}};
    std::vector<Label> ys{0};
    EXPECT_THROW(gradients<EquationMlp>(m, xs, ys), NumericError);
}
