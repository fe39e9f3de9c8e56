#include "greenprem/diffusion.hpp"
#include "greenprem/errors.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

using namespace greenprem;

namespace {

// Explicit Euler on the continuous model, fraction of m.
double euler_fraction(double p, double q, double t_end, double dt) {
    double f = 0.0;
    const int steps = static_cast<int>(std::lround(t_end / dt));
    for (int i = 0; i < steps; ++i) f += dt * (p + q * f) * (1.0 - f);
    return f;
}

// Heun (second order) on the same model.
double heun_fraction(double p, double q, double t_end, double dt) {
    auto rate = [&](double f) { return (p + q * f) * (1.0 - f); };
    double f = 0.0;
    const int steps = static_cast<int>(std::lround(t_end / dt));
    for (int i = 0; i < steps; ++i) {
        const double k1 = rate(f);
        const double k2 = rate(f + dt * k1);
        f += 0.5 * dt * (k1 + k2);
    }
    return f;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

PremiumPath random_path(std::mt19937_64& g, int first, int n) {
    PremiumPath path{first, {}};
    std::uniform_real_distribution<double> u(-0.5, 2.0);
    for (int i = 0; i < n; ++i) path.values.push_back(u(g));
    return path;
}

} // namespace

TEST(DecisionCoefficient, Examples) {
    EXPECT_NEAR(decision_coefficient(-0.15, -2.0), 1.30, 1e-12);
    EXPECT_EQ(decision_coefficient(0.0, -7.3), 1.0);
    EXPECT_NEAR(decision_coefficient(0.44, -2.0), 0.12, 1e-12);
}

TEST(BassStep, Examples) {
    const BassParams bp{0.03, 0.38, 100.0, 0.0};
    EXPECT_DOUBLE_EQ(bass_step(bp, 0.0, 1.0), 3.0);
    EXPECT_EQ(bass_step(bp, 100.0, 1.0), 0.0);
    EXPECT_EQ(bass_step(BassParams{0.2, 0.9, 7.0, 0.0}, 7.0, 1.0), 0.0);
    EXPECT_NEAR(bass_step(bp, 50.0, 1.0), 11.0, 1e-12);
}

TEST(BassStep, NegativeDecisionClampsToZero) {
    const BassParams bp{0.03, 0.38, 100.0, 0.0};
    EXPECT_LT(bass_flow(bp, 50.0, -0.5), 0.0);
    EXPECT_EQ(bass_step(bp, 50.0, -0.5), 0.0);
}

TEST(BassParams, Validation) {
    EXPECT_THROW(validate(BassParams{0.0, 0.3, 1.0, 0.0}), ValidationError);
    EXPECT_THROW(validate(BassParams{0.01, -0.1, 1.0, 0.0}), ValidationError);
    EXPECT_THROW(validate(BassParams{0.01, 0.3, 0.0, 0.0}), ValidationError);
    EXPECT_THROW(validate(BassParams{0.01, 0.3, 1.0, NAN}), ValidationError);
    EXPECT_NO_THROW(validate(BassParams{0.01, 0.0, 1.0, -3.0}));
}

TEST(Simulate, SaturatedStartIsFlatZero) {
    const BassParams bp{0.02, 0.4, 50.0, 0.0};
    for (const auto& s : simulate(bp, 2010, 15, 50.0)) {
        EXPECT_EQ(s.new_adopters, 0.0);
        EXPECT_EQ(s.cumulative, 50.0);
    }
}

TEST(Simulate, BetaZeroMatchesVanillaBitwise) {
    std::mt19937_64 g(3);
    for (int trial = 0; trial < 50; ++trial) {
        const BassParams bp{0.001 + 0.02 * trial / 50.0, 0.1 + 0.01 * trial, 1000.0, 0.0};
        const auto path = random_path(g, 2010, 25);
        const auto a = simulate(bp, 2010, 25, 3.0);
        const auto b = simulate(bp, path, 2010, 25, 3.0);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].year, b[i].year);
            EXPECT_TRUE(same_bits(a[i].cumulative, b[i].cumulative));
            EXPECT_TRUE(same_bits(a[i].new_adopters, b[i].new_adopters));
        }
    }
}

TEST(Simulate, MissingPremiumYearIsError) {
    const PremiumPath path{2012, {0.1, 0.1, 0.1}};
    EXPECT_THROW(simulate(BassParams{0.01, 0.3, 1.0, -1.0}, path, 2010, 3), ResolutionError);
    EXPECT_THROW(simulate(BassParams{0.01, 0.3, 1.0, -1.0}, path, 2012, 4), ResolutionError);
    EXPECT_NO_THROW(simulate(BassParams{0.01, 0.3, 1.0, -1.0}, path, 2012, 3));
}

TEST(Simulate, CumulativeMonotoneAndBounded) {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> beta(-8.0, 3.0);
    for (int trial = 0; trial < 300; ++trial) {
        const BassParams bp{0.001 + 0.05 * (trial % 17) / 17.0, 0.05 + 0.9 * (trial % 13) / 13.0, 500.0, beta(g)};
        const auto path = random_path(g, 2000, 40);
        double prev = 0.0;
        for (const auto& s : simulate(bp, path, 2000, 40)) {
            EXPECT_GE(s.cumulative, prev);
            EXPECT_LE(s.cumulative, bp.m);
            EXPECT_GE(s.new_adopters, 0.0);
            prev = s.cumulative;
        }
    }
}

TEST(Simulate, LowerPremiumNeverReducesThatYearsAdopters) {
    std::mt19937_64 g(6);
    std::uniform_real_distribution<double> beta(-6.0, -0.01);
    for (int trial = 0; trial < 300; ++trial) {
        const BassParams bp{0.005, 0.35, 800.0, beta(g)};
        auto path = random_path(g, 2010, 20);
        const auto base = simulate(bp, path, 2010, 20);
        const std::size_t k = static_cast<std::size_t>(trial % 20);
        path.values[k] -= 0.3;
        const auto lowered = simulate(bp, path, 2010, 20);
        EXPECT_GE(lowered[k].new_adopters, base[k].new_adopters);
    }
}

TEST(ClosedForm, Limits) {
    const BassParams bp{0.03, 0.38, 1.0, 0.0};
    EXPECT_EQ(closed_form_cumulative(bp, 0.0), 0.0);
    EXPECT_NEAR(closed_form_cumulative(bp, 200.0), 1.0, 1e-6);
}

TEST(ClosedForm, MatchesFineStepEulerAtTenYears) {
    const double closed = closed_form_cumulative(BassParams{0.03, 0.38, 1.0, 0.0}, 10.0);
    EXPECT_NEAR(euler_fraction(0.03, 0.38, 10.0, 1.0 / 365.0), closed, 1e-3 * closed);
}

TEST(ClosedForm, MatchesFineStepHeunOverGrid) {
    for (const double p : {0.001, 0.01, 0.03, 0.05}) {
        for (const double q : {0.1, 0.38, 0.6}) {
            const double closed = closed_form_cumulative(BassParams{p, q, 1.0, 0.0}, 10.0);
            EXPECT_NEAR(heun_fraction(p, q, 10.0, 1.0 / 365.0), closed, 1e-3 * closed) << "p=" << p << " q=" << q;
        }
    }
}

TEST(ClosedForm, AnnualRecursionTracksContinuousPeak) {
    // Peak year of annual adopters and cumulative at that year, recursion vs closed form.
    int worst_peak_gap = 0;
    double worst_cum_gap = 0.0;
    for (int i = 0; i <= 7; ++i) {
        for (int j = 0; j <= 5; ++j) {
            const double p = 0.001 + (0.05 - 0.001) * i / 7.0;
            const double q = 0.1 + 0.1 * j;
            const BassParams bp{p, q, 1.0, 0.0};
            const auto sim = simulate(bp, 0, 200);
            std::size_t kd = 0;
            for (std::size_t k = 1; k < sim.size(); ++k) {
                if (sim[k].new_adopters > sim[kd].new_adopters) kd = k;
            }
            int kc = 0;
            double best = -1.0;
            for (int k = 0; k < 200; ++k) {
                const double inc = closed_form_cumulative(bp, k + 1.0) - closed_form_cumulative(bp, k);
                if (inc > best) {
                    best = inc;
                    kc = k;
                }
            }
            worst_peak_gap = std::max(worst_peak_gap, std::abs(static_cast<int>(kd) - kc));
            const double fc = closed_form_cumulative(bp, kc + 1.0);
            worst_cum_gap = std::max(worst_cum_gap, std::abs(sim[static_cast<std::size_t>(kc)].cumulative - fc) / fc);
        }
    }
    EXPECT_LE(worst_peak_gap, 1);
    EXPECT_LE(worst_cum_gap, 0.05);
}

TEST(PremiumPath, Lookup) {
    const PremiumPath path{2010, {0.5, 0.25}};
    EXPECT_EQ(path.at(2011), 0.25);
    EXPECT_TRUE(path.covers(2010, 2011));
    EXPECT_FALSE(path.covers(2010, 2012));
    EXPECT_THROW(path.at(2009), ResolutionError);
}
