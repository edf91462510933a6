#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "taem/registry.hpp"
#include "taem/stats.hpp"

namespace {

using taem::LevelStats;

TEST(OlsFit, ExactLine) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 5; ++i) {
        double x = i;
        pts.emplace_back(x, 2.0 * x + 1.0);
    }
    auto fit = taem::ols_fit(pts);
    EXPECT_NEAR(fit.slope, 2.0, 1e-14);
    EXPECT_NEAR(fit.intercept, 1.0, 1e-14);
    EXPECT_NEAR(fit.r_squared, 1.0, 1e-14);
    EXPECT_NEAR(fit.slope_stderr, 0.0, 1e-13);
    EXPECT_NEAR(fit.slope_ci95.first, 2.0, 1e-12);
    EXPECT_NEAR(fit.slope_ci95.second, 2.0, 1e-12);
    EXPECT_EQ(fit.n_points, 5);
}

TEST(OlsFit, ConfidenceIntervalWidthMatchesStudentT) {
    // Residuals +e, -e around a line leave a known residual variance.
    std::vector<std::pair<double, double>> pts = {
        {0.0, 0.1}, {1.0, 0.9}, {2.0, 2.1}, {3.0, 2.9},
    };
    auto fit = taem::ols_fit(pts);
    EXPECT_GT(fit.slope_stderr, 0.0);
    EXPECT_LT(fit.slope_ci95.first, fit.slope);
    EXPECT_GT(fit.slope_ci95.second, fit.slope);
    // t quantile for 2 degrees of freedom at 97.5% is 4.30265...
    double halfwidth = 0.5 * (fit.slope_ci95.second - fit.slope_ci95.first);
    EXPECT_NEAR(halfwidth / fit.slope_stderr, 4.302652729911275, 1e-9);
}

TEST(OlsFit, DegenerateDesignsThrow) {
    EXPECT_THROW(taem::ols_fit({{0.0, 1.0}, {1.0, 2.0}}), taem::DegenerateDesignError);
    EXPECT_THROW(taem::ols_fit({{1.0, 1.0}, {1.0, 2.0}, {1.0, 3.0}}),
                 taem::DegenerateDesignError);
}

TEST(EstimateRate, RecoversStubbedDecayExactly) {
    for (double alpha : {0.0, 1.0 / 6.0, 0.5}) {
        auto sampler = [alpha](int k, double delta_coarse) {
            LevelStats s;
            s.mean = 3.7 * std::pow(delta_coarse, alpha);
            s.stddev = 0.0;
            s.stderr_ = 0.0;
            s.n_samples = 2;
            return s;
        };
        auto exp = taem::estimate_rate_with(sampler, "stub", 1e-3, 5,
                                            std::vector<std::size_t>(5, 2), 1.0, 0);
        EXPECT_NEAR(exp.fit.slope, alpha, 1e-12);
        ASSERT_EQ(exp.per_level.size(), 5u);
        EXPECT_EQ(exp.per_level[0].k, 1);
        EXPECT_DOUBLE_EQ(exp.per_level[0].delta_coarse, 5e-4);
        EXPECT_DOUBLE_EQ(exp.per_level[0].delta_fine, 2.5e-4);
    }
}

TEST(EstimateRate, RejectsZeroMeanLevel) {
    auto sampler = [](int, double) { return LevelStats{}; };
    EXPECT_THROW(taem::estimate_rate_with(sampler, "stub", 1e-3, 3,
                                          std::vector<std::size_t>(3, 2), 1.0, 0),
                 std::runtime_error);
}

TEST(EstimateRate, SampleCountMismatchThrows) {
    auto sampler = [](int, double) {
        LevelStats s;
        s.mean = 1.0;
        return s;
    };
    EXPECT_THROW(taem::estimate_rate_with(sampler, "stub", 1e-3, 4,
                                          std::vector<std::size_t>(3, 2), 1.0, 0),
                 std::invalid_argument);
}

TEST(EstimateCost, RecoversStubbedScalingExactly) {
    auto sampler = [](std::size_t, double delta, std::size_t n) {
        taem::CostPoint pt;
        pt.delta = delta;
        pt.n_samples = n;
        pt.mean_steps = 42.0 / delta;
        return pt;
    };
    auto exp = taem::estimate_cost_with(sampler, "stub", {1e-3, 5e-4, 2.5e-4, 1.25e-4}, 2, 1.0, 0);
    EXPECT_NEAR(exp.fit.slope, -1.0, 1e-12);
    EXPECT_NEAR(exp.fit.intercept, std::log(42.0), 1e-12);
}

TEST(EstimateCost, TooFewDeltasThrows) {
    auto sampler = [](std::size_t, double delta, std::size_t n) {
        taem::CostPoint pt;
        pt.delta = delta;
        pt.n_samples = n;
        pt.mean_steps = 1.0 / delta;
        return pt;
    };
    EXPECT_THROW(taem::estimate_cost_with(sampler, "stub", {1e-3, 5e-4}, 2, 1.0, 0),
                 taem::DegenerateDesignError);
}

TEST(EstimateRate, EndToEndDeterministicOnSmallRun) {
    const auto& p = taem::get_problem("ex1");
    std::vector<std::size_t> n(3, 8);
    auto a = taem::estimate_rate(p, 1e-2, 3, n, 0.25, 5, taem::LogBase::base10);
    auto b = taem::estimate_rate(p, 1e-2, 3, n, 0.25, 5, taem::LogBase::base10);
    EXPECT_EQ(a.fit.slope, b.fit.slope);
    EXPECT_EQ(a.fit.intercept, b.fit.intercept);
    for (const auto& lvl : a.per_level) {
        EXPECT_GT(lvl.stats.mean, 0.0);
    }
}

TEST(InterceptShift, ConsistentWithIndividualFits) {
    const auto& p = taem::get_problem("ex1");
    std::vector<std::size_t> n(3, 8);
    auto shift = taem::intercept_shift(p, 1e-2, 3, n, 0.25, 0.5, 5, taem::LogBase::base10);
    auto a = taem::estimate_rate(p, 1e-2, 3, n, 0.25, 5, taem::LogBase::base10);
    auto b = taem::estimate_rate(p, 1e-2, 3, n, 0.5, 5, taem::LogBase::base10);
    EXPECT_EQ(shift.intercept_a, a.fit.intercept);
    EXPECT_EQ(shift.intercept_b, b.fit.intercept);
    EXPECT_DOUBLE_EQ(shift.abs_difference, std::abs(a.fit.intercept - b.fit.intercept));
}

}  // namespace
