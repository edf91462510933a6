#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "taem/registry.hpp"

namespace {

using taem::SdeProblem;

TEST(Registry, HasAllBuiltins) {
    const auto& reg = taem::builtin_problems();
    EXPECT_EQ(reg.size(), 4u);
    for (const char* name : {"ex1", "ex2", "ex3", "ex4"}) {
        EXPECT_NO_THROW(taem::get_problem(name));
    }
}

TEST(Registry, UnknownNameThrowsWithListing) {
    try {
        taem::get_problem("ex9");
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("ex9"), std::string::npos);
        EXPECT_NE(msg.find("ex1"), std::string::npos);
        EXPECT_NE(msg.find("ex4"), std::string::npos);
    }
}

TEST(Registry, Ex1Constants) {
    const auto& p = taem::get_problem("ex1");
    EXPECT_EQ(p.x0, 0.0);
    EXPECT_EQ(p.xi, std::vector<double>({0.0}));
    EXPECT_EQ(p.p0, 20.0);
    EXPECT_EQ(p.l, 2.0);
    EXPECT_EQ(p.m, 1.0);
    EXPECT_DOUBLE_EQ(p.alpha, 1.0 / 6.0);
    EXPECT_EQ(p.gamma, -1.0);
    ASSERT_TRUE(p.one_sided_lipschitz.has_value());
    EXPECT_EQ(*p.one_sided_lipschitz, -1.0);
    EXPECT_EQ(p.table_constant_label, "L1");
    // Coefficient spot checks on both sides of the discontinuity.
    EXPECT_DOUBLE_EQ(p.drift(1.0), -2.0);
    EXPECT_DOUBLE_EQ(p.drift(-1.0), 3.0);
    EXPECT_DOUBLE_EQ(p.drift(0.0), 0.0);
    EXPECT_DOUBLE_EQ(p.diffusion(1.0), 4.0);
    EXPECT_DOUBLE_EQ(p.diffusion(-2.0), 0.0);
    EXPECT_DOUBLE_EQ(p.diffusion(0.0), 1.0);
}

TEST(Registry, Ex3Constants) {
    const auto& p = taem::get_problem("ex3");
    EXPECT_EQ(p.x0, 0.2);
    EXPECT_EQ(p.xi, std::vector<double>({0.0, 2.0}));
    EXPECT_EQ(p.p0, 26.0);
    EXPECT_EQ(p.gamma, -1.0);
    EXPECT_EQ(p.table_constant_label, "L2");
    EXPECT_DOUBLE_EQ(p.drift(3.0), 1.0 + 3.0 - 27.0);
    EXPECT_DOUBLE_EQ(p.drift(1.0), 2.0);
    EXPECT_DOUBLE_EQ(p.drift(-1.0), 0.0);
    EXPECT_DOUBLE_EQ(p.diffusion(0.0), 1.0);
}

TEST(Registry, Ex4Constants) {
    const auto& p = taem::get_problem("ex4");
    EXPECT_EQ(p.x0, 0.0);
    EXPECT_EQ(p.l, 1.0);
    EXPECT_DOUBLE_EQ(p.m, 4.0 / 3.0);
    EXPECT_EQ(p.gamma, 1.0);
    EXPECT_DOUBLE_EQ(p.drift(-2.0), -2.0);
    EXPECT_DOUBLE_EQ(p.drift(1.0), 2.0);
    EXPECT_DOUBLE_EQ(p.diffusion(8.0), 5.0);
}

TEST(Registry, SigmaPositiveNearDiscontinuities) {
    for (const auto& [name, p] : taem::builtin_problems()) {
        EXPECT_GT(p.nu, 0.0) << name;
        for (double xi : p.xi) {
            EXPECT_GT(p.diffusion(xi), 0.0) << name << " at " << xi;
        }
    }
}

TEST(Registry, Epsilon0Values) {
    // Single discontinuity: eps0 = mu = 0.5.  Two points at gap 2 with
    // mu = half the gap: eps0 = 1.
    EXPECT_DOUBLE_EQ(taem::epsilon0(taem::get_problem("ex1")), 0.5);
    EXPECT_DOUBLE_EQ(taem::epsilon0(taem::get_problem("ex3")), 1.0);
    EXPECT_DOUBLE_EQ(taem::epsilon0(taem::get_problem("ex4")), 1.0);
}

TEST(Problem, DistToXi) {
    const auto& p3 = taem::get_problem("ex3");
    EXPECT_DOUBLE_EQ(taem::dist_to_xi(1.2, p3), 0.8);
    EXPECT_DOUBLE_EQ(taem::dist_to_xi(-0.3, p3), 0.3);
    EXPECT_DOUBLE_EQ(taem::dist_to_xi(5.0, p3), 3.0);

    SdeProblem empty;
    empty.name = "empty";
    EXPECT_TRUE(std::isinf(taem::dist_to_xi(0.0, empty)));
    EXPECT_THROW(taem::epsilon0(empty), std::invalid_argument);
}

TEST(Problem, OneSidedLipschitzHoldsOnRandomPairs) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (const char* name : {"ex1", "ex2"}) {
        const auto& p = taem::get_problem(name);
        double L = *p.one_sided_lipschitz;
        for (int i = 0; i < 20000; ++i) {
            double x = u(rng), y = u(rng);
            double lhs = (x - y) * (p.drift(x) - p.drift(y));
            double rhs = L * (x - y) * (x - y);
            EXPECT_LE(lhs, rhs + 1e-9 * (1.0 + std::abs(rhs))) << name;
        }
    }
}

TEST(Problem, DissipativityBoundOnGrid) {
    // x b(x) + (p0-1)/2 sigma^2(x) <= gamma x^2 + eta on the certification
    // window, with eta the stored grid constant.
    const auto& p = taem::get_problem("ex1");
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 20000; ++i) {
        double x = u(rng);
        double s = p.diffusion(x);
        double lhs = x * p.drift(x) + 0.5 * (p.p0 - 1.0) * s * s;
        double rhs = p.gamma * x * x + p.eta;
        EXPECT_LE(lhs, rhs + 1e-6 * (1.0 + std::abs(rhs)));
    }
}

}  // namespace
