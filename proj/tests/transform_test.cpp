#include <gtest/gtest.h>

#include <cmath>

#include "taem/registry.hpp"
#include "taem/transform.hpp"

namespace {

using taem::DriftTransform;
using taem::SdeProblem;

const DriftTransform& ex3_transform() {
    static const DriftTransform tr(taem::get_problem("ex3"), 1024);
    return tr;
}

TEST(DriftTransform, Ex3EndpointSelection) {
    const auto& tr = ex3_transform();
    // Right of xi = 2 the drift goes negative at 3; left of xi = 0 it is
    // negative until -2, where x - x^3 = 6 > 0.
    EXPECT_FALSE(tr.pb1());
    EXPECT_FALSE(tr.pb2());
    EXPECT_DOUBLE_EQ(tr.xi_k1(), 3.0);
    EXPECT_DOUBLE_EQ(tr.xi0(), -2.0);
    EXPECT_GT(tr.K_const(), 4.0);
    EXPECT_GE(tr.H_bound(), 1.0);
}

TEST(DriftTransform, Ex3PropertiesHold) {
    const auto& tr = ex3_transform();
    auto rep = taem::verify_transform(tr, taem::get_problem("ex3"));
    EXPECT_GE(rep.min_phi_prime, 1.0 - 1e-9);
    EXPECT_LE(rep.max_phi_prime, tr.H_bound() + 1e-9);
    EXPECT_LT(rep.max_p4_residual_scaled, 1e-6);
    EXPECT_LT(rep.junction_gap_xi0, 1e-8);
    EXPECT_LT(rep.junction_gap_xik1, 1e-8);
    EXPECT_LT(rep.junction_gap_prime_xi0, 1e-6);
    EXPECT_LT(rep.junction_gap_prime_xik1, 1e-6);
}

TEST(DriftTransform, Ex3ChordAndPsi) {
    const auto& tr = ex3_transform();
    const auto& p = taem::get_problem("ex3");
    EXPECT_DOUBLE_EQ(tr.R(tr.xi0()), p.drift(tr.xi0()));
    EXPECT_DOUBLE_EQ(tr.R(tr.xi_k1()), p.drift(tr.xi_k1()));
    // Inside the core interval Psi is the chord; outside it is the drift
    // scaled by the frozen slope of the linear continuation.
    EXPECT_DOUBLE_EQ(tr.Psi(1.0), tr.R(1.0));
    EXPECT_DOUBLE_EQ(tr.Psi(4.0), tr.phi_prime(4.0) * p.drift(4.0));
    EXPECT_DOUBLE_EQ(tr.Psi(-3.0), tr.phi_prime(-3.0) * p.drift(-3.0));
}

TEST(DriftTransform, Ex3OneSidedConstant) {
    const auto& tr = ex3_transform();
    // The chord slope (b(3) - b(-2)) / 5 = -5.8 dominates the inner piece;
    // all pieces slope downward, so l_psi < 0 and L_psi = l_psi / H.
    EXPECT_LT(tr.l_psi(), 0.0);
    EXPECT_DOUBLE_EQ(tr.L_psi(), tr.l_psi() / tr.H_bound());
}

TEST(DriftTransform, ZeroDriftReducesToAffineMap) {
    // With b = 0 the inner bracket reduces to K and all exponentials are 1,
    // so phi' = K everywhere and K = 1.01 (2 exp(0) + 2) + 1.
    SdeProblem p;
    p.name = "zero-drift";
    p.drift = [](double) { return 0.0; };
    p.diffusion = [](double) { return 1.0; };
    p.xi = {0.0};
    DriftTransform tr(p, 512);
    EXPECT_TRUE(tr.pb1());
    EXPECT_TRUE(tr.pb2());
    EXPECT_DOUBLE_EQ(tr.xi0(), -1.0);
    EXPECT_DOUBLE_EQ(tr.xi_k1(), 1.0);
    EXPECT_NEAR(tr.K_const(), 1.01 * 4.0 + 1.0, 1e-8);
    for (double x : {-2.0, -0.5, 0.0, 0.7, 1.5}) {
        EXPECT_NEAR(tr.phi_prime(x), tr.K_const(), 1e-8) << x;
        EXPECT_NEAR(tr.phi_second(x), 0.0, 1e-8) << x;
        EXPECT_NEAR(tr.Psi(x), 0.0, 1e-12) << x;
    }
    // phi is affine with slope K: phi(x) - phi(0) = K x.
    EXPECT_NEAR(tr.phi(0.5) - tr.phi(0.0), 0.5 * tr.K_const(), 1e-8);
    EXPECT_NEAR(tr.phi(tr.xi0()), p.drift(tr.xi0()), 1e-8);
}

TEST(DriftTransform, RequiresDiscontinuities) {
    SdeProblem p;
    p.name = "smooth";
    p.drift = [](double) { return 0.0; };
    p.diffusion = [](double) { return 1.0; };
    EXPECT_THROW(DriftTransform tr(p), std::invalid_argument);
}

TEST(DriftTransform, PositivityViolationDetected) {
    SdeProblem p;
    p.name = "vanishing-sigma";
    p.drift = [](double) { return 1.0; };
    p.diffusion = [](double x) { return x * x; };
    p.xi = {0.0};
    EXPECT_THROW(DriftTransform tr(p, 256), taem::PositivityError);
}

TEST(DriftTransform, SignSearchFailureDetected) {
    // Left of Xi the drift is positive only on (-0.5, -0.4), which the
    // certification grid sees but the unit-step search never hits.
    SdeProblem p;
    p.name = "hidden-sign";
    p.drift = [](double x) {
        if (x >= 0.0) return 1.0;
        return (x > -0.5 && x < -0.4) ? 1.0 : -1.0;
    };
    p.diffusion = [](double) { return 1.0; };
    p.xi = {0.0};
    EXPECT_THROW(DriftTransform tr(p, 256), taem::SignSearchError);
}

}  // namespace
