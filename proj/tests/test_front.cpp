#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "frontlab/front.hpp"

using namespace frontlab;

namespace {

// gradient of k dotted with the field, evaluated by hand
double k_derivative(const ModelParams& p, const FrontState& s) {
    const FrontState f = front_field(p, s);
    return f[2] + p.c * f[0] + p.epsilon / p.kappa * f[3] + p.c / p.kappa * f[1];
}

FrontState rk4(const ModelParams& p, FrontState x, double z_end, int steps) {
    const double h = z_end / steps;
    auto add = [](const FrontState& a, const FrontState& b, double s) {
        FrontState r;
        for (int i = 0; i < 4; ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    for (int n = 0; n < steps; ++n) {
        const FrontState k1 = front_field(p, x);
        const FrontState k2 = front_field(p, add(x, k1, h / 2));
        const FrontState k3 = front_field(p, add(x, k2, h / 2));
        const FrontState k4 = front_field(p, add(x, k3, h));
        for (int i = 0; i < 4; ++i) x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return x;
}

}  // namespace

TEST(FrontField, ConservedQuantityIsAFirstIntegral) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (double eps : {0.0, 0.2, 0.5, 0.9}) {
        ModelParams p;
        p.epsilon = eps;
        p.kappa = 1.4;
        p.c = 0.7;
        for (int t = 0; t < 200; ++t) {
            FrontState s{u(rng), u(rng), u(rng), eps > 0.0 ? u(rng) : 0.0};
            EXPECT_NEAR(k_derivative(p, s), 0.0, 1e-14);
        }
    }
}

TEST(FrontField, FourDimensionalFormNeedsPositiveEpsilon) {
    ModelParams p;
    p.epsilon = 0.0;
    EXPECT_THROW(vector_field(p, {1, 0, 0, 0}), std::invalid_argument);
}

TEST(FrontField, EndPointEigenvaluesMatchLinearization) {
    ModelParams p;
    p.epsilon = 0.0;
    p.kappa = 1.3;
    p.c = 0.6;
    auto check = [](const Eigen::Matrix3d& j, std::array<double, 3> expected) {
        Eigen::EigenSolver<Eigen::Matrix3d> es(j);
        std::array<double, 3> got;
        for (int i = 0; i < 3; ++i) {
            EXPECT_NEAR(es.eigenvalues()(i).imag(), 0.0, 1e-12);
            got[i] = es.eigenvalues()(i).real();
        }
        std::sort(got.begin(), got.end());
        std::sort(expected.begin(), expected.end());
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[i], expected[i], 1e-7);
    };
    check(reduced_jacobian(p, {0.0, 1.0, 0.0, 0.0}), unburned_eigenvalues(p));
    check(reduced_jacobian(p, {1.0 / p.kappa, 0.0, 0.0, 0.0}), burned_eigenvalues(p));
    EXPECT_NEAR(burned_eigenvalues(p)[1], p.kappa * std::exp(-p.kappa) / p.c, 1e-15);
}

TEST(Orbit, AgreesWithFineFixedStepReference) {
    ModelParams p;
    p.epsilon = 0.5;
    const FrontState s0{0.9, 0.05, -0.02, 0.01};
    OrbitOptions o;
    o.tol = 1e-11;
    const Trajectory tr = integrate_orbit(p, s0, 0.0, 3.0, o);
    const FrontState ref = rk4(p, s0, 3.0, 30000);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(tr.states.back()[i], ref[i], 1e-8);
    EXPECT_DOUBLE_EQ(tr.z.back(), 3.0);
    const Trajectory back = integrate_orbit(p, s0, 0.0, -2.0, o);
    EXPECT_DOUBLE_EQ(back.z.back(), -2.0);
    EXPECT_LT(back.z[1], 0.0);
}

TEST(Orbit, DriftStaysWithinToleranceTimesSpan) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    ModelParams p;
    p.epsilon = 0.5;
    OrbitOptions o;
    o.tol = 1e-10;
    for (int t = 0; t < 10; ++t) {
        const FrontState s0{1.0 + u(rng), 0.1 + u(rng), u(rng), u(rng)};
        const double span = 5.0;
        const Trajectory tr = integrate_orbit(p, s0, 0.0, span, o);
        EXPECT_LE(tr.max_drift, 10.0 * o.tol * span);
    }
}

TEST(Orbit, EquilibriumDataGivesConstantProfile) {
    ModelParams p;
    p.epsilon = 0.5;
    const FrontState eq{1.0 / p.kappa, 0.0, 0.0, 0.0};
    const Trajectory tr = integrate_orbit(p, eq, 0.0, 20.0);
    for (const auto& s : tr.states) EXPECT_EQ(s, eq);
    const FrontState cold{0.0, 1.0, 0.0, 0.0};
    const Trajectory tc = integrate_orbit(p, cold, 0.0, -20.0);
    for (const auto& s : tc.states) EXPECT_EQ(s, cold);
}

TEST(Orbit, RejectsBadToleranceAndReportsBlowUp) {
    ModelParams p;
    p.epsilon = 0.5;
    OrbitOptions o;
    o.tol = 0.0;
    EXPECT_THROW(integrate_orbit(p, {1, 0, 0, 0}, 0.0, 1.0, o), std::invalid_argument);
    OrbitOptions tight;
    tight.max_steps = 3;
    EXPECT_THROW(integrate_orbit(p, {1, 0.5, 0.2, 0.1}, 0.0, 100.0, tight), FrontError);
}

TEST(Shooting, UnitStoichiometryRecoversBurnedTemperature) {
    ModelParams p;
    p.epsilon = 0.0;
    p.kappa = 1.0;
    const auto br = scan_bracket(p, 0.1, 3.0, 30);
    ASSERT_TRUE(br.has_value());
    const ShootResult r = shoot_speed(p, br->first, br->second);
    // speed from an independent shooting prototype (scipy DOP853, rtol 1e-12)
    EXPECT_NEAR(r.c_star, 0.5707274747375095, 1e-9);
    EXPECT_LE(std::abs(r.profile.phi1_left - 1.0), 1e-6);
    EXPECT_LE(r.profile.max_drift, 1e-8);
    EXPECT_NEAR(r.profile.k, r.c_star, 0.0);
    EXPECT_LT(r.profile.right_residual, 1e-7);
    EXPECT_TRUE(std::is_sorted(r.profile.z.begin(), r.profile.z.end()));
    std::ostringstream os;
    write_profile_csv(os, p, r.profile);
    EXPECT_EQ(os.str().rfind("z,phi1,phi2,phi3,phi4,k_drift\n", 0), 0u);
}

TEST(Shooting, OtherStoichiometryLandsOnOneOverKappa) {
    ModelParams p;
    p.epsilon = 0.0;
    p.kappa = 2.0;
    const auto br = scan_bracket(p, 0.05, 3.0, 40);
    ASSERT_TRUE(br.has_value());
    const ShootResult r = shoot_speed(p, br->first, br->second);
    EXPECT_LE(std::abs(r.profile.phi1_left - 0.5), 1e-6);
    EXPECT_LE(r.profile.max_drift, 1e-8);
}

TEST(Shooting, GuardsAndMissingBracket) {
    ModelParams p;
    p.epsilon = 0.5;
    EXPECT_THROW(shoot_speed(p, 0.1, 1.0), std::invalid_argument);
    p.epsilon = 0.0;
    EXPECT_THROW(shoot_speed(p, 1.0, 0.5), std::invalid_argument);
    EXPECT_FALSE(scan_bracket(p, 1.0, 2.0, 5).has_value());
    EXPECT_THROW(shoot_speed(p, 1.0, 2.0), FrontError);
    EXPECT_THROW(scan_bracket(p, 0.0, 1.0, 5), std::invalid_argument);
}
