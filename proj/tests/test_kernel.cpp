#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nldisp/kernel.hpp"
#include "nldisp/quadrature.hpp"

using namespace nldisp;

TEST(Kernel, OneDimensionalNormalization) {
    Kernel k(1, 1.0, 2);
    // int_{-1}^{1} (1 - r^2)^2 dr = 16/15
    EXPECT_NEAR(k.eval(0.0), 15.0 / 16.0, 1e-14);
    EXPECT_NEAR(k.mass(), 1.0, 1e-10);
}

TEST(Kernel, CompactSupport) {
    for (int dim : {1, 2}) {
        Kernel k(dim, 1.6, 3);
        EXPECT_EQ(k.eval(2.6), 0.0);
        if (dim == 2) EXPECT_EQ(k.eval(0.0, -2.6), 0.0);
        EXPECT_GT(k.eval(0.0), 0.0);
    }
}

TEST(Kernel, TwoDimensionalMass) {
    for (int p : {2, 3, 5}) {
        Kernel k(2, 1.6, p);
        EXPECT_NEAR(k.mass(), 1.0, 1e-9) << "p=" << p;
    }
}

TEST(Kernel, RejectsBadParameters) {
    EXPECT_THROW(Kernel(3, 1.0, 2), ConfigError);
    EXPECT_THROW(Kernel(2, -1.0, 2), ConfigError);
    EXPECT_THROW(Kernel(2, 1.0, 1), ConfigError);
}

TEST(Marginal, UnitMassAndSymmetry) {
    for (double L : {1.0, 1.6}) {
        const Kernel1D j1 = marginal_1d(Kernel(2, L, 2));
        EXPECT_NEAR(j1.mass(), 1.0, 1e-8);
        for (double x : {0.1, 0.37, 0.8 * L}) EXPECT_NEAR(j1(x), j1(-x), 1e-14);
    }
}

TEST(Marginal, MatchesClosedForm) {
    Kernel k(2, 1.0, 2);
    const Kernel1D j1 = marginal_1d(k);
    for (double x : {0.0, 0.25, 0.5, 0.9}) EXPECT_NEAR(j1(x), analytic_marginal(k, x), 1e-6);
}

TEST(Marginal, MonteCarloAtOrigin) {
    // J1(0) ~ (1/2 eps) P(|Y1| < eps) for Y ~ J, sampled by rejection
    Kernel k(2, 1.0, 2);
    const Kernel1D j1 = marginal_1d(k);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0), V(0.0, k.eval(0.0));
    const double eps = 0.02;
    long hits = 0, accepted = 0;
    while (accepted < 10'000'000) {
        const double y1 = U(rng), y2 = U(rng);
        if (V(rng) > k.eval(y1, y2)) continue;
        ++accepted;
        if (std::abs(y1) < eps) ++hits;
    }
    const double mc = static_cast<double>(hits) / accepted / (2 * eps);
    // the 2 eps window biases by O(eps^2 J1''), well below the sampling error
    EXPECT_NEAR(j1(0.0), mc, 1e-2 * j1(0.0));
    EXPECT_NEAR(j1(0.0), analytic_marginal(k, 0.0), 1e-3);
}

TEST(ExpMoment, UnitAtZeroAndEven) {
    const Kernel1D j1 = marginal_1d(Kernel(2, 1.6, 2));
    EXPECT_NEAR(exp_moment(j1, 0.0), 1.0, 1e-8);
    for (double lam : {0.3, 1.0, 2.5}) EXPECT_NEAR(exp_moment(j1, lam), exp_moment(j1, -lam), 1e-14 * exp_moment(j1, lam));
}

TEST(ExpMoment, AgainstAdaptiveQuadrature) {
    Kernel k(1, 1.0, 2);
    const Kernel1D j1 = as_1d(k);
    const double ref = adaptive_simpson([&](double y) { return k.eval(y) * std::exp(-y); }, -1.0, 1.0, 1e-14);
    const double v = exp_moment(j1, 1.0);
    EXPECT_GT(v, 1.0);
    EXPECT_LT(v, std::cosh(1.0));
    EXPECT_NEAR(v, ref, 1e-9);
}

TEST(Lattice, WeightsNormalizedAndSymmetric) {
    for (int dim : {1, 2}) {
        const Lattice1D w = lattice_profile_weights(Kernel(dim, 1.0, 2), 0.05);
        double s = 0.0;
        for (double x : w.w) s += x;
        EXPECT_NEAR(s, 1.0, 1e-14);
        EXPECT_EQ(w.R, 19);
        for (int i = 1; i <= w.R; ++i) EXPECT_EQ(w[i], w[-i]);
        EXPECT_EQ(w[w.R + 1], 0.0);
    }
}
