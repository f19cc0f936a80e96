#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "nldisp/evolution.hpp"
#include "nldisp/experiments.hpp"
#include "nldisp/quadrature.hpp"
#include "nldisp/traveling_wave.hpp"

using namespace nldisp;

namespace {

const WaveProfile& base_profile() {
    static const WaveProfile p = solve_profile(Kernel(1, 1.0, 2), Bistable(0.25, 1.0), 40.0, 0.05);
    return p;
}

// exp moment of the 1-D bump by adaptive quadrature, independent of the tables
double moment_oracle(double lam) {
    Kernel k(1, 1.0, 2);
    return adaptive_simpson([&](double y) { return k.eval(y) * std::exp(-lam * y); }, -1.0, 1.0, 1e-13);
}

}  // namespace

TEST(DecayRates, GridScanOracle) {
    const Kernel1D j1 = as_1d(Kernel(1, 1.0, 2));
    const double c = 0.5, fp0 = -0.25;
    const auto [lam, mu] = decay_rates(c, fp0, -0.75, j1);
    auto g = [&](double l) { return moment_oracle(l) - 1.0 + fp0 - c * l; };
    EXPECT_LT(g(0.0), 0.0);
    double root = NAN;
    for (double l = 1e-4; l < 50.0; l += 1e-4)
        if (g(l - 1e-4) < 0.0 && g(l) >= 0.0) {
            root = l;
            break;
        }
    ASSERT_TRUE(std::isfinite(root));
    EXPECT_NEAR(lam, root, 1e-4);
    EXPECT_LE(std::abs(exp_moment(j1, lam) - 1.0 + fp0 - c * lam), 1e-10);
    EXPECT_GT(mu, 0.0);
}

TEST(Profile, ResidualSpeedAndMonotonicity) {
    const WaveProfile& p = base_profile();
    EXPECT_LE(p.residual, 1e-8);
    EXPECT_GT(p.c, 0.0);
    EXPECT_NEAR(p.value(0.0), 0.25, 1e-12);
    const int layer = p.weights.R + 2;
    for (int i = 1; i < p.n; ++i) {
        const auto I = static_cast<std::size_t>(i);
        EXPECT_GE(p.phi[I], p.phi[I - 1]);
        if (i > layer && i + layer < p.n) EXPECT_TRUE(p.phi[I] > p.phi[I - 1] || p.comp[I] < p.comp[I - 1]) << i;
    }
}

TEST(Profile, SpeedDecreasesTowardBalance) {
    Kernel k(1, 1.0, 2);
    double prev = 1e300;
    for (double a : {0.45, 0.48, 0.49}) {
        const WaveProfile p = solve_profile(k, Bistable(a, 1.0), 40.0, 0.05);
        EXPECT_GT(p.c, 0.0);
        EXPECT_LT(p.c, prev) << "a=" << a;
        prev = p.c;
    }
}

TEST(Profile, RejectsCoarseGrid) {
    EXPECT_THROW(solve_profile(Kernel(1, 1.0, 2), Bistable(0.25, 1.0), 40.0, 0.1), ConfigError);
    EXPECT_THROW(solve_profile(Kernel(1, 1.0, 2), Bistable(0.25, 1.0), 5.0, 0.05), ConfigError);
}

TEST(Profile, TailFitAgreesWithDecayRates) {
    const WaveProfile& p = base_profile();
    EXPECT_NEAR(p.lambda_fit, p.lambda_grid, 0.05 * p.lambda_grid);
    EXPECT_NEAR(p.mu_fit, p.mu_grid, 0.05 * p.mu_grid);
    EXPECT_NEAR(p.lambda, p.lambda_grid, 0.05 * p.lambda);
}

TEST(Profile, TailBoundsInFitRegion) {
    const WaveProfile& p = base_profile();
    const double L = p.support;
    for (int i = 2; i + 2 < p.n; ++i) {
        const double z = p.z(i);
        const auto I = static_cast<std::size_t>(i);
        if (z <= -5.0 && z >= -p.zmax + 2 * L) {
            EXPECT_LE(p.alpha0 * std::exp(p.lambda * z), p.phi[I]) << z;
            EXPECT_GE(p.beta0 * std::exp(p.lambda * z), p.phi[I]) << z;
            // centered difference of phi, independent of the stored derivative
            const double d = (p.phi[I + 1] - p.phi[I - 1]) / (2 * p.h);
            EXPECT_LE(p.gamma0 * std::exp(p.lambda * z), d * (1 + 1e-3)) << z;
            EXPECT_GE(p.delta0 * std::exp(p.lambda * z), d * (1 - 1e-3)) << z;
        }
        if (z >= 5.0 && z <= p.zmax - 2 * L) {
            EXPECT_LE(p.alpha1 * std::exp(-p.mu * z), p.comp[I]) << z;
            EXPECT_GE(p.beta1 * std::exp(-p.mu * z), p.comp[I]) << z;
        }
    }
    EXPECT_GT(p.lambda0, 0.0);
    EXPECT_LT(p.lambda0, std::min(p.lambda, p.k_phi));
}

TEST(Profile, EvolutionSpeedWithinTwoPercent) {
    Kernel k(1, 1.0, 2);
    Bistable f(0.25, 1.0);
    auto p = std::make_shared<WaveProfile>(base_profile());
    const double h = p->h;
    const int cells = static_cast<int>(std::lround(60.0 / h));
    ExteriorGrid g(k, BoxSpec{1, -30.0, -30.0 + (cells - 1) * h, 0, 0, h}, ObstacleSpec::none());
    Evolution ev(g, f, planar_closure(p));
    Field u = make_field(g, 0.0, [&](double x, double) { return p->value(x); });
    const double x0 = front_position(u, f.theta0());
    ev.advance(u, 5.0, 0.01, Scheme::rk4);
    const double speed = (x0 - front_position(u, f.theta0())) / 5.0;
    EXPECT_NEAR(speed, p->c, 0.02 * p->c);
}

TEST(Profile, CsvRoundTrip) {
    const WaveProfile& p = base_profile();
    std::stringstream ss;
    write_profile_csv(ss, p);
    const WaveProfile q = read_profile_csv(ss);
    EXPECT_EQ(q.n, p.n);
    EXPECT_EQ(q.c, p.c);
    for (double x : {-7.3, 0.0, 0.41, 12.0}) EXPECT_EQ(q.value(x), p.value(x));
}

TEST(Profile, TwoDimensionalMarginal) {
    // the planar wave in N = 2 solves the 1-D problem with the lattice marginal
    const WaveProfile p = solve_profile(Kernel(2, 1.6, 2), Bistable(0.25, 1.0), 40.0, 0.1);
    EXPECT_LE(p.residual, 1e-8);
    EXPECT_GT(p.c, 0.0);
}
