#include <gtest/gtest.h>

#include <random>

#include "nldisp/evolution.hpp"

using namespace nldisp;

namespace {

struct Small2D {
    Kernel k{2, 1.0, 2};
    Bistable f{0.25, 1.0};
    ExteriorGrid g{k, BoxSpec{2, -1, -1 + 15 * 0.0625, -1, -1 + 15 * 0.0625, 0.0625}, ObstacleSpec::disc(-0.4, -0.5, 0.2)};
};

}  // namespace

TEST(Convolution, FftMatchesDirect) {
    Small2D s;
    ASSERT_EQ(s.g.n1(), 16);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> U(0, 1);
    std::vector<double> u(s.g.size());
    for (double& x : u) x = U(rng);
    auto halo = [](double x1, double x2) { return 0.5 + 0.1 * x1 - 0.05 * x2; };
    std::vector<double> a, b;
    s.g.convolve(u, halo, a);
    s.g.convolve_direct(u, halo, b);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(Rhs, ConstantOneIsSteady) {
    Small2D s;
    Evolution ev(s.g, s.f, constant_closure(1.0));
    Field u = make_field(s.g, 0.0, [](double, double) { return 1.0; });
    std::vector<double> r;
    ev.rhs(u.u, 0.0, r);
    for (std::size_t i = 0; i < r.size(); ++i)
        if (s.g.exterior(i)) EXPECT_NEAR(r[i], 0.0, 1e-14);
}

TEST(Rhs, ZeroIsSteadyAndStepKeepsIt) {
    Kernel k(2, 1.0, 2);
    Bistable f(0.25, 1.0);
    ExteriorGrid g(k, BoxSpec{2, -1, 1, -1, 1, 0.0625}, ObstacleSpec::none());
    Evolution ev(g, f, constant_closure(0.0));
    Field u = make_field(g, 0.0, [](double, double) { return 0.0; });
    std::vector<double> r;
    ev.rhs(u.u, 0.0, r);
    for (double x : r) EXPECT_EQ(x, 0.0);
    for (Scheme sc : {Scheme::heun, Scheme::rk4}) {
        const Field v = ev.step(u, 0.05, sc);
        EXPECT_EQ(v.u, u.u);
    }
}

TEST(Step, RejectsLargeDt) {
    Small2D s;
    Evolution ev(s.g, s.f, constant_closure(0.0));
    Field u = make_field(s.g, 0.0, [](double, double) { return 0.5; });
    EXPECT_THROW(ev.step(u, 1.0, Scheme::rk4), ConfigError);
    EXPECT_NO_THROW(ev.step(u, ev.dt_max(), Scheme::rk4));
}

TEST(Step, Rk4Order) {
    Small2D s;
    Evolution ev(s.g, s.f, constant_closure(0.3));
    const Field u0 = make_field(s.g, 0.0, [](double x, double y) { return 0.5 + 0.4 * std::sin(2 * x) * std::cos(y); });
    const double T = 0.48;
    Field ref = u0;
    ev.advance(ref, T, T / 256, Scheme::rk4);
    double err[2];
    for (int m = 0; m < 2; ++m) {
        Field u = u0;
        ev.advance(u, T, 0.08 / (1 << m), Scheme::rk4);
        err[m] = sup_distance(u, ref);
    }
    EXPECT_GE(err[0] / err[1], 3.5);
    // heun is second order
    Field a = u0, b = u0;
    ev.advance(a, T, 0.08, Scheme::heun);
    ev.advance(b, T, 0.04, Scheme::heun);
    EXPECT_GE(sup_distance(a, ref) / sup_distance(b, ref), 3.0);
}

TEST(SolveInterval, EmptyIntervalAndRestart) {
    Small2D s;
    Evolution ev(s.g, s.f, constant_closure(0.0));
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> U(0, 1);
    const Field u0 = make_field(s.g, 0.0, [&](double, double) { return U(rng); });
    const Trajectory t0 = ev.solve_interval(u0, 0.0, 0.01, 1, Scheme::rk4);
    ASSERT_EQ(t0.snapshots.size(), 1u);
    EXPECT_EQ(t0.snapshots[0].u, u0.u);

    const Trajectory full = ev.solve_interval(u0, 2.0, 0.01, 10, Scheme::rk4);
    const Trajectory first = ev.solve_interval(u0, 1.0, 0.01, 10, Scheme::rk4);
    const Trajectory second = ev.solve_interval(first.snapshots.back(), 2.0, 0.01, 10, Scheme::rk4);
    EXPECT_EQ(full.snapshots.back().t, 2.0);
    EXPECT_LE(sup_distance(full.snapshots.back(), second.snapshots.back()), 1e-13);
}

TEST(SolveInterval, LastStepShortened) {
    Small2D s;
    Evolution ev(s.g, s.f, constant_closure(0.0));
    const Field u0 = make_field(s.g, 0.0, [](double, double) { return 0.4; });
    const Trajectory tr = ev.solve_interval(u0, 0.105, 0.01, 100, Scheme::heun);
    EXPECT_EQ(tr.snapshots.back().t, 0.105);
}

TEST(Picard, ZeroDataStaysZero) {
    Small2D s;
    Evolution ev(s.g, s.f, constant_closure(0.0));
    const Field u0 = make_field(s.g, 0.0, [](double, double) { return 0.0; });
    const Field v = ev.picard_solve(u0, 0.2, 5, 20);
    for (double x : v.u) EXPECT_EQ(x, 0.0);
}

TEST(Picard, RejectsLongWindow) {
    Small2D s;
    Evolution ev(s.g, s.f, constant_closure(0.0));
    const Field u0 = make_field(s.g, 0.0, [](double, double) { return 0.1; });
    EXPECT_THROW(ev.picard_solve(u0, 0.5, 5, 20), ConfigError);
}

TEST(Ordering, Basics) {
    Small2D s;
    const Field v = make_field(s.g, 0.0, [](double x, double) { return 0.5 + 0.1 * x; });
    const OrderingReport same = ordering_report(v, v);
    EXPECT_EQ(same.min_diff, 0.0);
    EXPECT_EQ(same.violations, 0u);
    Field u = v;
    for (double& x : u.u) x += 0.1;
    EXPECT_NEAR(ordering_report(u, v).min_diff, 0.1, 1e-15);
    EXPECT_EQ(ordering_report(v, u).violations, s.g.size() - std::count(s.g.mask().begin(), s.g.mask().end(), 0));
}

TEST(Invariants, UnitIntervalAndMonotoneData) {
    Kernel k(1, 1.0, 2);
    Bistable f(0.25, 1.0);
    const double h = 0.05;
    ExteriorGrid g(k, BoxSpec{1, -10, -10 + 399 * h, 0, 0, h}, ObstacleSpec::none());
    Evolution ev(g, f, constant_closure(0.0));
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> U(0, 1);
    Field u = make_field(g, 0.0, [&](double, double) { return U(rng); });
    ev.advance(u, 10.0, 0.02, Scheme::rk4);
    for (double x : u.u) {
        EXPECT_GE(x, -1e-10);
        EXPECT_LE(x, 1 + 1e-10);
    }
    // monotone in x1 with matching constant halos on both sides stays monotone
    Evolution ev2(g, f, [](double x1, double, double) { return x1 < 0 ? 0.0 : 1.0; });
    Field m = make_field(g, 0.0, [](double x, double) { return 0.5 * (1 + std::tanh(x)); });
    ev2.advance(m, 5.0, 0.02, Scheme::rk4);
    for (int i = 1; i < g.n1(); ++i) EXPECT_GE(m.u[static_cast<std::size_t>(i)] - m.u[static_cast<std::size_t>(i - 1)], -1e-10);
}
