// Acceptance driver: one PASS/FAIL line per criterion, exit 1 if any fails.
// Usage: nldisp_acceptance [A1 A5 ...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <cstdarg>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nldisp/nldisp.hpp"

using namespace nldisp;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// shared 2-D set-up: kernel L = 1.6, h = 0.1, (a, kappa) = (0.02, 1.2)
constexpr double kL2 = 1.6;
constexpr double kH2 = 0.1;

struct Wave2D {
    Kernel k{2, kL2, 2};
    Bistable f;
    std::shared_ptr<WaveProfile> p;
    Wave2D(double a, double kappa) : f(a, kappa) {
        p = std::make_shared<WaveProfile>(solve_profile(k, f, 40.0, kH2));
    }
};

Wave2D& slow_wave() {
    static Wave2D w(0.02, 1.2);
    return w;
}

Wave2D& fast_wave() {
    static Wave2D w(0.25, 1.0);
    return w;
}

// ---- A1 ----------------------------------------------------------------------

Outcome a1() {
    constexpr double kResidual = 1e-8, kSeconds = 30.0;
    const auto t0 = Clock::now();
    Kernel k(1, 1.0, 2);
    Bistable f(0.25, 1.0);
    const WaveProfile p = solve_profile(k, f, 40.0, 0.05);
    const double el = seconds_since(t0);
    // phi rounds to 1 on the right, so strictness is read off phi or 1 - phi;
    // the clamp layers (one kernel radius at each end) only need phi non-decreasing
    const int layer = p.weights.R + 2;
    bool strict = true, nondecreasing = true;
    for (int i = 1; i < p.n; ++i) {
        const auto I = static_cast<std::size_t>(i);
        if (p.phi[I] < p.phi[I - 1]) nondecreasing = false;
        const bool up = p.phi[I] > p.phi[I - 1] || p.comp[I] < p.comp[I - 1];
        if (!up && i > layer && i + layer < p.n) strict = false;
    }
    Outcome o;
    o.pass = p.residual <= kResidual && p.c > 0.0 && strict && nondecreasing && el <= kSeconds;
    o.detail = fmt("residual=%.2e c=%.7f strictly_monotone=%d nondecreasing=%d newton=%d time=%.2fs", p.residual,
                   p.c, strict, nondecreasing, p.newton_steps, el);
    return o;
}

// ---- A2 ----------------------------------------------------------------------

double advection_error(double h, double dt) {
    Kernel k(1, 1.0, 2);
    Bistable f(0.25, 1.0);
    auto p = std::make_shared<WaveProfile>(solve_profile(k, f, 40.0, h));
    const int cells = static_cast<int>(std::lround(80.0 / h));
    ExteriorGrid g(k, BoxSpec{1, -40.0, -40.0 + (cells - 1) * h, 0, 0, h}, ObstacleSpec::none());
    Evolution ev(g, f, planar_closure(p));
    Field u = make_field(g, 0.0, [&](double x, double) { return p->value(x); });
    constexpr double T = 10.0;
    ev.advance(u, T, dt, Scheme::rk4);
    double e = 0.0;
    for (int i = 0; i < g.n1(); ++i)
        e = std::max(e, std::abs(u.u[static_cast<std::size_t>(i)] - p->value(g.x1(i) + p->c * T)));
    return e;
}

Outcome a2() {
    constexpr double kError = 5e-3, kRatio = 3.0;
    const double e1 = advection_error(0.05, 0.01);
    const double e2 = advection_error(0.025, 0.005);
    Outcome o;
    o.pass = e1 <= kError && e1 / e2 >= kRatio;
    o.detail = fmt("err(h=.05)=%.3e err(h=.025)=%.3e ratio=%.2f", e1, e2, e1 / e2);
    return o;
}

// ---- A3 ----------------------------------------------------------------------

Outcome a3() {
    constexpr double kViolation = 1e-10, kStrict = 1e-14;
    constexpr int kPairs = 200, kStrictPairs = 20;
    Kernel k(1, 1.0, 2);
    Bistable f(0.25, 1.0);
    const double h = 0.05;
    ExteriorGrid g(k, BoxSpec{1, -10.0, -10.0 + 399 * h, 0, 0, h}, ObstacleSpec::none());
    Evolution ev(g, f, constant_closure(0.0));
    std::mt19937_64 rng(20240607);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::size_t violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    double min_gap = std::numeric_limits<double>::infinity();
    for (int pair = 0; pair < kPairs; ++pair) {
        Field v = make_field(g, 0.0, [&](double, double) { return U(rng); });
        Field u = v;
        // first kStrictPairs: u0 - v0 >= 0, positive on a random half of the cells;
        // the rest may coincide on most of the box
        const bool strict = pair < kStrictPairs;
        const double frac = strict ? 0.5 : 0.1;
        for (double& x : u.u)
            if (U(rng) < frac) x = x + (1.0 - x) * U(rng);
        if (strict) {
            Field a = u, b = v;
            ev.advance(a, 1.0, 0.01, Scheme::rk4);
            ev.advance(b, 1.0, 0.01, Scheme::rk4);
            min_gap = std::min(min_gap, ordering_report(a, b).min_diff);
        }
        ev.advance(u, 5.0, 0.01, Scheme::rk4);
        ev.advance(v, 5.0, 0.01, Scheme::rk4);
        const OrderingReport r = ordering_report(u, v, kViolation);
        violations += r.violations;
        worst = std::min(worst, r.min_diff);
    }
    Outcome o;
    o.pass = violations == 0 && min_gap > kStrict;
    o.detail = fmt("pairs=%d violations=%zu min(u-v,T=5)=%.3e strict_min_gap(T=1)=%.3e", kPairs, violations, worst,
                   min_gap);
    return o;
}

// ---- A4 ----------------------------------------------------------------------

Outcome a4() {
    constexpr double kDiff = 1e-6, kSlack = 0.05, tw = 0.2;
    Kernel k(2, 1.0, 2);
    Bistable f(0.25, 1.0);
    const double h = 0.0625;
    ExteriorGrid g(k, BoxSpec{2, -1, -1 + 31 * h, -1, -1 + 31 * h, h}, ObstacleSpec::disc(0, 0, 0.3));
    Evolution ev(g, f, constant_closure(0.0));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(0, 1);
    Field u0 = make_field(g, 0, [&](double, double) { return U(rng); });
    PicardReport rep;
    const Field pu = ev.picard_solve(u0, tw, 60, 200, &rep);
    Field ru = u0;
    ev.advance(ru, tw, tw / 200, Scheme::rk4);
    const double diff = sup_distance(pu, ru);
    const double bound = (2.0 + f.max_fprime()) * tw + kSlack;
    Outcome o;
    o.pass = g.n1() == 32 && g.n2() == 32 && diff <= kDiff && rep.max_ratio <= bound;
    o.detail = fmt("grid=%dx%d diff=%.3e ratio=%.4f bound=%.4f iterations=%d", g.n1(), g.n2(), diff, rep.max_ratio,
                   bound, rep.iterations);
    return o;
}

// ---- A5 ----------------------------------------------------------------------

Outcome a5() {
    constexpr double kTol = 1e-3, kScanSeconds = 120.0;
    ScanOptions opt;
    opt.tol = kTol;
    std::ostringstream d;
    bool pass = true;
    auto record = [&](const std::string& name, const ResidualReport& r, double el) {
        const bool ok = r.pass && el <= kScanSeconds;
        pass = pass && ok;
        d << name << (r.sub ? " sup=" : " inf=") << fmt("%.2e", r.extremum) << fmt(" (%.1fs) ", el);
    };
    {
        Wave2D& w = slow_wave();
        const ObstacleSpec obs = ObstacleSpec::disc(-5, 0, 1.6);
        ExteriorGrid g(w.k, BoxSpec{2, -12, 24, -6, 6, kH2}, obs);
        for (CertKind kind : {CertKind::Wminus, CertKind::Wplus}) {
            const auto t0 = Clock::now();
            const ShiftScan s = certify_shift(kind, *w.p, w.f, w.k, g, -40.0, opt);
            record(cert_kind_name(kind), s.report, seconds_since(t0));
        }
    }
    Wave2D& w = fast_wave();
    LargeTimeScanSpec spec;
    spec.lt.beta = spec.lt.beta_plus = 0.2;
    spec.lt.eps = spec.z.eps1 / 2;
    for (CertKind kind : {CertKind::Uminus, CertKind::Uplus}) {
        const auto t0 = Clock::now();
        const LargeTimeScan s = certify_large_time(kind, *w.p, w.f, w.k, ObstacleSpec::disc(0, 0, 3.2), kH2, spec, opt);
        record(cert_kind_name(kind), s.report, seconds_since(t0));
    }
    for (CertKind kind : {CertKind::PlanarLower, CertKind::PlanarUpper}) {
        const auto t0 = Clock::now();
        const PlanarScan s = certify_planar(kind, *w.p, w.f, w.k, kH2, 50.0, 20.0, opt);
        record(cert_kind_name(kind), s.report, seconds_since(t0));
    }
    return {pass, d.str()};
}

// ---- A6 ----------------------------------------------------------------------

Outcome a6() {
    constexpr double kSlack = 1e-10, kJump = 1e-10, kSeconds = 1.0;
    const auto t0 = Clock::now();
    bool pass = true;
    std::ostringstream d;
    for (double eta : {0.1, 0.3, 0.6}) {
        ZFunction z(ZParams{eta, 0.1, 20.0});
        const ZReport r = z_report(z, 10000);
        const bool ok = r.min_slack >= -kSlack && r.z0 == 0.1 && r.z_at_1 >= 0.05 && r.min_tail_slack >= -kSlack &&
                        r.max_jump_value <= kJump && r.max_jump_slope <= kJump && std::isfinite(r.integral_bound) &&
                        r.integral <= r.integral_bound;
        pass = pass && ok;
        d << fmt("eta=%.1f slack=%.1e z1=%.4f tail=%.1e jump=%.1e I=%.3f ", eta, r.min_slack, r.z_at_1,
                 r.min_tail_slack, std::max(r.max_jump_value, r.max_jump_slope), r.integral_bound);
    }
    const double el = seconds_since(t0);
    d << fmt("time=%.3fs", el);
    return {pass && el <= kSeconds, d.str()};
}

// ---- A7 ----------------------------------------------------------------------

Outcome a7() {
    constexpr double kEquality = 1e-12, kOde = 1e-8;
    Wave2D& w = slow_wave();
    const CertificateConstants c = certificate_floor_constants(*w.p, w.f, w.k, ObstacleSpec::disc(-5, 0, 1.6));
    const ShiftParams sp{c.M, w.p->lambda0, w.p->c};
    const double T = sp.T();
    double worst_sign = -std::numeric_limits<double>::infinity(), worst_ode = 0.0;
    const double dt = 1e-3;
    for (int i = 0; i < 100; ++i) {
        const double t = T - 0.01 - 200.0 * i / 99.0;
        worst_sign = std::max(worst_sign, sp.c * t + xi(t, sp));
        // fourth-order centered difference against xi' = M exp(lambda0 (c t + xi))
        const double fd =
            (-xi(t + 2 * dt, sp) + 8 * xi(t + dt, sp) - 8 * xi(t - dt, sp) + xi(t - 2 * dt, sp)) / (12 * dt);
        const double ode = sp.M * std::exp(sp.lambda0 * (sp.c * t + xi(t, sp)));
        worst_ode = std::max(worst_ode, std::abs(fd - ode));
    }
    const double at_T = std::abs(sp.c * T + xi(T, sp));
    Outcome o;
    o.pass = worst_sign <= 0.0 && at_T <= kEquality && worst_ode <= kOde;
    o.detail = fmt("T=%.4f max(ct+xi)=%.3e |cT+xi(T)|=%.2e ode_residual=%.2e", T, worst_sign, at_T, worst_ode);
    return o;
}

// ---- A8 / A12 (one run) --------------------------------------------------------

struct EntireRun {
    EntireSolutionApprox r;
    double seconds = 0.0;
};

EntireRun& entire_run() {
    static std::unique_ptr<EntireRun> run;
    if (run) return *run;
    run = std::make_unique<EntireRun>();
    Wave2D& w = slow_wave();
    const ObstacleSpec obs = ObstacleSpec::disc(-5, 0, 1.6);
    const CertificateConstants c = certificate_floor_constants(*w.p, w.f, w.k, obs);
    static ExteriorGrid g(w.k, BoxSpec{2, -12, 24, -8, 8, kH2}, obs);
    EntireOptions o;
    o.lipschitz_until = 10.0;
    const auto t0 = Clock::now();
    run->r = construct_entire({10, 20, 40}, g, w.f, w.p, ShiftParams{c.M, w.p->lambda0, w.p->c}, o);
    run->seconds = seconds_since(t0);
    return *run;
}

Outcome a8() {
    constexpr double kMonotone = 1e-8, kRatio = 2.0, kUt = 1e-8, kSeconds = 600.0;
    const EntireRun& run = entire_run();
    const EntireSolutionApprox& r = run.r;
    std::size_t i0 = 0;
    while (r.eval_times[i0] != 0.0) ++i0;
    const auto& cd = r.cauchy[i0];
    bool halving = true;
    for (std::size_t k = 1; k < cd.size(); ++k)
        if (!(cd[k - 1] >= kRatio * cd[k])) halving = false;
    Outcome o;
    o.pass = r.monotone_min >= -kMonotone && halving && r.sandwich_violations == 0 && r.min_ut >= -kUt &&
             run.seconds <= kSeconds;
    o.detail = fmt("cauchy(t=0)=%.3e,%.3e monotone_min=%.1e sandwich_violations=%zu min_ut=%.1e T1=%.3f time=%.1fs",
                   cd[0], cd.size() > 1 ? cd[1] : 0.0, r.monotone_min, r.sandwich_violations, r.min_ut, r.T1,
                   run.seconds);
    return o;
}

Outcome a12() {
    constexpr double kGrowth = 1.10;
    const EntireSolutionApprox& r = entire_run().r;
    double at0 = std::numeric_limits<double>::quiet_NaN(), mx = 0.0;
    for (const auto& [t, q] : r.lipschitz) {
        if (t == 0.0) at0 = q;
        if (t >= 0.0) mx = std::max(mx, q);
    }
    Outcome o;
    o.pass = std::isfinite(at0) && mx <= kGrowth * at0;
    o.detail = fmt("M'(0)=%.4f max_[0,10]=%.4f ratio=%.4f samples=%zu", at0, mx, mx / at0, r.lipschitz.size());
    return o;
}

// ---- A9 ----------------------------------------------------------------------

// Below this the K = empty run is indistinguishable from the exact translate.
constexpr double kDiscretizationFloor = 5e-4;

Outcome a9() {
    constexpr double kPeak = 0.1, kFinal = 0.05, kBoxChange = 0.5;
    Wave2D& w = slow_wave();
    RecoveryConfig cfg;
    cfg.front_x = 7.0;
    cfg.t_end = 80.0;
    cfg.lines = {0.0, 8.0};
    const ObstacleSpec obs = ObstacleSpec::disc(0, 0, 2.0 * kL2);
    const auto t0 = Clock::now();
    ExteriorGrid g(w.k, BoxSpec{2, -34, 12, -12, 12, kH2}, obs);
    const FrontDiagnostics d = recovery_experiment(g, w.f, w.p, cfg);
    ExteriorGrid g0(w.k, BoxSpec{2, -34, 12, -12, 12, kH2}, ObstacleSpec::none());
    const FrontDiagnostics d0 = recovery_experiment(g0, w.f, w.p, cfg);
    ExteriorGrid g2(w.k, BoxSpec{2, -57, 35, -24, 24, kH2}, obs);
    const FrontDiagnostics d2 = recovery_experiment(g2, w.f, w.p, cfg);
    double control = 0.0;
    for (double x : d0.D) control = std::max(control, x);
    const double change = std::abs(d2.final_D - d.final_D);
    Outcome o;
    o.pass = d.peak_D > kPeak && d.final_D < kFinal && control < kDiscretizationFloor &&
             change <= kBoxChange * d.final_D;
    o.detail = fmt("peak=%.3f D(80)=%.4f (need <%.2f) control_max=%.2e floor=%.0e D2(80)=%.4f rel_change=%.3f "
                   "front_lag(x2=0)=%.3f time=%.0fs",
                   d.peak_D, d.final_D, kFinal, control, kDiscretizationFloor, d2.final_D, change / d.final_D,
                   d.front[0].back() - (cfg.front_x - w.p->c * cfg.t_end), seconds_since(t0));
    return o;
}

// ---- A10 ---------------------------------------------------------------------

Outcome a10() {
    constexpr double kFloorFactor = 2.0;
    Wave2D& w = slow_wave();
    RecoveryConfig cfg;
    cfg.front_x = 7.0;
    cfg.snapshot_every = 2.0;
    const std::vector<double> offsets{5 * kL2, 10 * kL2, 20 * kL2};
    const BoxSpec box{2, -34, 12, -12, 38, kH2};
    ExteriorGrid g(w.k, box, ObstacleSpec::disc(0, 0, 2.0 * kL2));
    const FarfieldReport r =
        farfield_translate_check(recovery_experiment(g, w.f, w.p, cfg).trajectory, *w.p, offsets, kL2, -cfg.front_x);
    ExteriorGrid g0(w.k, box, ObstacleSpec::none());
    const FarfieldReport r0 = farfield_translate_check(recovery_experiment(g0, w.f, w.p, cfg).trajectory, *w.p,
                                                       offsets, kL2, -cfg.front_x);
    const double floor = r0.distance.back();
    Outcome o;
    o.pass = r.strictly_decreasing && r.distance.back() <= kFloorFactor * floor;
    o.detail = fmt("D(8,16,32)=%.3e,%.3e,%.3e floor=%.3e", r.distance[0], r.distance[1], r.distance[2], floor);
    return o;
}

// ---- A11 ---------------------------------------------------------------------

Outcome a11() {
    constexpr double kDev = 1e-3, kRhs = 1e-6;
    Wave2D& w = fast_wave();
    ExteriorGrid g(w.k, BoxSpec{2, -8, 8, -8, 8, kH2}, ObstacleSpec::disc(0, 0, 2.0));
    LiouvilleReport r;
    stationary_liouville(g, w.f, LiouvilleConfig{}, &r);
    Outcome o;
    o.pass = r.sup_dev <= kDev && r.rhs_sup <= kRhs;
    o.detail = fmt("t=%.0f sup|u-1|=%.2e rhs=%.2e F_margin=%.3f", r.t, r.sup_dev, r.rhs_sup, r.condition.margin);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> all{
        {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4},  {"A5", a5},   {"A6", a6},
        {"A7", a7}, {"A8", a8}, {"A9", a9}, {"A10", a10}, {"A11", a11}, {"A12", a12}};
    std::set<std::string> only(argv + 1, argv + argc);
    int failed = 0;
    for (const auto& [id, fn] : all) {
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%-4s %s  %s\n", id.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d criteria failed\n", failed);
    return failed ? 1 : 0;
}
