#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "certificates.hpp"
#include "domain.hpp"
#include "error.hpp"
#include "evolution.hpp"
#include "nonlinearity.hpp"
#include "traveling_wave.hpp"
#include "zfunction.hpp"

namespace nldisp {

/// Axis-aligned probe window; only exterior nodes inside it are probed.
struct Probe {
    double x1lo = 0, x1hi = 0, x2lo = 0, x2hi = 0;
};

/// The box minus a collar of one kernel radius.
inline Probe interior_probe(const ExteriorGrid& g) {
    const double L = g.kernel().support_radius();
    const BoxSpec& b = g.box();
    Probe p{b.x1lo + L, b.x1hi - L, b.x2lo + L, b.x2hi - L};
    if (g.dim() == 1) p.x2lo = p.x2hi = 0.0;
    return p;
}

namespace detail {
template <class Fn>
std::size_t for_probe(const ExteriorGrid& g, const Probe& pr, Fn&& fn) {
    std::size_t count = 0;
    for (int i = 0; i < g.n1(); ++i) {
        const double x1 = g.x1(i);
        if (x1 < pr.x1lo - 1e-9 || x1 > pr.x1hi + 1e-9) continue;
        for (int j = 0; j < g.n2(); ++j) {
            const double x2 = g.x2(j);
            if (g.dim() == 2 && (x2 < pr.x2lo - 1e-9 || x2 > pr.x2hi + 1e-9)) continue;
            const std::size_t k = g.index(i, j);
            if (!g.exterior(k)) continue;
            fn(k, x1, x2);
            ++count;
        }
    }
    return count;
}
}  // namespace detail

/// sup over the probe of |u - phi(x1 + c t + shift)|.
inline double front_distance(const Field& u, const WaveProfile& p, double t, const Probe& probe,
                             double shift = 0.0) {
    const ExteriorGrid& g = *u.grid;
    double m = 0.0;
    const std::size_t n = detail::for_probe(g, probe, [&](std::size_t k, double x1, double) {
        m = std::max(m, std::abs(u.u[k] - p.value(x1 + p.c * t + shift)));
    });
    if (n == 0) throw ConfigError("front_distance: probe region contains no exterior node");
    return m;
}

/// Rightmost upward crossing of `level` along the row nearest x2, linearly
/// interpolated; NaN when the row has no crossing.
inline double front_position(const Field& u, double level, double x2 = 0.0) {
    const ExteriorGrid& g = *u.grid;
    int j = 0;
    if (g.dim() == 2) {
        j = static_cast<int>(std::lround((x2 - g.box().x2lo) / g.h()));
        require(j >= 0 && j < g.n2(), "front_position: line outside the box");
    }
    for (int i = g.n1() - 2; i >= 0; --i) {
        const std::size_t a = g.index(i, j), b = g.index(i + 1, j);
        if (!g.exterior(a) || !g.exterior(b)) continue;
        if (u.u[a] < level && u.u[b] >= level)
            return g.x1(i) + g.h() * (level - u.u[a]) / (u.u[b] - u.u[a]);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// max over neighbouring exterior pairs of |u(x + h e_k) - u(x)| / h.
inline double lipschitz_quotient(const Field& u) {
    const ExteriorGrid& g = *u.grid;
    double m = 0.0;
    for (int i = 0; i < g.n1(); ++i)
        for (int j = 0; j < g.n2(); ++j) {
            const std::size_t k = g.index(i, j);
            if (!g.exterior(k)) continue;
            if (i + 1 < g.n1() && g.exterior(g.index(i + 1, j)))
                m = std::max(m, std::abs(u.u[g.index(i + 1, j)] - u.u[k]));
            if (j + 1 < g.n2() && g.exterior(g.index(i, j + 1)))
                m = std::max(m, std::abs(u.u[g.index(i, j + 1)] - u.u[k]));
        }
    return m / g.h();
}

// ---- entire solution -----------------------------------------------------------

struct EntireOptions {
    std::vector<double> eval_times{-5.0, 0.0, 5.0};
    double dt = 0.05;
    Scheme scheme = Scheme::rk4;
    int check_stride = 4;        // steps between sandwich / u_t checks
    double T1 = std::numeric_limits<double>::quiet_NaN();  // sandwich window; NaN -> T
    double mid_low = 0.1;        // mid-zone {phi in [low, 1 - low]}
    double mid_until = -5.0;     // ... for t <= mid_until
    double lipschitz_until = std::numeric_limits<double>::quiet_NaN();  // extra run of the last n
    double lipschitz_stride = 0.5;
};

struct EntireSolutionApprox {
    std::vector<int> n_list;
    std::vector<double> eval_times;
    std::vector<std::vector<Field>> fields;        // [n index][time index]
    std::vector<std::vector<double>> cauchy;       // [time index][k]: sup |u_{n_{k+1}} - u_{n_k}|
    double monotone_min = std::numeric_limits<double>::infinity();  // min (u_{n_{k+1}} - u_{n_k})
    std::size_t sandwich_violations = 0;
    double sandwich_worst = 0.0;                   // most negative of u - W-, W+ - u
    double min_ut = std::numeric_limits<double>::infinity();
    double mid_min_ut = std::numeric_limits<double>::infinity();
    double T1 = 0.0;
    std::vector<double> start_distance;            // front distance of W-(., -n)
    std::vector<std::pair<double, double>> lipschitz;  // (t, quotient) of the last n
    double error_estimate = 0.0;                   // last Cauchy difference at t = 0
    const Field& limit(std::size_t time_index) const { return fields.back()[time_index]; }
};

inline EntireSolutionApprox construct_entire(const std::vector<int>& n_list, const ExteriorGrid& g, const Bistable& f,
                                             std::shared_ptr<const WaveProfile> prof, const ShiftParams& sp,
                                             const EntireOptions& opt = {}) {
    require(!n_list.empty(), "experiment.n_list must not be empty");
    require(std::is_sorted(n_list.begin(), n_list.end()) && n_list.front() > 0,
            "experiment.n_list must be increasing and positive");
    require(std::is_sorted(opt.eval_times.begin(), opt.eval_times.end()) && !opt.eval_times.empty(),
            "experiment eval times must be increasing");
    sp.validate();
    const WaveProfile& p = *prof;
    EntireSolutionApprox r;
    r.n_list = n_list;
    r.eval_times = opt.eval_times;
    r.T1 = std::isnan(opt.T1) ? sp.T() : std::min(opt.T1, sp.T());
    for (int n : n_list)
        require(-n <= r.T1, "every start time -n must satisfy -n <= T1 = " + std::to_string(r.T1));
    if (!g.obstacle().empty() && g.obstacle().require_left_halfplane)
        require(g.obstacle().extents()[1] <= 0.0, "obstacle must lie in {x1 <= 0}");

    Evolution ev(g, f, planar_closure(prof));
    std::vector<double> rhs;
    const Probe probe = interior_probe(g);
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        const double t0 = -n_list[ni];
        Field u = make_field(g, t0, [&](double x1, double x2) { return w_minus(x1, x2, t0, p, sp); });
        r.start_distance.push_back(front_distance(u, p, t0, probe));
        std::vector<Field> at;
        long step = 0;
        auto check = [&](const Field& cur) {
            ev.rhs(cur.u, cur.t, rhs);
            for (std::size_t k = 0; k < rhs.size(); ++k) {
                if (!g.exterior(k)) continue;
                r.min_ut = std::min(r.min_ut, rhs[k]);
            }
            if (cur.t <= opt.mid_until) {
                const int n2 = g.n2();
                for (int i = 0; i < g.n1(); ++i) {
                    const double ph = p.value(g.x1(i) + p.c * cur.t);
                    if (ph < opt.mid_low || ph > 1.0 - opt.mid_low) continue;
                    for (int j = 0; j < n2; ++j) {
                        const std::size_t k = g.index(i, j);
                        if (g.exterior(k)) r.mid_min_ut = std::min(r.mid_min_ut, rhs[k]);
                    }
                }
            }
            if (cur.t <= r.T1) {
                for (int i = 0; i < g.n1(); ++i)
                    for (int j = 0; j < g.n2(); ++j) {
                        const std::size_t k = g.index(i, j);
                        if (!g.exterior(k)) continue;
                        const double lo = w_minus(g.x1(i), g.x2(j), cur.t, p, sp);
                        const double hi = w_plus(g.x1(i), g.x2(j), cur.t, p, sp);
                        const double gap = std::min(cur.u[k] - lo, hi - cur.u[k]);
                        r.sandwich_worst = std::min(r.sandwich_worst, gap);
                        if (gap < -1e-8) ++r.sandwich_violations;
                    }
            }
        };
        check(u);
        for (double te : opt.eval_times) {
            require(te >= t0, "evaluation times must follow every start time");
            ev.advance(u, te, opt.dt, opt.scheme, [&](const Field& cur) {
                if (++step % opt.check_stride == 0) check(cur);
            });
            at.push_back(u);
        }
        if (ni + 1 == n_list.size() && !std::isnan(opt.lipschitz_until)) {
            // continue the last run from t = 0 for the Lipschitz transfer check
            const auto z0 = std::find(opt.eval_times.begin(), opt.eval_times.end(), 0.0);
            require(z0 != opt.eval_times.end(), "the Lipschitz check needs 0 among the evaluation times");
            Field v = at[static_cast<std::size_t>(z0 - opt.eval_times.begin())];
            r.lipschitz.emplace_back(0.0, lipschitz_quotient(v));
            for (double t = opt.lipschitz_stride; t <= opt.lipschitz_until + 1e-9; t += opt.lipschitz_stride) {
                ev.advance(v, t, opt.dt, opt.scheme);
                r.lipschitz.emplace_back(t, lipschitz_quotient(v));
            }
        }
        r.fields.push_back(std::move(at));
    }
    r.cauchy.assign(opt.eval_times.size(), {});
    for (std::size_t ti = 0; ti < opt.eval_times.size(); ++ti)
        for (std::size_t ni = 0; ni + 1 < n_list.size(); ++ni) {
            const Field& a = r.fields[ni][ti];
            const Field& b = r.fields[ni + 1][ti];
            r.cauchy[ti].push_back(sup_distance(a, b));
            for (std::size_t k = 0; k < a.u.size(); ++k)
                if (g.exterior(k)) r.monotone_min = std::min(r.monotone_min, b.u[k] - a.u[k]);
        }
    const auto zero = std::find(opt.eval_times.begin(), opt.eval_times.end(), 0.0);
    if (zero != opt.eval_times.end() && n_list.size() > 1)
        r.error_estimate = r.cauchy[static_cast<std::size_t>(zero - opt.eval_times.begin())].back();
    return r;
}

// ---- recovery -----------------------------------------------------------------

struct RecoveryConfig {
    double front_x = 8.0;   // initial theta0-crossing
    double t_end = 80.0;
    double dt = 0.05;
    Scheme scheme = Scheme::rk4;
    double diag_every = 0.5;
    double eps_boundary = 0.01;        // u >= 1 - eps on cells next to K
    std::vector<double> lines{0.0};    // x2 of the front-position lines
    double peak_threshold = 0.1;
    double final_threshold = 0.05;
    double relapse_threshold = 0.15;
    double snapshot_every = 0.0;       // > 0 keeps a trajectory for far-field checks
};

/// Optional large-time pair for the sandwich check after hand-off.
struct SandwichSpec {
    const LargeTimeParams* params = nullptr;
    const ZFunction* z = nullptr;
    double tol = 1e-8;
};

struct FrontDiagnostics {
    std::vector<double> t, D, umin, umax;
    std::vector<std::vector<double>> front;  // [line][sample]
    std::vector<double> lines;
    double peak_D = 0.0, final_D = 0.0;
    double first_below = std::numeric_limits<double>::quiet_NaN();  // first t with D < peak_threshold after the peak
    double relapse_max = 0.0;                                         // max D after first_below
    double t_boundary = std::numeric_limits<double>::quiet_NaN();   // u >= 1 - eps on cells next to K
    double t_handoff = std::numeric_limits<double>::quiet_NaN();    // D over all cells <= z(1)
    double handoff_eps = 0.0;
    bool sandwich_checked = false;
    std::size_t sandwich_violations = 0;
    double sandwich_worst = 0.0;
    bool hypothesis_ok = false;   // boundary and far-field closeness reached
    bool conclusion_ok = false;   // peak above, final below, no relapse
    Trajectory trajectory;
};

inline FrontDiagnostics recovery_experiment(const ExteriorGrid& g, const Bistable& f,
                                            std::shared_ptr<const WaveProfile> prof, const RecoveryConfig& cfg,
                                            const SandwichSpec& sw = {}) {
    require(cfg.t_end > 0.0 && cfg.diag_every > 0.0, "experiment.t_end and diag interval must be positive");
    if (!g.obstacle().empty()) {
        const auto e = g.obstacle().extents();
        require(cfg.front_x > e[1], "experiment.front_x must start to the right of the obstacle");
        require(prof->c * cfg.t_end > cfg.front_x - e[1],
                "front never reaches the obstacle before experiment.t_end");
    }
    const WaveProfile& p = *prof;
    const double s0 = -cfg.front_x;
    Evolution ev(g, f, planar_closure(prof, s0));
    Field u = make_field(g, 0.0, [&](double x1, double) { return p.value(x1 + s0); });
    const Probe probe = interior_probe(g);
    const Probe all{g.box().x1lo, g.box().x1hi, g.box().x2lo, g.box().x2hi};

    // exterior cells within 1.5 h of K
    std::vector<std::size_t> rim;
    if (!g.obstacle().empty())
        for (int i = 0; i < g.n1(); ++i)
            for (int j = 0; j < g.n2(); ++j) {
                const std::size_t k = g.index(i, j);
                if (!g.exterior(k)) continue;
                bool near = false;
                for (int a = -1; a <= 1 && !near; ++a)
                    for (int b = -1; b <= 1; ++b) {
                        const int ii = i + a, jj = j + b;
                        if (ii < 0 || jj < 0 || ii >= g.n1() || jj >= g.n2()) continue;
                        if (!g.exterior(g.index(ii, jj))) { near = true; break; }
                    }
                if (near) rim.push_back(k);
            }

    FrontDiagnostics d;
    d.lines = cfg.lines;
    d.front.assign(cfg.lines.size(), {});
    d.handoff_eps = sw.z ? (*sw.z)(1.0) : 0.0;
    d.trajectory.dt = cfg.dt;
    d.trajectory.scheme = cfg.scheme;
    double next_snap = 0.0;
    LargeTimeParams lt = sw.params ? *sw.params : LargeTimeParams{};

    auto record = [&](const Field& cur) {
        const double t = cur.t;
        const double D = front_distance(cur, p, t, probe, s0);
        d.t.push_back(t);
        d.D.push_back(D);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t k = 0; k < cur.u.size(); ++k)
            if (g.exterior(k)) {
                lo = std::min(lo, cur.u[k]);
                hi = std::max(hi, cur.u[k]);
            }
        d.umin.push_back(lo);
        d.umax.push_back(hi);
        for (std::size_t l = 0; l < cfg.lines.size(); ++l)
            d.front[l].push_back(front_position(cur, p.theta0, cfg.lines[l]));
        if (std::isnan(d.t_boundary) && rim.empty()) d.t_boundary = t;  // vacuous without K
        if (std::isnan(d.t_boundary)) {
            bool ok = true;
            for (std::size_t k : rim)
                if (cur.u[k] < 1.0 - cfg.eps_boundary) { ok = false; break; }
            if (ok) d.t_boundary = t;
        }
        if (sw.params && sw.z && std::isnan(d.t_handoff) && !std::isnan(d.t_boundary) &&
            front_distance(cur, p, t, all, s0) <= d.handoff_eps) {
            d.t_handoff = t;
            lt.t_eps = t;
        }
        if (!std::isnan(d.t_handoff)) {
            // s = t - t_handoff + 1 in the certificate clock
            const double s = t - d.t_handoff + 1.0;
            d.sandwich_checked = true;
            for (int i = 0; i < g.n1(); ++i)
                for (int j = 0; j < g.n2(); ++j) {
                    const std::size_t k = g.index(i, j);
                    if (!g.exterior(k)) continue;
                    const double lo2 = u_minus(g.x1(i) + s0, g.x2(j), s, p, lt, *sw.z);
                    const double hi2 = u_plus(g.x1(i) + s0, g.x2(j), s, p, lt, *sw.z);
                    const double gap = std::min(cur.u[k] - lo2, hi2 - cur.u[k]);
                    d.sandwich_worst = std::min(d.sandwich_worst, gap);
                    if (gap < -sw.tol) ++d.sandwich_violations;
                }
        }
        if (cfg.snapshot_every > 0.0 && t >= next_snap - 1e-9) {
            d.trajectory.snapshots.push_back(cur);
            next_snap += cfg.snapshot_every;
        }
    };

    record(u);
    for (double t = cfg.diag_every; t <= cfg.t_end + 1e-9; t += cfg.diag_every) {
        ev.advance(u, std::min(t, cfg.t_end), cfg.dt, cfg.scheme);
        record(u);
    }
    std::size_t ipk = 0;
    for (std::size_t i = 0; i < d.D.size(); ++i)
        if (d.D[i] > d.peak_D) {
            d.peak_D = d.D[i];
            ipk = i;
        }
    d.final_D = d.D.back();
    for (std::size_t i = ipk; i < d.D.size(); ++i) {
        if (std::isnan(d.first_below)) {
            if (d.D[i] < cfg.peak_threshold) d.first_below = d.t[i];
        } else {
            d.relapse_max = std::max(d.relapse_max, d.D[i]);
        }
    }
    d.hypothesis_ok = !std::isnan(d.t_boundary);
    d.conclusion_ok = d.peak_D > cfg.peak_threshold && d.final_D < cfg.final_threshold &&
                      d.relapse_max <= cfg.relapse_threshold;
    return d;
}

// ---- far field ------------------------------------------------------------------

struct FarfieldReport {
    std::vector<double> offsets;
    std::vector<double> distance;   // sup over snapshots and window
    bool strictly_decreasing = false;
};

/// For each offset o, sup over snapshots of |u - phi(x1 + c t + shift)| on the window
/// x1 in the probe range, |x2 - o| <= half_width.
inline FarfieldReport farfield_translate_check(const Trajectory& tr, const WaveProfile& p,
                                               const std::vector<double>& offsets, double half_width,
                                               double shift = 0.0) {
    require(!tr.snapshots.empty(), "far-field check needs a trajectory");
    const ExteriorGrid& g = *tr.snapshots.front().grid;
    require(g.dim() == 2, "far-field check needs a 2-D run");
    const Probe base = interior_probe(g);
    FarfieldReport r;
    r.offsets = offsets;
    for (double o : offsets) {
        Probe w{base.x1lo, base.x1hi, o - half_width, o + half_width};
        if (w.x2lo < base.x2lo - 1e-9 || w.x2hi > base.x2hi + 1e-9)
            throw ConfigError("experiment.offsets: window at " + std::to_string(o) + " leaves the box");
        double m = 0.0;
        for (const Field& s : tr.snapshots) m = std::max(m, front_distance(s, p, s.t, w, shift));
        r.distance.push_back(m);
    }
    r.strictly_decreasing = true;
    for (std::size_t i = 1; i < r.distance.size(); ++i)
        if (!(r.distance[i] < r.distance[i - 1])) r.strictly_decreasing = false;
    return r;
}

// ---- stationary problem ----------------------------------------------------------

struct LiouvilleConfig {
    double dip = 0.5;      // value on the obstacle rim
    double width = 2.0;    // dip decays to 1 at this distance from K
    double t_end = 200.0;
    double dt = 0.08;
    Scheme scheme = Scheme::rk4;
};

struct LiouvilleReport {
    ConditionFReport condition;
    double sup_dev = 0.0;   // sup |u - 1|
    double rhs_sup = 0.0;   // sup |u_t|
    double t = 0.0;
    std::vector<std::pair<double, double>> history;  // (t, sup |u - 1|)
};

inline Field stationary_liouville(const ExteriorGrid& g, const Bistable& f, const LiouvilleConfig& cfg,
                                  LiouvilleReport* report = nullptr) {
    require(!g.obstacle().empty(), "the stationary experiment needs an obstacle");
    LiouvilleReport rep;
    rep.condition = check_condition_F(f, g.min_degree());
    if (!rep.condition.pass) throw ConfigError("condition (F) fails for this obstacle and nonlinearity");
    // distance to K from the obstacle nodes
    std::vector<std::pair<double, double>> kpts;
    for (int i = 0; i < g.n1(); ++i)
        for (int j = 0; j < g.n2(); ++j)
            if (!g.exterior(g.index(i, j))) kpts.emplace_back(g.x1(i), g.x2(j));
    Evolution ev(g, f, constant_closure(1.0));
    Field u = make_field(g, 0.0, [&](double x1, double x2) {
        double dmin = std::numeric_limits<double>::infinity();
        for (const auto& [a, b] : kpts) dmin = std::min(dmin, std::hypot(x1 - a, x2 - b));
        const double s = std::max(0.0, 1.0 - dmin / cfg.width);
        return 1.0 - (1.0 - cfg.dip) * s;
    });
    std::vector<double> rhs;
    auto dev = [&](const Field& cur) {
        double m = 0.0;
        for (std::size_t k = 0; k < cur.u.size(); ++k)
            if (g.exterior(k)) m = std::max(m, std::abs(cur.u[k] - 1.0));
        return m;
    };
    rep.history.emplace_back(0.0, dev(u));
    for (double t = 10.0; t <= cfg.t_end + 1e-9; t += 10.0) {
        ev.advance(u, std::min(t, cfg.t_end), cfg.dt, cfg.scheme);
        rep.history.emplace_back(u.t, dev(u));
    }
    if (u.t < cfg.t_end) ev.advance(u, cfg.t_end, cfg.dt, cfg.scheme);
    ev.rhs(u.u, u.t, rhs);
    for (std::size_t k = 0; k < rhs.size(); ++k)
        if (g.exterior(k)) rep.rhs_sup = std::max(rep.rhs_sup, std::abs(rhs[k]));
    rep.sup_dev = dev(u);
    rep.t = u.t;
    if (report) *report = rep;
    return u;
}

}  // namespace nldisp
