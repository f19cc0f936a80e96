#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "domain.hpp"
#include "error.hpp"
#include "nonlinearity.hpp"
#include "traveling_wave.hpp"

namespace nldisp {

/// Values of u outside the computational box, as a function of (x1, x2, t).
using Closure = std::function<double(double, double, double)>;

inline Closure constant_closure(double v) {
    return [v](double, double, double) { return v; };
}

/// phi(x1 + c t + shift): the planar wave continued past the box.
inline Closure planar_closure(std::shared_ptr<const WaveProfile> p, double shift = 0.0) {
    return [p, shift](double x1, double, double t) { return p->value(x1 + p->c * t + shift); };
}

enum class Scheme { heun, rk4 };

inline std::string scheme_name(Scheme s) { return s == Scheme::rk4 ? "rk4" : "heun"; }

struct Field {
    const ExteriorGrid* grid = nullptr;
    std::vector<double> u;  // obstacle nodes hold 0 and are masked out of every integral
    double t = 0.0;
};

inline Field make_field(const ExteriorGrid& g, double t, const std::function<double(double, double)>& init) {
    Field f{&g, std::vector<double>(g.size(), 0.0), t};
    for (int i = 0; i < g.n1(); ++i)
        for (int j = 0; j < g.n2(); ++j) {
            const std::size_t k = g.index(i, j);
            if (g.exterior(k)) f.u[k] = init(g.x1(i), g.x2(j));
        }
    return f;
}

struct Trajectory {
    std::vector<Field> snapshots;
    double dt = 0.0;
    Scheme scheme = Scheme::rk4;
};

struct PicardReport {
    int iterations = 0;
    std::vector<double> distances;  // sup distance between successive iterates
    double max_ratio = 0.0;         // over iterations whose distances are above roundoff
    double bound = 0.0;             // (2 + max f') t_window
};

struct OrderingReport {
    double min_diff = 0.0;
    std::size_t violations = 0;
    std::size_t worst = 0;
};

/// Semi-discrete form of u_t = conv(J, u chi_Omega) - d u + f(u) on a grid.
class Evolution {
public:
    Evolution(const ExteriorGrid& g, const Bistable& f, Closure closure)
        : g_(&g), f_(f), closure_(std::move(closure)) {}

    const ExteriorGrid& grid() const { return *g_; }
    const Bistable& nonlinearity() const { return f_; }
    double dt_max() const { return 0.25 / (2.0 + f_.lipschitz()); }

    void rhs(const std::vector<double>& u, double t, std::vector<double>& out) const {
        const ExteriorGrid& g = *g_;
        require(u.size() == g.size(), "field does not match the grid");
        g.convolve(u, [&](double x1, double x2) { return closure_(x1, x2, t); }, out);
        const auto& d = g.degree();
        for (std::size_t k = 0; k < u.size(); ++k)
            out[k] = g.exterior(k) ? out[k] - d[k] * u[k] + f_(u[k]) : 0.0;
    }

    Field rhs(const Field& u) const {
        check(u);
        Field r{g_, {}, u.t};
        rhs(u.u, u.t, r.u);
        return r;
    }

    Field step(const Field& u, double dt, Scheme s) const {
        check(u);
        require(dt > 0.0 && dt <= dt_max() * (1 + 1e-12),
                "evolve.dt must satisfy 0 < dt <= 0.25 / (2 + Lip f)");
        Field out = u;
        step_inplace(out, dt, s);
        return out;
    }

    /// Steps to t1 exactly (the last step shortened); on_step after every step.
    void advance(Field& u, double t1, double dt, Scheme s,
                 const std::function<void(const Field&)>& on_step = {}) const {
        check(u);
        require(dt > 0.0 && dt <= dt_max() * (1 + 1e-12),
                "evolve.dt must satisfy 0 < dt <= 0.25 / (2 + Lip f)");
        require(t1 >= u.t, "advance needs t1 >= t0");
        const double t0 = u.t;
        const long nfull = static_cast<long>(std::floor((t1 - t0) / dt * (1 + 1e-14)));
        for (long k = 1; k <= nfull; ++k) {
            const double target = t0 + k * dt;
            step_inplace(u, target - u.t, s);
            u.t = target;
            if (on_step) on_step(u);
        }
        if (t1 - u.t > 1e-12 * std::max(1.0, std::abs(t1))) {
            step_inplace(u, t1 - u.t, s);
            if (on_step) on_step(u);
        }
        u.t = t1;
    }

    Trajectory solve_interval(const Field& u0, double t1, double dt, int snapshot_stride,
                              Scheme s) const {
        require(snapshot_stride >= 1, "evolve.snapshot_stride must be >= 1");
        Trajectory tr;
        tr.dt = dt;
        tr.scheme = s;
        tr.snapshots.push_back(u0);
        if (t1 == u0.t) return tr;
        Field u = u0;
        long count = 0;
        advance(u, t1, dt, s, [&](const Field& cur) {
            if (++count % snapshot_stride == 0 && cur.t < t1) tr.snapshots.push_back(cur);
        });
        tr.snapshots.push_back(u);
        return tr;
    }

    /// Fixed-point iteration of u(t) = u0 + int_0^t F(u(s)) ds with the
    /// trapezoid rule on `inner` subintervals of [t0, t0 + t_window].
    Field picard_solve(const Field& u0, double t_window, int iterations, int inner = 200,
                       PicardReport* report = nullptr, double tol = 1e-14) const {
        check(u0);
        const double bound = (2.0 + f_.max_fprime()) * t_window;
        require(t_window > 0.0 && bound < 1.0, "Picard window violates (2 + max f') t < 1");
        require(iterations >= 1 && inner >= 1, "Picard needs iterations >= 1 and inner >= 1");
        const std::size_t n = u0.u.size();
        const double ds = t_window / inner;
        std::vector<std::vector<double>> U(static_cast<std::size_t>(inner + 1), u0.u), F(U.size());
        PicardReport rep;
        rep.bound = bound;
        double prev = -1.0;
        for (int it = 0; it < iterations; ++it) {
            for (int l = 0; l <= inner; ++l) rhs(U[static_cast<std::size_t>(l)], u0.t + l * ds, F[static_cast<std::size_t>(l)]);
            double dist = 0.0;
            std::vector<double> acc(n, 0.0);
            for (int l = 1; l <= inner; ++l) {
                auto& cur = U[static_cast<std::size_t>(l)];
                const auto& fa = F[static_cast<std::size_t>(l - 1)];
                const auto& fb = F[static_cast<std::size_t>(l)];
                for (std::size_t k = 0; k < n; ++k) {
                    if (!g_->exterior(k)) continue;
                    acc[k] += 0.5 * ds * (fa[k] + fb[k]);
                    const double nv = u0.u[k] + acc[k];
                    dist = std::max(dist, std::abs(nv - cur[k]));
                    cur[k] = nv;
                }
            }
            rep.distances.push_back(dist);
            rep.iterations = it + 1;
            if (prev > 0.0 && prev > 1e3 * tol) rep.max_ratio = std::max(rep.max_ratio, dist / prev);
            prev = dist;
            if (dist <= tol) break;
        }
        if (report) *report = rep;
        if (prev > 1e3 * tol && rep.iterations == iterations)
            throw NumericalError("Picard iteration did not converge (last distance " + std::to_string(prev) + ")");
        if (rep.max_ratio >= 1.0) throw NumericalError("Picard iterates are not contracting");
        return Field{g_, U.back(), u0.t + t_window};
    }

private:
    void check(const Field& u) const {
        require(u.grid == g_, "field belongs to a different grid");
        require(u.u.size() == g_->size(), "field does not match the grid");
    }

    void step_inplace(Field& u, double dt, Scheme s) const {
        const std::size_t n = u.u.size();
        thread_local std::vector<double> k1, k2, k3, k4, tmp;
        const double t = u.t;
        rhs(u.u, t, k1);
        tmp.resize(n);
        if (s == Scheme::heun) {
            for (std::size_t i = 0; i < n; ++i) tmp[i] = u.u[i] + dt * k1[i];
            rhs(tmp, t + dt, k2);
            for (std::size_t i = 0; i < n; ++i) u.u[i] += 0.5 * dt * (k1[i] + k2[i]);
        } else {
            for (std::size_t i = 0; i < n; ++i) tmp[i] = u.u[i] + 0.5 * dt * k1[i];
            rhs(tmp, t + 0.5 * dt, k2);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = u.u[i] + 0.5 * dt * k2[i];
            rhs(tmp, t + 0.5 * dt, k3);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = u.u[i] + dt * k3[i];
            rhs(tmp, t + dt, k4);
            for (std::size_t i = 0; i < n; ++i)
                u.u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        u.t = t + dt;
    }

    const ExteriorGrid* g_;
    Bistable f_;
    Closure closure_;
};

inline OrderingReport ordering_report(const Field& u, const Field& v, double tol = 1e-10) {
    require(u.grid && u.grid == v.grid, "ordering_report needs fields on the same grid");
    require(std::abs(u.t - v.t) <= 1e-12 * std::max(1.0, std::abs(u.t)), "ordering_report needs equal time stamps");
    OrderingReport r;
    r.min_diff = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < u.u.size(); ++k) {
        if (!u.grid->exterior(k)) continue;
        const double d = u.u[k] - v.u[k];
        if (d < r.min_diff) {
            r.min_diff = d;
            r.worst = k;
        }
        if (d < -tol) ++r.violations;
    }
    return r;
}

/// sup over exterior nodes of |a - b|.
inline double sup_distance(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.u.size(); ++k)
        if (a.grid->exterior(k)) m = std::max(m, std::abs(a.u[k] - b.u[k]));
    return m;
}

}  // namespace nldisp
