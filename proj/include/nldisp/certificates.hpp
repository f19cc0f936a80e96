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
#include "kernel.hpp"
#include "nonlinearity.hpp"
#include "quadrature.hpp"
#include "traveling_wave.hpp"
#include "zfunction.hpp"

namespace nldisp {

// ---- shifted pair W-, W+ -----------------------------------------------------

struct ShiftParams {
    double M = 1.0;
    double lambda0 = 0.5;
    double c = 0.1;

    /// Blow-up time of xi: 1 - (M/c) e^{lambda0 c T} = 0 shifted so that cT + xi(T) = 0.
    double T() const { return std::log(c / (c + M)) / (lambda0 * c); }

    void validate() const {
        require(M > 0.0, "certify.M must be positive");
        require(lambda0 > 0.0, "certify.lambda0 must be positive");
        require(c > 0.0, "shift params need c > 0");
    }
    void validate(const WaveProfile& p) const {
        validate();
        require(lambda0 < std::min(p.lambda, p.k_phi), "certify.lambda0 must lie below min(lambda, k_phi)");
    }
};

/// xi(t) = (1/lambda0) ln(1 / (1 - (M/c) e^{lambda0 c t})).
inline double xi(double t, const ShiftParams& p) {
    if (t > p.T() + 1e-12 * std::max(1.0, std::abs(p.T())))
        throw DomainError("xi: t = " + std::to_string(t) + " exceeds T = " + std::to_string(p.T()));
    const double q = p.M / p.c * std::exp(p.lambda0 * p.c * t);
    return -std::log1p(-std::min(q, 1.0 - 1e-300)) / p.lambda0;
}

inline double xi_dot(double t, const ShiftParams& p) {
    return p.M * std::exp(p.lambda0 * (p.c * t + xi(t, p)));
}

inline double w_minus(double x1, double /*x2*/, double t, const WaveProfile& prof, const ShiftParams& p) {
    const double s = xi(t, p);
    if (x1 < 0.0) return 0.0;
    return prof.value(x1 + prof.c * t - s) - prof.value(-x1 + prof.c * t - s);
}

inline double w_plus(double x1, double /*x2*/, double t, const WaveProfile& prof, const ShiftParams& p) {
    const double s = xi(t, p);
    if (x1 < 0.0) return 2.0 * prof.value(prof.c * t + s);
    return prof.value(x1 + prof.c * t + s) + prof.value(-x1 + prof.c * t + s);
}

// ---- large-time pair u-, u+ --------------------------------------------------

enum class TiltForm { gaussian, linear };

inline std::string tilt_form_name(TiltForm f) { return f == TiltForm::gaussian ? "gaussian" : "linear"; }

struct LargeTimeParams {
    double beta = 0.1, alpha = 0.75, gamma = 2.0;  // theta
    double beta_plus = 0.1, alpha_plus = 0.75;     // theta^1
    double Kz = 1.0;
    double t_eps = 0.0;
    double eps = 0.01;  // z(1) >= eps
    TiltForm form = TiltForm::gaussian;

    void validate() const {
        require(beta > 0.0, "certify.beta must be positive");
        require(alpha > 0.5 && alpha < 1.0, "certify.alpha must lie in (1/2, 1)");
        require(gamma > 1.0, "certify.gamma must exceed 1");
        require(beta_plus > 0.0, "certify.beta_plus must be positive");
        require(alpha_plus >= 0.5 && alpha_plus < 1.0, "certify.alpha_plus must lie in [1/2, 1)");
        require(Kz > 0.0, "certify.Kz must be positive");
        require(t_eps >= 0.0, "certify.t_eps must be >= 0");
        require(eps > 0.0, "certify.eps must be positive");
    }
};

inline double tilt(double x2, double t, double beta, double alpha, double gamma, TiltForm form) {
    const double r = form == TiltForm::gaussian ? x2 * x2 : std::abs(x2);
    return beta * std::pow(t, -alpha) * std::exp(-r / (gamma * t));
}

/// Z(t) = Kz * integral_0^t z.
inline double drift(double t, const LargeTimeParams& lt, const ZFunction& z) { return lt.Kz * z.integral(t); }

inline double xi_minus(double x1, double x2, double t, const WaveProfile& prof, const LargeTimeParams& lt,
                       const ZFunction& z) {
    return x1 + prof.c * (t - 1.0 + lt.t_eps) - tilt(x2, t, lt.beta, lt.alpha, lt.gamma, lt.form) - drift(t, lt, z);
}

inline double psi_plus(double x1, double x2, double t, const WaveProfile& prof, const LargeTimeParams& lt,
                       const ZFunction& z) {
    return x1 + prof.c * (t - 1.0 + lt.t_eps) + tilt(x2, t, lt.beta_plus, lt.alpha_plus, lt.gamma, lt.form) +
           drift(t, lt, z);
}

inline double u_minus(double x1, double x2, double t, const WaveProfile& prof, const LargeTimeParams& lt,
                      const ZFunction& z) {
    if (t < 1.0) throw DomainError("u-: defined for t >= 1");
    return prof.value(xi_minus(x1, x2, t, prof, lt, z)) - z(t);
}

inline double u_plus(double x1, double x2, double t, const WaveProfile& prof, const LargeTimeParams& lt,
                     const ZFunction& z) {
    if (t < 1.0) throw DomainError("u+: defined for t >= 1");
    return prof.value(psi_plus(x1, x2, t, prof, lt, z)) + z(t);
}

// ---- planar pair -------------------------------------------------------------

struct PlanarSqueezeParams {
    double omega = 0.0;
    double eta = 0.0;
    double A = 0.0;
    double delta = 0.0;
    double eps = 0.0;
    double t0 = 0.0;
    double fnorm = 0.0;  // sup |f'|

    double drift_scale() const { return 2.0 * eps * fnorm / (delta * omega); }
    void validate() const {
        require(omega > 0.0 && eta > 0.0 && delta > 0.0 && fnorm > 0.0, "planar params must be positive");
        require(eps > 0.0 && eps < 0.5 * eta, "planar eps must lie in (0, eta/2)");
    }
};

/// Largest eta with f' <= -omega on [0, eta] and [1 - eta, 1].
inline double flat_zone(const Bistable& f, double omega, int grid = 20000) {
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i <= grid; ++i) {
        const double u = 0.5 * i / grid;
        if (f.fprime(u) > -omega) break;
        lo = u;
    }
    for (int i = 0; i <= grid; ++i) {
        const double u = 0.5 * i / grid;
        if (f.fprime(1.0 - u) > -omega) break;
        hi = u;
    }
    return std::min(lo, hi);
}

inline PlanarSqueezeParams planar_params(const WaveProfile& prof, const Bistable& f, double t0 = 0.0,
                                         double eps_fraction = 0.25) {
    require(eps_fraction > 0.0 && eps_fraction < 0.5, "planar eps fraction must lie in (0, 1/2)");
    PlanarSqueezeParams p;
    p.omega = 0.5 * std::min(std::abs(f.fp0()), std::abs(f.fp1()));
    p.eta = flat_zone(f, p.omega);
    if (!(p.eta > 0.0)) throw NumericalError("planar: empty flat zone");
    double zl = -prof.zmax, zr = prof.zmax;
    for (int i = 0; i < prof.n; ++i)
        if (prof.phi[static_cast<std::size_t>(i)] <= 0.5 * p.eta) zl = prof.z(i);
    for (int i = prof.n - 1; i >= 0; --i)
        if (prof.comp[static_cast<std::size_t>(i)] <= 0.5 * p.eta) zr = prof.z(i);
    p.A = std::max(std::abs(zl), std::abs(zr));
    p.delta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < prof.n; ++i)
        if (std::abs(prof.z(i)) <= p.A + 1e-12) p.delta = std::min(p.delta, prof.dphi[static_cast<std::size_t>(i)]);
    p.eps = eps_fraction * p.eta;
    p.t0 = t0;
    p.fnorm = f.lipschitz();
    p.validate();
    return p;
}

/// sign < 0: lower function phi(xi_-) - eps e^{-omega (t - t0)}; sign > 0: upper.
inline double planar_sub_super(double x1, double /*x2*/, double t, const WaveProfile& prof,
                               const PlanarSqueezeParams& p, int sign) {
    if (t < p.t0) throw DomainError("planar pair: t < t0");
    const double e = std::exp(-p.omega * (t - p.t0));
    const double s = sign > 0 ? 1.0 : -1.0;
    const double arg = x1 + prof.c * t + s * p.drift_scale() * (1.0 - e);
    return prof.value(arg) + s * p.eps * e;
}

// ---- floors ------------------------------------------------------------------

struct ShiftFloors {
    double Lf = 0, k3 = 0, k4 = 0, L0 = 0, L2 = 0, C0 = 0;
    double case_a = 0;           // Lf beta0 / k3
    double wplus_far = 0;        // Lf alpha0 e^{mu L0} / gamma1 (mu > lambda), else Lf alpha0 / gamma1
    double wplus_far_beta = 0;   // same with the upper tail constant beta0
    double wplus_mid = 0;        // (Lf beta0 + C0) / (2 gamma0)
    double wplus_mid_alpha = 0;  // (Lf beta0 + C0) / (2 alpha0)
    double wplus_left = 0;       // C0 / (2 gamma0)

    double floor() const { return std::max({case_a, wplus_far, wplus_far_beta, wplus_mid, wplus_left}); }
};

namespace detail {

// Nodes clear of the clamp layer on each side.
inline std::pair<int, int> interior_range(const WaveProfile& p) {
    const double cut = p.zmax - 2.0 * p.support;
    int a = 0, b = p.n - 1;
    while (a < p.n && p.z(a) < -cut) ++a;
    while (b >= 0 && p.z(b) > cut) --b;
    return {a, b};
}

// [f(a) + s f(b) - f(a + s b)] / b, with the first-order form when b is tiny.
inline double split_quotient(const Bistable& f, double a, double b, double s) {
    if (b > 1e-5) return (f(a) + s * f(b) - f(a + s * b)) / b;
    return s * (f.fprime(0.0) - f.fprime(a));
}

// Smallest node offset z >= 0 such that every pair (z+, z-) with z+ >= z, z- <= -z passes.
template <class Pass>
double pair_threshold(const WaveProfile& p, Pass&& pass) {
    const auto [a, b] = interior_range(p);
    double worst = -1.0;
    for (int i = p.i0; i <= b; ++i)
        for (int j = a; j <= p.i0; ++j) {
            const double zp = p.z(i), zm = p.z(j);
            const double level = std::min(zp, -zm);
            if (level <= worst) continue;
            if (!pass(p.phi[static_cast<std::size_t>(i)], p.phi[static_cast<std::size_t>(j)])) worst = level;
        }
    return worst < 0.0 ? 0.0 : worst + p.h;
}

}  // namespace detail

/// min over xi2 < xi1 < 0 of (phi'(xi1) - phi'(xi2)) / (phi(xi1) - phi(xi2)).
inline double k3_constant(const WaveProfile& p) {
    const auto [a, b] = detail::interior_range(p);
    (void)b;
    double m = std::numeric_limits<double>::infinity();
    for (int i = a + 1; i <= p.i0; ++i)
        for (int j = a; j < i; ++j) {
            const auto I = static_cast<std::size_t>(i), J = static_cast<std::size_t>(j);
            const double dv = p.phi[I] - p.phi[J];
            if (dv <= 0.0) throw NumericalError("k3: profile is not increasing on z < 0");
            m = std::min(m, (p.dphi[I] - p.dphi[J]) / dv);
        }
    return m;
}

inline ShiftFloors shift_floors(const WaveProfile& p, const Bistable& f, const Kernel1D& j1) {
    ShiftFloors s;
    s.Lf = f.lf_constant();
    s.k3 = k3_constant(p);
    if (!(s.k3 > 0.0)) throw NumericalError("k3 is not positive; the profile is not convex on z < 0");
    s.k4 = 0.45 * std::abs(f.fp1() - f.fp0());
    const double half_gap = 0.5 * (f.fp0() - f.fp1());
    s.L0 = detail::pair_threshold(p, [&](double pp, double pm) {
        return detail::split_quotient(f, pp, pm, 1.0) >= half_gap;
    });
    s.L2 = detail::pair_threshold(p, [&](double pp, double pm) {
        return detail::split_quotient(f, pp, pm, -1.0) <= -s.k4;
    });

    // C0 = K_phi max_{x1 in [0, L]} int_{x1-L}^{0} J1(x1 - y) (2 + 2 cosh(lambda y)) dy
    const double L = j1.support_radius();
    const double lg = p.lambda_grid > 0.0 ? p.lambda_grid : p.lambda;
    double best = 0.0;
    for (int k = 0; k <= 200; ++k) {
        const double x = L * k / 200.0;
        const double v = simpson([&](double y) { return j1(x - y) * (2.0 + 2.0 * std::cosh(lg * y)); },
                                 x - L, 0.0, 512);
        best = std::max(best, v);
    }
    s.C0 = p.K_phi * best;

    s.case_a = s.Lf * p.beta0 / s.k3;
    const double grow = p.mu > p.lambda ? std::exp(p.mu * s.L0) : 1.0;
    s.wplus_far = s.Lf * p.alpha0 * grow / p.gamma1;
    s.wplus_far_beta = s.Lf * p.beta0 * grow / p.gamma1;
    s.wplus_mid = (s.Lf * p.beta0 + s.C0) / (2.0 * p.gamma0);
    s.wplus_mid_alpha = (s.Lf * p.beta0 + s.C0) / (2.0 * p.alpha0);
    s.wplus_left = s.C0 / (2.0 * p.gamma0);
    return s;
}

/// Profile- and f-dependent constants of the large-time pair.
struct LargeTimeFloors {
    double sigma = 0;        // f' <= -sigma on the flat zones
    double eta_flat = 0;     // flat-zone width for sigma
    double eta_case = 0;     // case split, eta_flat - eps1 so that phi -+ z stays flat
    double tau0 = 0;         // min phi' on {phi in [eta_case, 1 - eta_case]}
    double delta_up = 0;     // max f' on [eta_case - eps1, 1 - eta_case + eps1]
    double delta_prime = 0;  // -min f' on [0, 1]
    double dphi_sup = 0;
    double K0 = 0;
    double eta_z = 0;
    double C_prime = 0;      // tilt defect of theta
    double C_K = 0;          // obstacle defect on the mid-zone of u-
    double M_prime_tilt = 0; // tilt defect of theta^1
    double M_prime_K = 0;    // obstacle defect on the mid-zone of u+

    double M_prime() const { return M_prime_tilt + M_prime_K; }
    /// Kz with -Kz tau0 + delta0 + eta_z + (alpha beta + C_K + C') |phi'| / K0 <= -eta_z / 2.
    double Kz_sub(const LargeTimeParams& lt) const {
        return (delta_up + 1.5 * eta_z + (lt.alpha * lt.beta + C_K + C_prime) * dphi_sup / K0) / tau0;
    }
    /// Kz with (Kz - (alpha+ beta+ + M') / K0) tau0 - delta - eta_z >= 0. f(phi) - f(phi + z)
    /// is bounded below by -max f' z, so the larger of max f' and -min f' is used.
    double Kz_super(const LargeTimeParams& lt) const {
        return (std::max(delta_up, delta_prime) + eta_z) / tau0 + (lt.alpha_plus * lt.beta_plus + M_prime()) / K0;
    }
    double Kz_floor(const LargeTimeParams& lt) const { return std::max(Kz_sub(lt), Kz_super(lt)); }
};

/// Combined report for the CLI and the acceptance binary.
struct CertificateConstants {
    ShiftFloors shift;
    PlanarSqueezeParams planar;
    LargeTimeFloors large;
    double M_floor = 0;
    double M = 0;   // 2 * M_floor
    double T = 0;   // of ShiftParams{M, lambda0, c}
};

// ---- residual scans ----------------------------------------------------------

enum class CertKind { Wminus, Wplus, Uminus, Uplus, PlanarLower, PlanarUpper };

inline std::string cert_kind_name(CertKind k) {
    switch (k) {
        case CertKind::Wminus: return "wminus";
        case CertKind::Wplus: return "wplus";
        case CertKind::Uminus: return "uminus";
        case CertKind::Uplus: return "uplus";
        case CertKind::PlanarLower: return "planar_lower";
        default: return "planar_upper";
    }
}

inline bool cert_is_sub(CertKind k) {
    return k == CertKind::Wminus || k == CertKind::Uminus || k == CertKind::PlanarLower;
}

/// A grid and a time-dependent x1 offset: node x maps to (x1 + shift(t), x2).
/// Shifted windows must be obstacle-free.
struct ScanWindow {
    const ExteriorGrid* grid = nullptr;
    std::function<double(double)> shift;
};

struct ResidualSample {
    double t = 0, extremum = 0, x1 = 0, x2 = 0;
};

struct ResidualReport {
    CertKind which = CertKind::Wminus;
    bool sub = true;
    double tol = 1e-3;
    double extremum = 0;  // sup for sub-solutions, inf for super-solutions
    double x1 = 0, x2 = 0, t = 0;
    bool pass = false;
    double T1 = std::numeric_limits<double>::quiet_NaN();  // last sample before the first failure
    std::vector<ResidualSample> per_time;
};

/// Tolerance model C (h^2 + dt_fd^2).
inline double cert_tolerance(double h, double dt_fd, double C = 0.1) { return C * (h * h + dt_fd * dt_fd); }

/// L w = w_t - conv(J, w chi_Omega) + d w - f(w) at every exterior node of every
/// window and sample time, w_t by central differences and w continued past the box.
template <class W>
ResidualReport scan_residual(CertKind which, const std::vector<ScanWindow>& windows, const Bistable& f, W&& w,
                             const std::vector<double>& times, double dt_fd, double tol) {
    require(!windows.empty() && !times.empty(), "certificate scan needs windows and sample times");
    require(dt_fd > 0.0, "certify.dt_fd must be positive");
    for (const auto& win : windows) {
        const ExteriorGrid& g = *win.grid;
        require(g.kernel().support_radius() / g.h() >= 16.0 - 1e-9,
                "certificate grid too coarse: kernel support spans fewer than 16 cells");
        if (win.shift) require(g.obstacle().empty(), "shifted scan windows must be obstacle-free");
    }
    ResidualReport r;
    r.which = which;
    r.sub = cert_is_sub(which);
    r.tol = tol;
    r.extremum = r.sub ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    bool failed = false;
    std::vector<double> u, conv;
    for (double t : times) {
        ResidualSample s;
        s.t = t;
        s.extremum = r.sub ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        for (const auto& win : windows) {
            const ExteriorGrid& g = *win.grid;
            const double sh = win.shift ? win.shift(t) : 0.0;
            u.assign(g.size(), 0.0);
            for (int i = 0; i < g.n1(); ++i)
                for (int j = 0; j < g.n2(); ++j) {
                    const std::size_t k = g.index(i, j);
                    if (g.exterior(k)) u[k] = w(g.x1(i) + sh, g.x2(j), t);
                }
            g.convolve(u, [&](double a, double b) { return w(a + sh, b, t); }, conv);
            const auto& d = g.degree();
            for (int i = 0; i < g.n1(); ++i)
                for (int j = 0; j < g.n2(); ++j) {
                    const std::size_t k = g.index(i, j);
                    if (!g.exterior(k)) continue;
                    const double x1 = g.x1(i) + sh, x2 = g.x2(j);
                    const double wt = (w(x1, x2, t + dt_fd) - w(x1, x2, t - dt_fd)) / (2.0 * dt_fd);
                    const double v = wt - (conv[k] - d[k] * u[k]) - f(u[k]);
                    const bool worse = r.sub ? v > s.extremum : v < s.extremum;
                    if (worse) {
                        s.extremum = v;
                        s.x1 = x1;
                        s.x2 = x2;
                    }
                }
        }
        r.per_time.push_back(s);
        const bool ok = r.sub ? s.extremum <= tol : s.extremum >= -tol;
        if (!ok) failed = true;
        if (!failed) r.T1 = t;
        const bool worse = r.sub ? s.extremum > r.extremum : s.extremum < r.extremum;
        if (worse) {
            r.extremum = s.extremum;
            r.x1 = s.x1;
            r.x2 = s.x2;
            r.t = t;
        }
    }
    r.pass = r.sub ? r.extremum <= tol : r.extremum >= -tol;
    return r;
}

/// Uniform samples from a to b inclusive.
inline std::vector<double> sample_times(double a, double b, int count) {
    require(count >= 1 && b >= a, "sample_times needs count >= 1 and b >= a");
    std::vector<double> t;
    if (count == 1) return {a};
    for (int i = 0; i < count; ++i) t.push_back(a + (b - a) * i / (count - 1));
    return t;
}

struct CertificateSetup {
    const WaveProfile* profile = nullptr;
    const Bistable* f = nullptr;
    ShiftParams shift;
    LargeTimeParams large;
    const ZFunction* z = nullptr;
    PlanarSqueezeParams planar;
};

/// The certificate as a function of (x1, x2, t).
inline std::function<double(double, double, double)> certificate_function(CertKind k, const CertificateSetup& s) {
    const WaveProfile& p = *s.profile;
    switch (k) {
        case CertKind::Wminus:
            return [&p, sp = s.shift](double a, double b, double t) { return w_minus(a, b, t, p, sp); };
        case CertKind::Wplus:
            return [&p, sp = s.shift](double a, double b, double t) { return w_plus(a, b, t, p, sp); };
        case CertKind::Uminus:
            require(s.z != nullptr, "u- needs a z-function");
            return [&p, lt = s.large, z = s.z](double a, double b, double t) { return u_minus(a, b, t, p, lt, *z); };
        case CertKind::Uplus:
            require(s.z != nullptr, "u+ needs a z-function");
            return [&p, lt = s.large, z = s.z](double a, double b, double t) { return u_plus(a, b, t, p, lt, *z); };
        case CertKind::PlanarLower:
            return [&p, pp = s.planar](double a, double b, double t) { return planar_sub_super(a, b, t, p, pp, -1); };
        default:
            return [&p, pp = s.planar](double a, double b, double t) { return planar_sub_super(a, b, t, p, pp, +1); };
    }
}

/// Checks the validity window of each kind, then scans.
inline ResidualReport certificate_residual(CertKind which, const std::vector<ScanWindow>& windows,
                                           const CertificateSetup& s, const std::vector<double>& times,
                                           double dt_fd, double tol) {
    require(s.profile && s.f, "certificate setup needs a profile and a nonlinearity");
    const double tmin = *std::min_element(times.begin(), times.end());
    const double tmax = *std::max_element(times.begin(), times.end());
    switch (which) {
        case CertKind::Wminus: case CertKind::Wplus:
            s.shift.validate();
            if (tmax + dt_fd > s.shift.T()) throw DomainError("W samples must satisfy t + dt_fd <= T");
            break;
        case CertKind::Uminus: case CertKind::Uplus:
            s.large.validate();
            if (tmin - dt_fd < 1.0) throw DomainError("u+- samples must satisfy t - dt_fd >= 1");
            break;
        default:
            s.planar.validate();
            if (tmin - dt_fd < s.planar.t0) throw DomainError("planar samples must satisfy t - dt_fd >= t0");
    }
    return scan_residual(which, windows, *s.f, certificate_function(which, s), times, dt_fd, tol);
}

// ---- large-time constants ----------------------------------------------------

namespace detail {

// Grid values of g(x) over an obstacle-free grid placed at the given x1 offset.
template <class G>
void fill(const ExteriorGrid& g, double shift, G&& fn, std::vector<double>& out) {
    out.assign(g.size(), 0.0);
    for (int i = 0; i < g.n1(); ++i)
        for (int j = 0; j < g.n2(); ++j) out[g.index(i, j)] = fn(g.x1(i) + shift, g.x2(j));
}

}  // namespace detail

/// Tilt defect: T2(x) = conv(J, phi(arg))(x) - sum_k w1(k) phi(arg(x) + k h), with
/// arg(x) = x1 + sign * theta(x2, t). Returns max over the template and times of
/// sign * T2 t^{a+1} / phi'(arg), restricted to phi' > 1e-10: -T2 is what the
/// sub-solution must absorb, +T2 the super-solution.
inline double tilt_defect(const WaveProfile& p, const ExteriorGrid& tmpl, double beta, double alpha, double gamma,
                          TiltForm form, double sign, const std::vector<double>& times) {
    require(tmpl.obstacle().empty(), "tilt template must be obstacle-free");
    const Lattice1D& w1 = p.weights;
    require(std::abs(w1.h - tmpl.h()) <= 1e-12, "tilt template spacing must match the profile lattice");
    double worst = 0.0;
    std::vector<double> u, conv;
    for (double t : times) {
        auto arg = [&](double a, double b) { return a + sign * tilt(b, t, beta, alpha, gamma, form); };
        detail::fill(tmpl, 0.0, [&](double a, double b) { return p.value(arg(a, b)); }, u);
        tmpl.convolve(u, [&](double a, double b) { return p.value(arg(a, b)); }, conv);
        const double ta = std::pow(t, alpha + 1.0);
        for (int i = 0; i < tmpl.n1(); ++i)
            for (int j = 0; j < tmpl.n2(); ++j) {
                const std::size_t k = tmpl.index(i, j);
                const double s = arg(tmpl.x1(i), tmpl.x2(j));
                const double dp = p.derivative(s);
                if (dp <= 1e-10) continue;
                double one_d = 0.0;
                for (int m = -w1.R; m <= w1.R; ++m) one_d += w1[m] * p.value(s + m * w1.h);
                const double T2 = conv[k] - one_d;
                worst = std::max(worst, sign * T2 * ta / dp);
            }
    }
    return worst;
}

/// Obstacle defect sum_{y in K} w(x - y) [phi(arg(y)) - phi(arg(x))] on the mid-zone
/// {phi(arg) in [eta, 1 - eta]}, scaled by t^{a+1} / phi'. sign_k = +1 for the
/// sub-solution (upper bound needed), -1 for the super-solution.
template <class Arg>
double obstacle_defect(const WaveProfile& p, const ExteriorGrid& with_k, const ExteriorGrid& without_k, Arg&& arg,
                       double alpha, double eta, double sign_k, const std::vector<double>& times) {
    require(with_k.n1() == without_k.n1() && with_k.n2() == without_k.n2(), "obstacle defect grids must match");
    double worst = 0.0;
    std::vector<double> u, full, part;
    for (double t : times) {
        detail::fill(without_k, 0.0, [&](double a, double b) { return p.value(arg(a, b, t)); }, u);
        bool any = false;
        for (int i = 0; i < with_k.n1() && !any; ++i)
            for (int j = 0; j < with_k.n2(); ++j) {
                const double v = u[with_k.index(i, j)];
                if (v >= eta && v <= 1.0 - eta) { any = true; break; }
            }
        if (!any) continue;
        auto halo = [&](double a, double b) { return p.value(arg(a, b, t)); };
        without_k.convolve(u, halo, full);
        with_k.convolve(u, halo, part);
        const auto& d = with_k.degree();
        const double ta = std::pow(t, alpha + 1.0);
        for (std::size_t k = 0; k < u.size(); ++k) {
            if (!with_k.exterior(k) || u[k] < eta || u[k] > 1.0 - eta) continue;
            const double kterm = full[k] - part[k] - (1.0 - d[k]) * u[k];
            const int i = static_cast<int>(k / static_cast<std::size_t>(with_k.n2()));
            const int j = static_cast<int>(k % static_cast<std::size_t>(with_k.n2()));
            const double dp = p.derivative(arg(with_k.x1(i), with_k.x2(j), t));
            if (dp <= 1e-10) continue;
            worst = std::max(worst, sign_k * kterm * ta / dp);
        }
    }
    return worst;
}

/// Profile and f constants of the large-time pair; the tilt defects need an
/// obstacle-free template at the profile spacing (skipped when tmpl is null).
inline LargeTimeFloors large_time_floors(const WaveProfile& p, const Bistable& f, const ZFunction& z,
                                         const LargeTimeParams& lt, const ExteriorGrid* tmpl,
                                         const std::vector<double>& times) {
    lt.validate();
    LargeTimeFloors r;
    r.sigma = 0.5 * std::min(std::abs(f.fp0()), std::abs(f.fp1()));
    r.eta_flat = flat_zone(f, r.sigma);
    const double eps1 = z.params().eps1;
    r.eta_z = z.params().eta;
    require(r.eta_z < 0.5 * r.sigma, "zfn.eta must be below sigma/2 = " + std::to_string(0.5 * r.sigma));
    r.eta_case = r.eta_flat - eps1;
    require(r.eta_case > 0.0, "zfn.eps1 must be below the flat-zone width " + std::to_string(r.eta_flat));
    r.tau0 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < p.n; ++i) {
        const auto I = static_cast<std::size_t>(i);
        r.dphi_sup = std::max(r.dphi_sup, p.dphi[I]);
        if (p.phi[I] >= r.eta_case && p.phi[I] <= 1.0 - r.eta_case) r.tau0 = std::min(r.tau0, p.dphi[I]);
    }
    r.delta_up = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 4000; ++i) {
        const double s = i / 4000.0;
        r.delta_prime = std::max(r.delta_prime, -f.fprime(s));
        const double u = (r.eta_case - eps1) + (1.0 - 2.0 * r.eta_case + 2.0 * eps1) * s;
        r.delta_up = std::max(r.delta_up, f.fprime(u));
    }
    r.K0 = z.K0();
    if (tmpl) {
        r.C_prime = tilt_defect(p, *tmpl, lt.beta, lt.alpha, lt.gamma, lt.form, -1.0, times);
        r.M_prime_tilt = tilt_defect(p, *tmpl, lt.beta_plus, lt.alpha_plus, lt.gamma, lt.form, +1.0, times);
    }
    return r;
}

/// z-range of the mid-zone {phi in [eta, 1 - eta]}.
inline std::pair<double, double> mid_zone(const WaveProfile& p, double eta) {
    double lo = p.zmax, hi = -p.zmax;
    for (int i = 0; i < p.n; ++i) {
        const auto I = static_cast<std::size_t>(i);
        if (p.phi[I] >= eta && p.phi[I] <= 1.0 - eta) {
            lo = std::min(lo, p.z(i));
            hi = std::max(hi, p.z(i));
        }
    }
    return {lo, hi};
}

struct LargeTimeSetup {
    LargeTimeParams params;
    LargeTimeFloors floors;
    int rounds = 0;
};

/// Sets Kz to twice its floor and t_eps so that the mid-zone of u- stays at
/// least one kernel radius plus `gap` to the left of K over the sample times,
/// then evaluates the obstacle defects there (zero when the zones never meet
/// K). Repeats while the obstacle defects change Kz.
inline LargeTimeSetup large_time_setup(const WaveProfile& p, const Bistable& f, const ZFunction& z,
                                       LargeTimeParams lt, const ExteriorGrid& tmpl, const ExteriorGrid& with_k,
                                       const ExteriorGrid& without_k, const std::vector<double>& times,
                                       double gap = 1.0) {
    LargeTimeSetup out;
    LargeTimeFloors fl = large_time_floors(p, f, z, lt, &tmpl, times);
    const auto zone = mid_zone(p, fl.eta_case);
    const double L = p.support;
    const double kleft = with_k.obstacle().empty() ? with_k.box().x1hi : with_k.obstacle().extents()[0];
    for (int round = 1; round <= 5; ++round) {
        lt.Kz = 2.0 * fl.Kz_floor(lt);
        // mid-zone of u- is x1 in pos(t) + zone with pos(t) <= -c(t - 1 + t_eps) + beta t^{-alpha} + Z(t)
        double need = 0.0;
        for (double t : times) {
            const double pos0 = -p.c * (t - 1.0) + lt.beta * std::pow(t, -lt.alpha) + drift(t, lt, z);
            need = std::max(need, (pos0 + zone.second - (kleft - L - gap)) / p.c);
        }
        lt.t_eps = need;
        const double old = fl.Kz_floor(lt);
        fl.C_K = obstacle_defect(p, with_k, without_k,
                                 [&](double a, double b, double t) { return xi_minus(a, b, t, p, lt, z); },
                                 lt.alpha, fl.eta_case, +1.0, times);
        fl.M_prime_K = obstacle_defect(p, with_k, without_k,
                                       [&](double a, double b, double t) { return psi_plus(a, b, t, p, lt, z); },
                                       lt.alpha_plus, fl.eta_case, -1.0, times);
        out.rounds = round;
        if (fl.Kz_floor(lt) <= old * (1.0 + 1e-12)) break;
    }
    lt.Kz = std::max(lt.Kz, 2.0 * fl.Kz_floor(lt));
    out.params = lt;
    out.floors = fl;
    return out;
}

/// The certificate constants for a profile: shift floors (M doubled), planar
/// parameters, and the f/profile part of the large-time constants.
inline CertificateConstants certificate_floor_constants(const WaveProfile& p, const Bistable& f, const Kernel& k,
                                                        const ObstacleSpec& obstacle) {
    obstacle.validate();
    for (int i = 1; i < p.n; ++i)
        if (p.phi[static_cast<std::size_t>(i)] < p.phi[static_cast<std::size_t>(i - 1)])
            throw NumericalError("certificate constants: profile is not monotone");
    CertificateConstants c;
    c.shift = shift_floors(p, f, kernel_1d(k));
    c.M_floor = c.shift.floor();
    c.M = 2.0 * c.M_floor;
    c.T = ShiftParams{c.M, p.lambda0, p.c}.T();
    c.planar = planar_params(p, f);
    return c;
}

}  // namespace nldisp
