#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "kernel.hpp"
#include "nonlinearity.hpp"

namespace nldisp {

/// Discrete front phi on z_i = -Zmax + i h with phi(0) = theta0 at node i0.
struct WaveProfile {
    double h = 0.0;
    double zmax = 0.0;
    int n = 0;
    int i0 = 0;
    std::vector<double> phi, comp, dphi, d2phi;  // comp = 1 - phi without cancellation

    double c = 0.0;
    double theta0 = 0.0;
    double lambda = 0.0, mu = 0.0;            // roots for the continuous marginal
    double lambda_grid = 0.0, mu_grid = 0.0;  // roots of the discrete operator
    double lambda_fit = 0.0, mu_fit = 0.0;    // log-linear tail slopes

    double alpha0 = 0, beta0 = 0, alpha1 = 0, beta1 = 0;
    double gamma0 = 0, delta0 = 0, gamma1 = 0, delta1 = 0;
    double C_phi = 0, k_phi = 0, K_phi = 0;
    double refined_zmin = 0;  // left end of the nodes where the refined expansion is asserted
    double lambda0 = 0;

    double residual = 0.0;
    int newton_steps = 0;
    bool convex_left = true;  // phi'' >= -1e-8 on z <= 0
    double min_d2phi_left = 0.0;

    Lattice1D weights;  // convolution weights, spacing weights.h = stride * h
    int stride = 1;
    double support = 1.0;  // kernel support radius L

    double z(int i) const { return -zmax + h * i; }

    double value(double x) const { return hermite(phi, dphi, x, 0.0, 1.0); }
    double complement(double x) const { return hermite(comp, dphi, x, 1.0, 0.0, -1.0); }
    double derivative(double x) const { return hermite(dphi, d2phi, x, 0.0, 0.0); }
    double second(double x) const {
        const double s = (x + zmax) / h;
        if (s <= 0.0 || s >= n - 1) return 0.0;
        const int i = std::min(static_cast<int>(s), n - 2);
        const double t = s - i;
        return (1 - t) * d2phi[static_cast<std::size_t>(i)] + t * d2phi[static_cast<std::size_t>(i + 1)];
    }

private:
    double hermite(const std::vector<double>& v, const std::vector<double>& dv, double x,
                   double left, double right, double slope_sign = 1.0) const {
        const double s = (x + zmax) / h;
        if (s <= 0.0) return s == 0.0 ? v.front() : left;
        if (s >= n - 1) return s == n - 1 ? v.back() : right;
        const int i = std::min(static_cast<int>(s), n - 2);
        const double t = s - i;
        const auto a = static_cast<std::size_t>(i);
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        return h00 * v[a] + h01 * v[a + 1] +
               slope_sign * h * (h10 * dv[a] + h11 * dv[a + 1]);
    }
};

struct ProfileOptions {
    double tol = 1e-8;       // contract on the sup residual
    double target = 1e-13;   // Newton keeps iterating down to this
    int max_newton = 100;
    bool fit = true;
};

/// Positive roots of m(l) - 1 + f'(0) - c l = 0 and m(u) - 1 + f'(1) + c u = 0,
/// where m is the exponential moment of J_1 (linearizations at 0 and 1).
template <class Moment>
std::pair<double, double> decay_rates_generic(Moment&& m, double c, double fp0, double fp1) {
    require(c > 0.0, "decay_rates: c must be positive");
    require(fp0 < 0.0 && fp1 < 0.0, "decay_rates: f'(0), f'(1) must be negative");
    auto g_lambda = [&](double l) { return m(l) - 1.0 + fp0 - c * l; };
    auto g_mu = [&](double u) { return m(u) - 1.0 + fp1 + c * u; };
    auto root = [&](auto& g) {
        if (!(g(0.0) < 0.0)) throw NumericalError("decay_rates: g(0) must be negative");
        double hi = 0.5;
        while (g(hi) <= 0.0) {
            hi *= 2.0;
            if (hi > 200.0) throw NumericalError("decay_rates: no root below 200");
        }
        double lo = 0.0;
        // move lo past the dip so that the bracket has a single sign change
        return bisect(g, lo, hi, 1e-13);
    };
    return {root(g_lambda), root(g_mu)};
}

inline std::pair<double, double> decay_rates(double c, double fp0, double fp1, const Kernel1D& j1) {
    return decay_rates_generic([&](double l) { return exp_moment(j1, l); }, c, fp0, fp1);
}

namespace detail {

// 4th-order central first and second differences
inline constexpr double kD1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
inline constexpr double kD2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};

/// Discrete rates for a lattice with spacing stride*h and derivative by kD1 at h.
inline std::pair<double, double> grid_decay_rates(const Lattice1D& w, double h, double c,
                                                  double fp0, double fp1) {
    auto dsym = [&](double l) {
        return (16.0 * std::sinh(l * h) - 2.0 * std::sinh(2.0 * l * h)) / (12.0 * h);
    };
    auto g_lambda = [&](double l) { return exp_moment(w, l) - 1.0 + fp0 - c * dsym(l); };
    auto g_mu = [&](double u) { return exp_moment(w, u) - 1.0 + fp1 + c * dsym(u); };
    auto root = [&](auto& g) {
        double hi = 0.5;
        while (g(hi) <= 0.0) {
            hi *= 2.0;
            if (hi > 200.0) throw NumericalError("grid decay rate: no root below 200");
        }
        return bisect(g, 0.0, hi, 1e-13);
    };
    return {root(g_lambda), root(g_mu)};
}

class ProfileSystem {
public:
    ProfileSystem(const Lattice1D& w, int stride, const Bistable& f, double h, int n, int i0)
        : w_(w), m_(stride), f_(f), h_(h), n_(n), i0_(i0) {}

    bool left(int j) const { return j <= i0_; }
    double phi(const std::vector<double>& y, int j) const {
        if (j < 0) return 0.0;
        if (j >= n_) return 1.0;
        return left(j) ? y[static_cast<std::size_t>(j)] : 1.0 - y[static_cast<std::size_t>(j)];
    }
    double om(const std::vector<double>& y, int j) const {
        if (j < 0) return 1.0;
        if (j >= n_) return 0.0;
        return left(j) ? 1.0 - y[static_cast<std::size_t>(j)] : y[static_cast<std::size_t>(j)];
    }

    template <class V>
    double conv(const V& val, int i) const {
        double s = 0.0;
        for (int k = -w_.R; k <= w_.R; ++k) s += w_[k] * val(i + k * m_);
        return s;
    }
    template <class V>
    double d1(const V& val, int i) const {
        double s = 0.0;
        for (int k = -2; k <= 2; ++k)
            if (k) s += kD1[k + 2] * val(i + k);
        return s / h_;
    }
    template <class V>
    double d2(const V& val, int i) const {
        double s = 0.0;
        for (int k = -2; k <= 2; ++k) s += kD2[k + 2] * val(i + k);
        return s / (h_ * h_);
    }

    double row(const std::vector<double>& y, double c, int i) const {
        if (left(i)) {
            auto P = [&](int j) { return phi(y, j); };
            const double p = P(i);
            return conv(P, i) - p - c * d1(P, i) + f_(p);
        }
        auto W = [&](int j) { return om(y, j); };
        const double w = W(i);
        return -(conv(W, i) - w) + c * d1(W, i) + f_.f_top(w);
    }

    /// sup-norm of the profile rows (phase row excluded)
    double residual(const std::vector<double>& y, double c, std::vector<double>* out = nullptr) const {
        double r = 0.0;
        if (out) out->assign(static_cast<std::size_t>(n_), 0.0);
        for (int i = 0; i < n_; ++i) {
            const double v = row(y, c, i);
            if (out) (*out)[static_cast<std::size_t>(i)] = v;
            r = std::max(r, std::abs(v));
        }
        return r;
    }

    double dphi(const std::vector<double>& y, int i) const {
        if (left(i)) return d1([&](int j) { return phi(y, j); }, i);
        return -d1([&](int j) { return om(y, j); }, i);
    }

    Eigen::SparseMatrix<double> jacobian(const std::vector<double>& y, double c) const {
        std::vector<Eigen::Triplet<double>> tr;
        tr.reserve(static_cast<std::size_t>(n_) * static_cast<std::size_t>(2 * w_.R + 8));
        for (int i = 0; i < n_; ++i) {
            auto add = [&](int j, double v) {
                if (j < 0 || j >= n_ || v == 0.0) return;
                tr.emplace_back(i, j, left(j) ? v : -v);
            };
            for (int k = -w_.R; k <= w_.R; ++k) add(i + k * m_, w_[k]);
            for (int k = -2; k <= 2; ++k)
                if (k) add(i + k, -c * kD1[k + 2] / h_);
            add(i, -1.0 + f_.fprime(phi(y, i)));
            tr.emplace_back(i, n_, -dphi(y, i));
        }
        tr.emplace_back(n_, i0_, 1.0);
        Eigen::SparseMatrix<double> J(n_ + 1, n_ + 1);
        J.setFromTriplets(tr.begin(), tr.end());
        return J;
    }

private:
    const Lattice1D& w_;
    int m_;
    const Bistable& f_;
    double h_;
    int n_, i0_;
};

}  // namespace detail

inline WaveProfile fit_asymptotics(const WaveProfile& p, const Bistable& f, const Kernel1D& j1);

/// Newton solve of the discrete profile equation
///   sum_k w_k phi(z + k H) - phi(z) - c phi'(z) + f(phi(z)) = 0,   phi(0) = theta0,
/// with phi = 0 left of the grid, phi = 1 right of it, phi' by 4th-order differences.
/// The lattice spacing weights.h must equal h.
inline WaveProfile solve_profile(const Lattice1D& weights, const Kernel1D& j1, const Bistable& f,
                                 double zmax, double h, const WaveProfile* init = nullptr,
                                 const ProfileOptions& opt = {}) {
    const double L = j1.support_radius();
    require(h > 0.0 && zmax > 0.0, "wave grid must be positive");
    require(zmax >= 10.0 * L * (1.0 - 1e-12), "wave.zmax must be >= 10 L");
    require(h <= L / 16.0 * (1.0 + 1e-12), "wave.h must be <= L/16");
    // A coarser lattice on a finer profile grid admits a slowly decaying
    // odd-even mode in the tails, so the two spacings must agree.
    require(std::abs(weights.h / h - 1.0) < 1e-9, "lattice spacing must equal wave.h");
    const int stride = 1;
    const double half = zmax / h;
    const int i0 = static_cast<int>(std::lround(half));
    require(std::abs(half - i0) < 1e-9, "wave.zmax must be a multiple of wave.h");
    const int n = 2 * i0 + 1;

    const double th = f.theta0();
    detail::ProfileSystem sys(weights, stride, f, h, n, i0);
    auto zat = [&](int i) { return -zmax + h * i; };

    auto make_guess = [&](double width, std::vector<double>& y, double& c) {
        y.assign(static_cast<std::size_t>(n), 0.0);
        if (init && init->n == n && std::abs(init->h - h) < 1e-15) {
            for (int i = 0; i < n; ++i)
                y[static_cast<std::size_t>(i)] = i <= i0 ? init->phi[static_cast<std::size_t>(i)]
                                                         : init->comp[static_cast<std::size_t>(i)];
            c = init->c;
            return;
        }
        if (init) {
            for (int i = 0; i < n; ++i) {
                const double z = zat(i);
                y[static_cast<std::size_t>(i)] = i <= i0 ? init->value(z) : init->complement(z);
            }
            c = init->c;
            return;
        }
        const double z0 = -width * std::atanh(2.0 * th - 1.0);
        for (int i = 0; i < n; ++i) {
            const double x = (zat(i) - z0) / width;
            // phi = 1/(1+e^{-2x}), 1 - phi = 1/(1+e^{2x})
            y[static_cast<std::size_t>(i)] = i <= i0 ? 1.0 / (1.0 + std::exp(-2.0 * x))
                                                     : 1.0 / (1.0 + std::exp(2.0 * x));
        }
        y[static_cast<std::size_t>(i0)] = th;
        // speed from the energy identity
        double num = 0.0, den = 0.0;
        auto P = [&](int j) { return sys.phi(y, j); };
        for (int i = 0; i < n; ++i) {
            const double d = sys.dphi(y, i);
            num += (sys.conv(P, i) - P(i) + f(P(i))) * d;
            den += d * d;
        }
        c = den > 0 ? num / den : 0.1;
    };

    auto newton = [&](std::vector<double>& y, double& c, int& steps) -> double {
        double res = sys.residual(y, c);
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        bool analyzed = false;
        Eigen::VectorXd rhs(n + 1);
        for (steps = 0; steps < opt.max_newton && res > opt.target; ++steps) {
            auto J = sys.jacobian(y, c);
            if (!analyzed) {
                lu.analyzePattern(J);
                analyzed = true;
            }
            lu.factorize(J);
            if (lu.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i) rhs[i] = -sys.row(y, c, i);
            rhs[n] = -(y[static_cast<std::size_t>(i0)] - th);
            Eigen::VectorXd d = lu.solve(rhs);
            if (!d.allFinite()) return std::numeric_limits<double>::infinity();
            double step = 1.0;
            std::vector<double> yt(y.size());
            double ct = c, rt = res;
            bool accepted = false;
            for (int ls = 0; ls < 30; ++ls) {
                for (int i = 0; i < n; ++i)
                    yt[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] + step * d[i];
                ct = c + step * d[n];
                rt = sys.residual(yt, ct);
                if (std::isfinite(rt) && rt < (1.0 - 1e-4 * step) * res) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                // stagnation at round-off once the contract is met
                if (res <= opt.tol) break;
                return std::numeric_limits<double>::infinity();
            }
            const double prev = res;
            y.swap(yt);
            c = ct;
            res = rt;
            if (res <= opt.tol && res > 0.5 * prev) {
                ++steps;
                break;
            }
        }
        return res;
    };

    std::vector<double> y;
    double c = 0.0;
    int steps = 0;
    double res = std::numeric_limits<double>::infinity();
    const double widths[] = {1.0, 2.0, 0.5, 4.0, 8.0};
    for (double width : widths) {
        make_guess(width, y, c);
        res = newton(y, c, steps);
        if (res <= opt.tol) break;
        if (init) break;
    }
    if (!(res <= opt.tol))
        throw NumericalError("solve_profile: Newton did not converge within " +
                             std::to_string(opt.max_newton) + " steps");
    if (!(c > 0.0)) throw NumericalError("solve_profile: computed speed c <= 0");

    WaveProfile p;
    p.h = h;
    p.zmax = zmax;
    p.n = n;
    p.i0 = i0;
    p.c = c;
    p.theta0 = th;
    p.residual = res;
    p.newton_steps = steps;
    p.weights = weights;
    p.stride = stride;
    p.support = L;
    p.phi.resize(static_cast<std::size_t>(n));
    p.comp.resize(static_cast<std::size_t>(n));
    p.dphi.resize(static_cast<std::size_t>(n));
    p.d2phi.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        p.phi[k] = sys.phi(y, i);
        p.comp[k] = sys.om(y, i);
        p.dphi[k] = sys.dphi(y, i);
        if (sys.left(i))
            p.d2phi[k] = sys.d2([&](int j) { return sys.phi(y, j); }, i);
        else
            p.d2phi[k] = -sys.d2([&](int j) { return sys.om(y, j); }, i);
    }
    // strict monotonicity away from the clamp layers (one kernel radius at each
    // end), where truncation can leave a reversal far below round-off of phi
    const int layer = weights.R + 2;
    for (int i = layer; i + layer < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const bool up = i < i0 ? p.phi[k + 1] > p.phi[k] : p.comp[k + 1] < p.comp[k];
        if (!up)
            throw NumericalError("solve_profile: solution is not strictly monotone at z = " +
                                 std::to_string(zat(i)));
    }
    p.min_d2phi_left = 0.0;
    for (int i = 0; i <= i0; ++i) p.min_d2phi_left = std::min(p.min_d2phi_left, p.d2phi[static_cast<std::size_t>(i)]);
    p.convex_left = p.min_d2phi_left >= -1e-8;

    auto [lam, mu] = decay_rates(c, f.fp0(), f.fp1(), j1);
    p.lambda = lam;
    p.mu = mu;
    auto [lg, mg] = detail::grid_decay_rates(weights, h, c, f.fp0(), f.fp1());
    p.lambda_grid = lg;
    p.mu_grid = mg;
    if (opt.fit) return fit_asymptotics(p, f, j1);
    return p;
}

/// Convenience overload: lattice weights at spacing h from the kernel's own dimension.
inline WaveProfile solve_profile(const Kernel& k, const Bistable& f, double zmax, double h,
                                 const WaveProfile* init = nullptr, const ProfileOptions& opt = {}) {
    return solve_profile(lattice_profile_weights(k, h), kernel_1d(k), f, zmax, h, init, opt);
}


/// Solve with a Kernel1D (lattice weights from its table).
inline WaveProfile solve_profile(const Kernel1D& j1, const Bistable& f, double zmax, double h,
                                 const WaveProfile* init = nullptr, const ProfileOptions& opt = {}) {
    Lattice1D w;
    w.h = h;
    w.R = lattice_radius(j1.support_radius(), h);
    w.w.resize(static_cast<std::size_t>(2 * w.R + 1));
    double s = 0.0;
    for (int i = -w.R; i <= w.R; ++i) s += (w.w[static_cast<std::size_t>(i + w.R)] = j1(i * h));
    for (double& v : w.w) v /= s;
    return solve_profile(w, j1, f, zmax, h, init, opt);
}

namespace detail {
struct LineFit {
    double slope = 0, intercept = 0;
};
inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double d = n * sxx - sx * sx;
    LineFit r;
    r.slope = (n * sxy - sx * sy) / d;
    r.intercept = (sy - r.slope * sx) / n;
    return r;
}
}  // namespace detail

/// Tail constants of the profile. Bounds use the continuous rates lambda, mu and are
/// made strict on the fit nodes by a 5% margin; the refined left-tail expansion
/// |phi - C e^{lambda_g z}| <= K e^{(k + lambda_g) z} uses the discrete rate lambda_g.
inline WaveProfile fit_asymptotics(const WaveProfile& in, const Bistable& /*f*/, const Kernel1D& j1) {
    WaveProfile p = in;
    const double L = j1.support_radius();
    const double zfar = p.zmax - 2.0 * L;
    std::vector<int> left, right;
    for (int i = 0; i < p.n; ++i) {
        const double z = p.z(i);
        if (z <= -5.0 && z >= -zfar - 1e-12) left.push_back(i);
        if (z >= 5.0 && z <= zfar + 1e-12) right.push_back(i);
    }
    if (left.size() < 20 || right.size() < 20)
        throw NumericalError("fit_asymptotics: tail region has fewer than 20 nodes");

    auto at = [](const std::vector<double>& v, int i) { return v[static_cast<std::size_t>(i)]; };
    std::vector<double> xs, ys;
    for (int i : left) {
        if (at(p.phi, i) <= 0.0) throw NumericalError("fit_asymptotics: nonpositive left tail");
        xs.push_back(p.z(i));
        ys.push_back(std::log(at(p.phi, i)));
    }
    p.lambda_fit = detail::least_squares(xs, ys).slope;
    xs.clear();
    ys.clear();
    for (int i : right) {
        if (at(p.comp, i) <= 0.0) throw NumericalError("fit_asymptotics: nonpositive right tail");
        xs.push_back(p.z(i));
        ys.push_back(std::log(at(p.comp, i)));
    }
    p.mu_fit = -detail::least_squares(xs, ys).slope;

    auto bounds = [&](const std::vector<int>& idx, const std::vector<double>& v, double rate,
                      double& lo, double& hi) {
        lo = std::numeric_limits<double>::infinity();
        hi = 0.0;
        for (int i : idx) {
            const double r = at(v, i) * std::exp(-rate * p.z(i));
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        lo *= 0.95;
        hi *= 1.05;
    };
    bounds(left, p.phi, p.lambda, p.alpha0, p.beta0);
    bounds(left, p.dphi, p.lambda, p.gamma0, p.delta0);
    bounds(right, p.comp, -p.mu, p.alpha1, p.beta1);
    bounds(right, p.dphi, -p.mu, p.gamma1, p.delta1);

    // Leading amplitude from the plateau of phi e^{-lambda_g z} in the middle of the
    // left tail, clear of both the clamp boundary layer and the nonlinear correction.
    const double lg = p.lambda_grid;
    std::vector<double> amp;
    for (int i : left)
        if (p.z(i) <= -0.25 * p.zmax && p.z(i) >= -0.75 * p.zmax)
            amp.push_back(at(p.phi, i) * std::exp(-lg * p.z(i)));
    if (amp.empty()) throw NumericalError("fit_asymptotics: empty amplitude window");
    std::sort(amp.begin(), amp.end());
    p.C_phi = amp[amp.size() / 2];
    // remainder |phi - C e^{lg z}| ~ K e^{(k + lg) z}, fitted where it is resolved
    xs.clear();
    ys.clear();
    p.refined_zmin = 0.0;
    for (int i : left) {
        const double r = std::abs(at(p.phi, i) - p.C_phi * std::exp(lg * p.z(i)));
        if (p.z(i) >= -0.5 * p.zmax && r > 1e-9 * at(p.phi, i)) {
            xs.push_back(p.z(i));
            ys.push_back(std::log(r));
            p.refined_zmin = std::min(p.refined_zmin, p.z(i));
        }
    }
    if (xs.size() < 5) throw NumericalError("fit_asymptotics: refined left-tail remainder unresolved");
    p.k_phi = detail::least_squares(xs, ys).slope - lg;
    if (!(p.k_phi > 0.0)) throw NumericalError("fit_asymptotics: nonpositive k_phi");
    p.K_phi = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j)
        p.K_phi = std::max(p.K_phi, std::exp(ys[j] - (p.k_phi + lg) * xs[j]));
    p.K_phi *= 1.05;
    p.lambda0 = 0.5 * std::min(p.lambda, p.k_phi);
    return p;
}

// ---- CSV serialization -------------------------------------------------------

namespace detail {
inline std::string fmt(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}
inline double parse_double(const std::string& s) {
    double v = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc()) throw ConfigError("bad number in profile file: " + s);
    return v;
}
}  // namespace detail

/// Header line "# key=value,..." then columns z,phi,dphi,one_minus_phi,d2phi.
inline void write_profile_csv(std::ostream& os, const WaveProfile& p) {
    using detail::fmt;
    os << "# h=" << fmt(p.h) << ",zmax=" << fmt(p.zmax) << ",c=" << fmt(p.c) << ",theta0=" << fmt(p.theta0)
       << ",lambda=" << fmt(p.lambda) << ",mu=" << fmt(p.mu) << ",lambda_grid=" << fmt(p.lambda_grid)
       << ",mu_grid=" << fmt(p.mu_grid) << ",lambda_fit=" << fmt(p.lambda_fit) << ",mu_fit=" << fmt(p.mu_fit)
       << ",alpha0=" << fmt(p.alpha0) << ",beta0=" << fmt(p.beta0) << ",alpha1=" << fmt(p.alpha1)
       << ",beta1=" << fmt(p.beta1) << ",gamma0=" << fmt(p.gamma0) << ",delta0=" << fmt(p.delta0)
       << ",gamma1=" << fmt(p.gamma1) << ",delta1=" << fmt(p.delta1) << ",C_phi=" << fmt(p.C_phi)
       << ",k_phi=" << fmt(p.k_phi) << ",K_phi=" << fmt(p.K_phi) << ",refined_zmin=" << fmt(p.refined_zmin) << ",lambda0=" << fmt(p.lambda0)
       << ",residual=" << fmt(p.residual) << ",newton_steps=" << p.newton_steps
       << ",stride=" << p.stride << ",support=" << fmt(p.support) << ",weights_h=" << fmt(p.weights.h)
       << ",weights=";
    for (std::size_t i = 0; i < p.weights.w.size(); ++i) os << (i ? ";" : "") << fmt(p.weights.w[i]);
    os << "\n";
    os << "z,phi,dphi,one_minus_phi,d2phi\n";
    for (int i = 0; i < p.n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        os << fmt(p.z(i)) << ',' << fmt(p.phi[k]) << ',' << fmt(p.dphi[k]) << ',' << fmt(p.comp[k]) << ','
           << fmt(p.d2phi[k]) << '\n';
    }
}

inline WaveProfile read_profile_csv(std::istream& is) {
    using detail::parse_double;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw ConfigError("profile csv: missing header");
    std::map<std::string, std::string> kv;
    std::stringstream ss(line.substr(2));
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("profile csv: bad header item " + item);
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    auto get = [&](const char* k) {
        auto it = kv.find(k);
        if (it == kv.end()) throw ConfigError(std::string("profile csv: missing ") + k);
        return parse_double(it->second);
    };
    WaveProfile p;
    p.h = get("h");
    p.zmax = get("zmax");
    p.c = get("c");
    p.theta0 = get("theta0");
    p.lambda = get("lambda");
    p.mu = get("mu");
    p.lambda_grid = get("lambda_grid");
    p.mu_grid = get("mu_grid");
    p.lambda_fit = get("lambda_fit");
    p.mu_fit = get("mu_fit");
    p.alpha0 = get("alpha0");
    p.beta0 = get("beta0");
    p.alpha1 = get("alpha1");
    p.beta1 = get("beta1");
    p.gamma0 = get("gamma0");
    p.delta0 = get("delta0");
    p.gamma1 = get("gamma1");
    p.delta1 = get("delta1");
    p.C_phi = get("C_phi");
    p.k_phi = get("k_phi");
    p.K_phi = get("K_phi");
    p.refined_zmin = get("refined_zmin");
    p.lambda0 = get("lambda0");
    p.residual = get("residual");
    p.newton_steps = static_cast<int>(get("newton_steps"));
    p.stride = static_cast<int>(get("stride"));
    p.support = get("support");
    p.weights.h = get("weights_h");
    {
        std::stringstream ws(kv.at("weights"));
        std::string t;
        while (std::getline(ws, t, ';')) p.weights.w.push_back(parse_double(t));
        p.weights.R = static_cast<int>(p.weights.w.size() / 2);
    }
    if (!std::getline(is, line)) throw ConfigError("profile csv: missing column header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string a[5];
        for (auto& s : a)
            if (!std::getline(ls, s, ',')) throw ConfigError("profile csv: short row");
        p.phi.push_back(parse_double(a[1]));
        p.dphi.push_back(parse_double(a[2]));
        p.comp.push_back(parse_double(a[3]));
        p.d2phi.push_back(parse_double(a[4]));
    }
    p.n = static_cast<int>(p.phi.size());
    p.i0 = p.n / 2;
    p.min_d2phi_left = 0.0;
    for (int i = 0; i <= p.i0 && i < p.n; ++i)
        p.min_d2phi_left = std::min(p.min_d2phi_left, p.d2phi[static_cast<std::size_t>(i)]);
    p.convex_left = p.min_d2phi_left >= -1e-8;
    return p;
}

inline void save_profile(const std::string& path, const WaveProfile& p) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path);
    write_profile_csv(os, p);
}

inline WaveProfile load_profile(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read " + path);
    return read_profile_csv(is);
}

/// Sup residual of the discrete profile equation for an arbitrary smooth function
/// sampled on the profile grid (clamped tails); used for consistency studies.
template <class Phi>
double profile_residual_of(const Lattice1D& w, int stride, const Bistable& f, double h, double zmax,
                           double c, Phi&& phi) {
    const int i0 = static_cast<int>(std::lround(zmax / h));
    const int n = 2 * i0 + 1;
    auto P = [&](int j) { return j < 0 ? 0.0 : j >= n ? 1.0 : phi(-zmax + h * j); };
    double r = 0.0;
    for (int i = 0; i < n; ++i) {
        double conv = 0.0;
        for (int k = -w.R; k <= w.R; ++k) conv += w[k] * P(i + k * stride);
        double d = 0.0;
        for (int k = -2; k <= 2; ++k)
            if (k) d += detail::kD1[k + 2] * P(i + k);
        d /= h;
        r = std::max(r, std::abs(conv - P(i) - c * d + f(P(i))));
    }
    return r;
}

}  // namespace nldisp
