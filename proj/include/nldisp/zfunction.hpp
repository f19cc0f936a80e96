#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "error.hpp"

namespace nldisp {

struct ZParams {
    double eta = 0.3;   // eta_z in (0, ln 2)
    double eps1 = 0.1;  // z(0)
    double t1 = 20.0;   // dip center
};

/// Quadratic P_-(x) = 1 - (eta^2/3)(x + 1/eta)^2 on [-1/eta, 0].
inline double p_minus(double x, double eta) {
    require(x >= -1.0 / eta * (1 + 1e-12) && x <= 1e-12, "p_minus: x outside [-1/eta, 0]");
    const double s = x + 1.0 / eta;
    return 1.0 - eta * eta / 3.0 * s * s;
}
inline double p_minus_prime(double x, double eta) { return -2.0 * eta * eta / 3.0 * (x + 1.0 / eta); }

/// P_+(x) = (nu eta/3)(x - 1/eta)^2 + 2/3 - nu/(3 eta) on [0, 1/eta].
inline double p_plus(double x, double eta, double nu) {
    require(x >= -1e-12 && x <= 1.0 / eta * (1 + 1e-12), "p_plus: x outside [0, 1/eta]");
    require(nu > 0.0 && nu <= eta * (1 + 1e-12), "p_plus needs 0 < nu <= eta");
    const double s = x - 1.0 / eta;
    return nu * eta / 3.0 * s * s + 2.0 / 3.0 - nu / (3.0 * eta);
}
inline double p_plus_prime(double x, double eta, double nu) { return 2.0 * nu * eta / 3.0 * (x - 1.0 / eta); }

/// z1(t) = e^{-eta t} up to t* = 1.5/eta - 1, then C (1 + t)^{-3/2} with
/// C = eta^{-3/2} (3/2)^{3/2} e^{eta - 3/2}.
struct Z1 {
    double eta;
    double tstar() const { return 1.5 / eta - 1.0; }
    double C() const { return std::pow(1.5 / eta, 1.5) * std::exp(eta - 1.5); }
    double value(double t) const { return t <= tstar() ? std::exp(-eta * t) : C() * std::pow(1.0 + t, -1.5); }
    double deriv(double t) const {
        return t <= tstar() ? -eta * std::exp(-eta * t) : -1.5 * C() * std::pow(1.0 + t, -2.5);
    }
    double branch(int b, double t, bool d) const {
        if (b == 0) return d ? -eta * std::exp(-eta * t) : std::exp(-eta * t);
        return d ? -1.5 * C() * std::pow(1.0 + t, -2.5) : C() * std::pow(1.0 + t, -1.5);
    }
    /// integral over [0, t]
    double integral(double t) const {
        const double ts = tstar();
        if (t <= ts) return (1.0 - std::exp(-eta * t)) / eta;
        return (1.0 - std::exp(-eta * ts)) / eta + 2.0 * C() * (1.0 / std::sqrt(1.0 + ts) - 1.0 / std::sqrt(1.0 + t));
    }
    double integral_inf() const {
        const double ts = tstar();
        return (1.0 - std::exp(-eta * ts)) / eta + 2.0 * C() / std::sqrt(1.0 + ts);
    }
};

/// The piecewise C^1 damping function with z' >= -eta z and a dip back to eps1 at t1 - 1/eta.
class ZFunction {
public:
    explicit ZFunction(const ZParams& p) : p_(p), z1_{p.eta} {
        require(p.eta > 0.0 && p.eta < std::log(2.0), "zfn.eta must lie in (0, ln 2)");
        require(p.eps1 > 0.0, "zfn.eps1 must be positive");
        require(p.t1 >= 0.0, "zfn.t1 must be >= 0");
        const double le = 1.0 / p.eta;
        piecewise_ = p.t1 >= 3.0 * le;
        if (piecewise_) {
            s0_ = p.t1 - 3.0 * le;
            nu_ = -z1_.deriv(s0_) / z1_.value(s0_);
            // 3/2 makes the P_+ piece meet eps1 z1 continuously (P_+(0) = 2/3)
            a_ = 1.5 * p.eps1 * z1_.value(s0_);
            b0_ = a_ * p_plus(le, p.eta, nu_);
        }
    }

    const ZParams& params() const { return p_; }
    bool piecewise() const { return piecewise_; }
    double nu() const { return nu_; }
    double lP() const { return 1.0 / p_.eta; }
    /// Boundaries of the five pieces (meaningful when piecewise()).
    std::vector<double> junctions() const {
        const double le = lP();
        if (!piecewise_) return {z1_.tstar()};
        std::vector<double> j{p_.t1 - 3 * le, p_.t1 - 2 * le, p_.t1 - le, p_.t1};
        if (z1_.tstar() < s0_) j.push_back(z1_.tstar());
        j.push_back(p_.t1 + z1_.tstar());
        std::sort(j.begin(), j.end());
        return j;
    }

    double operator()(double t) const { return eval(t, false); }
    double deriv(double t) const { return eval(t, true); }

    /// Closed-form integral over [0, t].
    double integral(double t) const {
        if (t <= 0.0) return 0.0;
        const double e = p_.eps1, le = lP();
        if (!piecewise_) return e * z1_.integral(t);
        double s = e * z1_.integral(std::min(t, s0_));
        if (t <= s0_) return s;
        s += a_ * pplus_int(std::min(t, s0_ + le) - s0_);
        if (t <= s0_ + le) return s;
        const double b_lo = s0_ + le;
        s += bridge_int(std::min(t, b_lo + le) - b_lo);
        if (t <= b_lo + le) return s;
        s += e * (pminus_int(std::min(t, p_.t1) - p_.t1) - pminus_int(-le));
        if (t <= p_.t1) return s;
        return s + 2.0 / 3.0 * e * z1_.integral(t - p_.t1);
    }
    double integral_inf() const {
        if (!piecewise_) return p_.eps1 * z1_.integral_inf();
        return integral(p_.t1) + 2.0 / 3.0 * p_.eps1 * z1_.integral_inf();
    }

    /// Largest K0 with z(t) >= K0 (1 + t - t1)^{-3/2} for all t >= t1.
    double K0() const {
        // z (1 + t - t1)^{3/2} on a dense grid plus its limit
        double m = std::numeric_limits<double>::infinity();
        const double span = 20.0 / p_.eta + 50.0;
        const int n = 20000;
        for (int i = 0; i <= n; ++i) {
            const double t = p_.t1 + span * i / n;
            m = std::min(m, eval(t, false) * std::pow(1.0 + t - p_.t1, 1.5));
        }
        const double lim = piecewise_ ? 2.0 / 3.0 * p_.eps1 * z1_.C() : p_.eps1 * z1_.C();
        return std::min(m, lim) * (1.0 - 1e-9);
    }

    /// |left - right| of value and slope at a junction, each side evaluated by
    /// its own closed form.
    std::pair<double, double> junction_gap(double tj) const {
        const int a = piece_of(tj - 1e-9 * std::max(1.0, tj)), b = piece_of(tj + 1e-9 * std::max(1.0, tj));
        return {std::abs(formula(a, tj, false) - formula(b, tj, false)),
                std::abs(formula(a, tj, true) - formula(b, tj, true))};
    }

private:
    // pieces: 0/1 eps1 z1 (two branches), 2 P_+, 3 bridge, 4 P_-, 5/6 (2/3) eps1 z1(t - t1)
    int piece_of(double t) const {
        const double le = lP();
        if (!piecewise_ || t <= s0_) return t <= z1_.tstar() ? 0 : 1;
        if (t <= s0_ + le) return 2;
        if (t <= s0_ + 2 * le) return 3;
        if (t <= p_.t1) return 4;
        return t - p_.t1 <= z1_.tstar() ? 5 : 6;
    }

    double formula(int piece, double t, bool d) const {
        const double e = p_.eps1, le = lP(), eta = p_.eta;
        switch (piece) {
            case 0: case 1: return e * z1_.branch(piece, t, d);
            case 2: {
                const double x = t - s0_, q = x - le;
                return a_ * (d ? 2.0 * nu_ * eta / 3.0 * q : nu_ * eta / 3.0 * q * q + 2.0 / 3.0 - nu_ / (3.0 * eta));
            }
            case 3: {
                // cubic Hermite from b0 to eps1 with zero end slopes
                const double s = (t - s0_ - le) / le;
                const double dv = e - b0_;
                return d ? dv * 6.0 * s * (1 - s) / le : b0_ + dv * s * s * (3 - 2 * s);
            }
            case 4: {
                const double q = t - p_.t1 + le;
                return e * (d ? -2.0 * eta * eta / 3.0 * q : 1.0 - eta * eta / 3.0 * q * q);
            }
            default: return 2.0 / 3.0 * e * z1_.branch(piece - 5, t - p_.t1, d);
        }
    }

    double eval(double t, bool d) const {
        require(t >= 0.0, "z is defined for t >= 0");
        return formula(piece_of(t), t, d);
    }

    double pplus_int(double x) const {
        // antiderivative of P_+ from 0 to x
        const double eta = p_.eta, le = lP();
        const double c0 = 2.0 / 3.0 - nu_ / (3.0 * eta);
        auto F = [&](double y) { return nu_ * eta / 9.0 * std::pow(y - le, 3) + c0 * y; };
        return F(x) - F(0.0);
    }
    double pminus_int(double x) const {
        const double eta = p_.eta, le = lP();
        return x - eta * eta / 9.0 * std::pow(x + le, 3);
    }
    double bridge_int(double x) const {
        const double le = lP(), s = x / le, dv = p_.eps1 - b0_;
        return le * (b0_ * s + dv * (s * s * s - 0.5 * s * s * s * s));
    }

    ZParams p_;
    Z1 z1_;
    bool piecewise_ = false;
    double s0_ = 0.0, nu_ = 0.0, a_ = 0.0, b0_ = 0.0;
};

struct ZReport {
    double min_slack = 0.0;        // min over samples of z' + eta z
    double z0 = 0.0;
    double z_at_1 = 0.0;
    double max_value = 0.0;
    double min_value = 0.0;
    double K0 = 0.0;
    double min_tail_slack = 0.0;   // min over t >= t1 of z - K0 (1+t-t1)^{-3/2}
    double max_jump_value = 0.0;   // C^1 checks at the junctions
    double max_jump_slope = 0.0;
    double integral = 0.0;
    double integral_bound = 0.0;   // I
};

/// Samples the axioms of the damping function on a uniform grid.
inline ZReport z_report(const ZFunction& z, int samples = 10000, double tmax = -1.0) {
    const auto& p = z.params();
    if (tmax <= 0.0) tmax = p.t1 + 20.0 / p.eta + 50.0;
    ZReport r;
    r.z0 = z(0.0);
    r.z_at_1 = z(1.0);
    r.K0 = z.K0();
    r.min_slack = std::numeric_limits<double>::infinity();
    r.min_tail_slack = std::numeric_limits<double>::infinity();
    r.min_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= samples; ++i) {
        const double t = tmax * i / samples;
        const double v = z(t);
        r.min_slack = std::min(r.min_slack, z.deriv(t) + p.eta * v);
        r.max_value = std::max(r.max_value, v);
        r.min_value = std::min(r.min_value, v);
        if (t >= p.t1) r.min_tail_slack = std::min(r.min_tail_slack, v - r.K0 * std::pow(1.0 + t - p.t1, -1.5));
    }
    for (double tj : z.junctions()) {
        if (tj <= 0.0) continue;
        const auto [dv, ds] = z.junction_gap(tj);
        r.max_jump_value = std::max(r.max_jump_value, dv);
        r.max_jump_slope = std::max(r.max_jump_slope, ds);
    }
    r.integral = z.integral_inf();
    r.integral_bound = 1.001 * r.integral;
    return r;
}

}  // namespace nldisp
