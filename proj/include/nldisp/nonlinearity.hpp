#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "error.hpp"
#include "quadrature.hpp"

namespace nldisp {

enum class Family { bistable, multistable };

/// Cubic f(u) = kappa u (u - a)(1 - u), or the quintic
/// kappa u (u - a1)(u - a2)(u - a3)(1 - u). Outside [0, 1] both are
/// continued linearly with slopes f'(0) and f'(1).
class Bistable {
public:
    Bistable(double a, double kappa) : fam_(Family::bistable), kappa_(kappa), roots_{a, 0.0, 0.0} {
        require(a > 0.0 && a < 0.5, "nonlinearity.a must lie in (0, 1/2)");
        require(kappa > 0.0 && std::isfinite(kappa), "nonlinearity.kappa must be positive");
        init();
    }

    static Bistable multistable(double a1, double a2, double a3, double kappa) {
        Bistable b(0.25, kappa);
        require(0.0 < a1 && a1 < a2 && a2 < a3 && a3 < 1.0,
                "multistable roots must satisfy 0 < a1 < a2 < a3 < 1");
        b.fam_ = Family::multistable;
        b.roots_ = {a1, a2, a3};
        b.init();
        return b;
    }

    Family family() const { return fam_; }
    double a() const { return roots_[0]; }
    double kappa() const { return kappa_; }

    /// The polynomial on all of R (no extension).
    double poly(double u) const {
        double p = kappa_ * u * (1.0 - u);
        p *= (u - roots_[0]);
        if (fam_ == Family::multistable) p *= (u - roots_[1]) * (u - roots_[2]);
        return p;
    }

    double poly_prime(double u) const {
        // derivative of the product by the log-derivative free expansion
        const int m = fam_ == Family::bistable ? 1 : 3;
        double total = 0.0;
        std::array<double, 5> fac{};
        int nf = 0;
        fac[nf++] = u;
        fac[nf++] = 1.0 - u;
        for (int i = 0; i < m; ++i) fac[nf++] = u - roots_[static_cast<std::size_t>(i)];
        std::array<double, 5> dfac{1.0, -1.0, 1.0, 1.0, 1.0};
        for (int i = 0; i < nf; ++i) {
            double term = dfac[static_cast<std::size_t>(i)];
            for (int j = 0; j < nf; ++j)
                if (j != i) term *= fac[static_cast<std::size_t>(j)];
            total += term;
        }
        return kappa_ * total;
    }

    double poly_second(double u) const {
        const double e = 1e-4;
        return (poly_prime(u + e) - poly_prime(u - e)) / (2.0 * e);
    }

    /// f with linear continuation outside [0, 1].
    double operator()(double s) const { return eval_extended(s); }
    double eval_extended(double s) const {
        if (s <= 0.0) return fp0_ * s;
        if (s >= 1.0) return fp1_ * (s - 1.0);
        return poly(s);
    }

    /// f(1 - w) evaluated without forming 1 - w first, accurate for small w.
    double f_top(double w) const {
        if (w <= 0.0) return -fp1_ * w;
        if (w >= 1.0) return fp0_ * (1.0 - w);
        const double u = 1.0 - w;
        double p = kappa_ * u * w * (u - roots_[0]);
        if (fam_ == Family::multistable) p *= (u - roots_[1]) * (u - roots_[2]);
        return p;
    }

    double fprime(double s) const {
        if (s <= 0.0) return fp0_;
        if (s >= 1.0) return fp1_;
        return poly_prime(s);
    }

    double fp0() const { return fp0_; }
    double fp1() const { return fp1_; }
    double max_fprime() const { return max_fp_; }
    double min_fprime() const { return min_fp_; }
    /// sup |f'| over R for the extended f.
    double sup_abs_fprime() const { return std::max({std::abs(fp0_), std::abs(fp1_), std::abs(max_fp_), std::abs(min_fp_)}); }
    /// Global Lipschitz constant of eval_extended.
    double lipschitz() const { return sup_abs_fprime(); }

    /// Integral of f over [0, 1].
    double integral01() const {
        if (fam_ == Family::bistable) return kappa_ * (1.0 - 2.0 * roots_[0]) / 12.0;
        return simpson([&](double u) { return poly(u); }, 0.0, 1.0, 2048);
    }

    /// Largest theta with f <= 0 on [0, theta].
    double theta0() const {
        return roots_[0];
    }

    /// Max of |f(u+v) - f(u) - f(v)| / (u v) over a grid on (0,1]^2 with the
    /// extended f, also bounded below by the u,v -> 0 limit |f''(0)|, times 1.05.
    double lf_constant(int grid = 512) const {
        double best = std::abs(poly_second(0.0));
        for (int i = 1; i <= grid; ++i) {
            const double u = static_cast<double>(i) / grid;
            for (int j = i; j <= grid; ++j) {
                const double v = static_cast<double>(j) / grid;
                const double q = std::abs(eval_extended(u + v) - eval_extended(u) - eval_extended(v)) / (u * v);
                best = std::max(best, q);
            }
        }
        return 1.05 * best;
    }

private:
    void init() {
        fp0_ = poly_prime(0.0);
        fp1_ = poly_prime(1.0);
        require(fp0_ < 0.0 && fp1_ < 0.0, "f'(0) and f'(1) must be negative");
        // critical points of f' on [0,1]: dense scan refined by golden search
        max_fp_ = std::max(fp0_, fp1_);
        min_fp_ = std::min(fp0_, fp1_);
        const int n = 4000;
        for (int i = 0; i <= n; ++i) {
            const double u = static_cast<double>(i) / n;
            const double d = poly_prime(u);
            max_fp_ = std::max(max_fp_, d);
            min_fp_ = std::min(min_fp_, d);
        }
        if (fam_ == Family::bistable) {
            // f'' vanishes at u* = (1 + a)/3 where f' attains its maximum
            const double a = roots_[0];
            max_fp_ = kappa_ * (1.0 - a + a * a) / 3.0;
        }
        require(integral01() > 0.0, "integral of f over [0,1] must be positive");
    }

    Family fam_;
    double kappa_;
    std::array<double, 3> roots_;
    double fp0_ = 0.0, fp1_ = 0.0, max_fp_ = 0.0, min_fp_ = 0.0;
};

struct ConditionFReport {
    bool pass = false;
    double max_fprime = 0.0;
    double degree_min = 0.0;
    double margin = 0.0;
};

/// max f' < inf d(x) < 1 (the second inequality is only checked when < 1 is meaningful).
inline ConditionFReport check_condition_F(const Bistable& f, double degree_min) {
    ConditionFReport r;
    r.max_fprime = f.max_fprime();
    r.degree_min = degree_min;
    r.margin = degree_min - r.max_fprime;
    r.pass = r.max_fprime < 1.0 && r.margin > 0.0;
    return r;
}

inline std::string family_name(Family f) { return f == Family::bistable ? "bistable" : "multistable"; }

}  // namespace nldisp
