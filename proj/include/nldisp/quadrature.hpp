#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace nldisp {

/// Composite Simpson rule on [a, b] with n (forced even) intervals.
template <class F>
double simpson(F&& f, double a, double b, std::size_t n) {
    if (n < 2) n = 2;
    if (n % 2) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) {
        const double x = a + h * static_cast<double>(i);
        s += (i % 2 ? 4.0 : 2.0) * f(x);
    }
    return s * h / 3.0;
}

/// Simpson rule on tabulated, uniformly spaced samples (odd count).
/// Falls back to a trapezoid correction on the last interval for even counts.
inline double simpson_samples(const std::vector<double>& y, double h) {
    const std::size_t n = y.size();
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * h * (y[0] + y[1]);
    std::size_t m = (n % 2 == 1) ? n : n - 1;
    double s = y[0] + y[m - 1];
    for (std::size_t i = 1; i + 1 < m; ++i) s += (i % 2 ? 4.0 : 2.0) * y[i];
    s *= h / 3.0;
    if (m != n) s += 0.5 * h * (y[n - 2] + y[n - 1]);
    return s;
}

namespace detail {
template <class F>
double adaptive_step(F& f, double a, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol)
        return left + right + diff / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

/// Adaptive Simpson quadrature with absolute tolerance tol.
template <class F>
double adaptive_simpson(F f, double a, double b, double tol = 1e-12, int max_depth = 50) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Bisection on a bracket with g(lo) < 0 < g(hi). Stops when the bracket
/// is below tol or the midpoint residual vanishes.
template <class G>
double bisect(G&& g, double lo, double hi, double tol = 1e-13, int max_iter = 400) {
    for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if (gm < 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace nldisp
