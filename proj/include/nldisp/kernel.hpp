#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "error.hpp"
#include "quadrature.hpp"

namespace nldisp {

/// Radial polynomial bump J(x) = C (1 - |x|^2/L^2)^p on |x| <= L, N in {1, 2}.
class Kernel {
public:
    Kernel(int dimension, double support_radius, int exponent, int quad_nodes = 1024)
        : dim_(dimension), L_(support_radius), p_(exponent), quad_nodes_(quad_nodes) {
        require(dim_ == 1 || dim_ == 2, "kernel.dimension must be 1 or 2");
        require(std::isfinite(L_) && L_ > 0.0, "kernel.support_radius must be positive");
        require(p_ >= 2, "kernel.exponent must be an integer >= 2");
        require(quad_nodes_ >= 64, "kernel quadrature needs >= 64 nodes");
        if (dim_ == 1) {
            // integral of (1-r^2/L^2)^p over [-L, L] is L * B(1/2, p+1)
            const double b = std::exp(std::lgamma(0.5) + std::lgamma(p_ + 1.0) -
                                      std::lgamma(p_ + 1.5));
            C_ = 1.0 / (L_ * b);
        } else {
            C_ = (p_ + 1.0) / (std::numbers::pi * L_ * L_);
        }
    }

    int dimension() const { return dim_; }
    double support_radius() const { return L_; }
    int exponent() const { return p_; }
    double normalization() const { return C_; }
    int quad_nodes() const { return quad_nodes_; }

    /// Radial profile evaluated at squared radius r2.
    double radial_sq(double r2) const {
        const double s = 1.0 - r2 / (L_ * L_);
        if (s <= 0.0) return 0.0;
        return C_ * std::pow(s, p_);
    }

    double eval(std::span<const double> x) const {
        double r2 = 0.0;
        for (double xi : x) r2 += xi * xi;
        return radial_sq(r2);
    }
    double eval(double x1) const { return radial_sq(x1 * x1); }
    double eval(double x1, double x2) const { return radial_sq(x1 * x1 + x2 * x2); }

    /// Total mass by composite Simpson (radial form for N = 2).
    double mass() const {
        if (dim_ == 1)
            return simpson([&](double r) { return radial_sq(r * r); }, -L_, L_,
                           static_cast<std::size_t>(quad_nodes_));
        return 2.0 * std::numbers::pi *
               simpson([&](double r) { return r * radial_sq(r * r); }, 0.0, L_,
                       static_cast<std::size_t>(quad_nodes_));
    }

private:
    int dim_;
    double L_;
    int p_;
    int quad_nodes_;
    double C_ = 0.0;
};

/// One-dimensional density tabulated on a uniform grid over [-L, L],
/// linearly interpolated between nodes.
class Kernel1D {
public:
    Kernel1D() = default;
    Kernel1D(double support_radius, std::vector<double> table)
        : L_(support_radius), table_(std::move(table)) {
        require(table_.size() >= 65 && table_.size() % 2 == 1,
                "Kernel1D table needs an odd count >= 65");
        dx_ = 2.0 * L_ / static_cast<double>(table_.size() - 1);
    }

    double support_radius() const { return L_; }
    double spacing() const { return dx_; }
    const std::vector<double>& table() const { return table_; }
    double node(std::size_t i) const { return -L_ + dx_ * static_cast<double>(i); }

    double operator()(double x) const {
        if (x <= -L_ || x >= L_) return 0.0;
        const double s = (x + L_) / dx_;
        std::size_t i = static_cast<std::size_t>(s);
        if (i >= table_.size() - 1) i = table_.size() - 2;
        const double t = s - static_cast<double>(i);
        return (1.0 - t) * table_[i] + t * table_[i + 1];
    }

    double mass() const { return simpson_samples(table_, dx_); }

    /// Second moment, used for tilt-convolution constants.
    double second_moment() const {
        std::vector<double> y(table_.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = table_[i] * node(i) * node(i);
        return simpson_samples(y, dx_);
    }

private:
    double L_ = 1.0;
    double dx_ = 0.0;
    std::vector<double> table_;
};

inline constexpr std::size_t kDefaultMarginalIntervals = 4096;

/// The kernel itself as a tabulated 1-D density (N = 1 only).
inline Kernel1D as_1d(const Kernel& k, std::size_t intervals = kDefaultMarginalIntervals) {
    require(k.dimension() == 1, "as_1d needs a one-dimensional kernel");
    const double L = k.support_radius();
    std::vector<double> t(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
        const double x = -L + 2.0 * L * static_cast<double>(i) / static_cast<double>(intervals);
        t[i] = k.eval(x);
    }
    return Kernel1D(L, std::move(t));
}

/// J_1(x1) = integral of J(x1, y') dy', tabulated by cross-section Simpson.
inline Kernel1D marginal_1d(const Kernel& k, std::size_t intervals = kDefaultMarginalIntervals) {
    require(k.dimension() >= 2, "marginal_1d needs N >= 2");
    if (intervals % 2) ++intervals;
    const double L = k.support_radius();
    std::vector<double> t(intervals + 1, 0.0);
    const auto cross = static_cast<std::size_t>(std::max(k.quad_nodes(), 64));
    for (std::size_t i = 1; i < intervals; ++i) {
        const double x = -L + 2.0 * L * static_cast<double>(i) / static_cast<double>(intervals);
        const double a = std::sqrt(std::max(0.0, L * L - x * x));
        t[i] = simpson([&](double y) { return k.eval(x, y); }, -a, a, cross);
    }
    // enforce exact evenness of the table
    for (std::size_t i = 0; i <= intervals / 2; ++i) {
        const double m = 0.5 * (t[i] + t[intervals - i]);
        t[i] = t[intervals - i] = m;
    }
    return Kernel1D(L, std::move(t));
}

inline Kernel1D kernel_1d(const Kernel& k) {
    return k.dimension() == 1 ? as_1d(k) : marginal_1d(k);
}

/// Closed-form marginal of the N = 2 bump, used as a cross-check.
inline double analytic_marginal(const Kernel& k, double x1) {
    const double L = k.support_radius();
    const double s = 1.0 - x1 * x1 / (L * L);
    if (s <= 0.0) return 0.0;
    const int p = k.exponent();
    const double beta = std::exp(std::lgamma(0.5) + std::lgamma(p + 1.0) - std::lgamma(p + 1.5));
    if (k.dimension() == 1) return k.eval(x1);
    return k.normalization() * L * beta * std::pow(s, p + 0.5);
}

/// Integral of J_1(y) e^{-lambda y} dy by Simpson over the table nodes.
inline double exp_moment(const Kernel1D& j1, double lambda) {
    const auto& tab = j1.table();
    const std::size_t n = tab.size();
    std::vector<double> y(n);
    y[n / 2] = tab[n / 2];
    // pair symmetric nodes so that the result is exactly even in lambda
    for (std::size_t i = 0; i < n / 2; ++i) {
        const double a = tab[i] * std::exp(-lambda * j1.node(i));
        const double b = tab[n - 1 - i] * std::exp(-lambda * j1.node(n - 1 - i));
        y[i] = y[n - 1 - i] = 0.5 * (a + b);
    }
    return simpson_samples(y, j1.spacing());
}

/// Normalized lattice weights w_k = J_1(k h) h / sum, k = -R..R, R = ceil(L/h) - 1
/// (nodes with |k h| >= L carry zero weight).
struct Lattice1D {
    double h = 0.0;
    int R = 0;
    std::vector<double> w;  // size 2R+1, w[k+R]
    double operator[](int k) const { return (k < -R || k > R) ? 0.0 : w[static_cast<std::size_t>(k + R)]; }
};

/// Normalized 2-D lattice kernel J(ih, jh) h^2 / sum, row-major (2R+1)^2.
struct Lattice2D {
    double h = 0.0;
    int R = 0;
    std::vector<double> w;
    double at(int i, int j) const {
        return w[static_cast<std::size_t>((i + R) * (2 * R + 1) + (j + R))];
    }
};

inline int lattice_radius(double L, double h) {
    int R = static_cast<int>(std::floor(L / h));
    if (R * h >= L * (1.0 - 1e-12)) --R;
    return std::max(R, 0);
}

inline Lattice2D lattice_kernel_2d(const Kernel& k, double h) {
    require(k.dimension() == 2, "lattice_kernel_2d needs N = 2");
    require(h > 0.0, "lattice spacing must be positive");
    Lattice2D lat;
    lat.h = h;
    lat.R = lattice_radius(k.support_radius(), h);
    const int n = 2 * lat.R + 1;
    lat.w.assign(static_cast<std::size_t>(n * n), 0.0);
    double s = 0.0;
    for (int i = -lat.R; i <= lat.R; ++i)
        for (int j = -lat.R; j <= lat.R; ++j) {
            const double v = k.eval(i * h, j * h);
            lat.w[static_cast<std::size_t>((i + lat.R) * n + (j + lat.R))] = v;
            s += v;
        }
    for (double& v : lat.w) v /= s;
    return lat;
}

/// Discrete 1-D weights consistent with a simulation at spacing h in the
/// kernel's own dimension (for N = 2 this is the lattice marginal).
inline Lattice1D lattice_profile_weights(const Kernel& k, double h) {
    require(h > 0.0, "lattice spacing must be positive");
    Lattice1D out;
    out.h = h;
    if (k.dimension() == 1) {
        out.R = lattice_radius(k.support_radius(), h);
        out.w.resize(static_cast<std::size_t>(2 * out.R + 1));
        double s = 0.0;
        for (int i = -out.R; i <= out.R; ++i) {
            const double v = k.eval(i * h);
            out.w[static_cast<std::size_t>(i + out.R)] = v;
            s += v;
        }
        for (double& v : out.w) v /= s;
        return out;
    }
    const Lattice2D lat = lattice_kernel_2d(k, h);
    out.R = lat.R;
    out.w.assign(static_cast<std::size_t>(2 * out.R + 1), 0.0);
    for (int i = -lat.R; i <= lat.R; ++i) {
        double s = 0.0;
        for (int j = -lat.R; j <= lat.R; ++j) s += lat.at(i, j);
        out.w[static_cast<std::size_t>(i + out.R)] = s;
    }
    for (int i = 1; i <= out.R; ++i) {
        const double m = 0.5 * (out.w[static_cast<std::size_t>(out.R + i)] +
                                out.w[static_cast<std::size_t>(out.R - i)]);
        out.w[static_cast<std::size_t>(out.R + i)] = out.w[static_cast<std::size_t>(out.R - i)] = m;
    }
    return out;
}

/// Discrete exponential moment sum_k w_k e^{-lambda k h}.
inline double exp_moment(const Lattice1D& lat, double lambda) {
    double s = lat.w[static_cast<std::size_t>(lat.R)];
    for (int k = 1; k <= lat.R; ++k)
        s += lat[k] * 2.0 * std::cosh(lambda * k * lat.h);
    return s;
}

}  // namespace nldisp
