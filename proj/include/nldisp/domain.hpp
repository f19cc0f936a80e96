#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "convolution.hpp"
#include "error.hpp"
#include "kernel.hpp"

namespace nldisp {

enum class ObstacleKind { empty, disc, ellipse, polygon };

inline std::string obstacle_kind_name(ObstacleKind k) {
    switch (k) {
        case ObstacleKind::empty: return "empty";
        case ObstacleKind::disc: return "disc";
        case ObstacleKind::ellipse: return "ellipse";
        case ObstacleKind::polygon: return "polygon";
    }
    return "?";
}

using Point2 = std::array<double, 2>;

/// Strict convexity by the sign of consecutive edge cross products.
/// Collinear triples and repeated vertices are rejected.
inline bool is_convex_polygon(const std::vector<Point2>& v) {
    const std::size_t n = v.size();
    if (n < 3) return false;
    int sign = 0;
    double winding = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = v[i];
        const Point2& b = v[(i + 1) % n];
        const Point2& c = v[(i + 2) % n];
        const double cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if (cr == 0.0) return false;
        const int s = cr > 0 ? 1 : -1;
        if (sign == 0) sign = s;
        else if (s != sign) return false;
        const double e1 = std::atan2(b[1] - a[1], b[0] - a[0]);
        const double e2 = std::atan2(c[1] - b[1], c[0] - b[0]);
        double turn = e2 - e1;
        while (turn > M_PI) turn -= 2 * M_PI;
        while (turn < -M_PI) turn += 2 * M_PI;
        winding += turn;
    }
    // a star polygon has consistent turns but winds more than once
    return std::abs(std::abs(winding) - 2 * M_PI) < 1e-6;
}

/// Compact obstacle K. For N = 1 only the empty set and "disc" (an interval
/// [cx - r, cx + r]) are meaningful.
struct ObstacleSpec {
    ObstacleKind kind = ObstacleKind::empty;
    double cx = 0.0, cy = 0.0;
    double radius = 0.0;
    double ax = 0.0, ay = 0.0;  // ellipse semi-axes
    std::vector<Point2> vertices;
    bool require_left_halfplane = false;

    static ObstacleSpec none() { return {}; }
    static ObstacleSpec disc(double cx, double cy, double r) {
        ObstacleSpec s;
        s.kind = ObstacleKind::disc;
        s.cx = cx;
        s.cy = cy;
        s.radius = r;
        return s;
    }
    static ObstacleSpec ellipse(double cx, double cy, double ax, double ay) {
        ObstacleSpec s;
        s.kind = ObstacleKind::ellipse;
        s.cx = cx;
        s.cy = cy;
        s.ax = ax;
        s.ay = ay;
        return s;
    }
    static ObstacleSpec polygon(std::vector<Point2> v) {
        ObstacleSpec s;
        s.kind = ObstacleKind::polygon;
        s.vertices = std::move(v);
        return s;
    }

    bool empty() const { return kind == ObstacleKind::empty; }

    bool contains(double x1, double x2 = 0.0) const {
        switch (kind) {
            case ObstacleKind::empty: return false;
            case ObstacleKind::disc: {
                const double a = x1 - cx, b = x2 - cy;
                return a * a + b * b <= radius * radius;
            }
            case ObstacleKind::ellipse: {
                const double a = (x1 - cx) / ax, b = (x2 - cy) / ay;
                return a * a + b * b <= 1.0;
            }
            case ObstacleKind::polygon: {
                int sign = 0;
                const std::size_t n = vertices.size();
                for (std::size_t i = 0; i < n; ++i) {
                    const Point2& p = vertices[i];
                    const Point2& q = vertices[(i + 1) % n];
                    const double cr = (q[0] - p[0]) * (x2 - p[1]) - (q[1] - p[1]) * (x1 - p[0]);
                    if (cr == 0.0) continue;
                    const int s = cr > 0 ? 1 : -1;
                    if (sign == 0) sign = s;
                    else if (s != sign) return false;
                }
                return true;
            }
        }
        return false;
    }

    /// Bounding box {x1min, x1max, x2min, x2max}.
    std::array<double, 4> extents() const {
        switch (kind) {
            case ObstacleKind::empty: return {0, 0, 0, 0};
            case ObstacleKind::disc: return {cx - radius, cx + radius, cy - radius, cy + radius};
            case ObstacleKind::ellipse: return {cx - ax, cx + ax, cy - ay, cy + ay};
            case ObstacleKind::polygon: {
                std::array<double, 4> e{vertices[0][0], vertices[0][0], vertices[0][1], vertices[0][1]};
                for (const auto& p : vertices) {
                    e[0] = std::min(e[0], p[0]);
                    e[1] = std::max(e[1], p[0]);
                    e[2] = std::min(e[2], p[1]);
                    e[3] = std::max(e[3], p[1]);
                }
                return e;
            }
        }
        return {0, 0, 0, 0};
    }

    void validate() const {
        switch (kind) {
            case ObstacleKind::empty: return;
            case ObstacleKind::disc: require(radius > 0.0, "obstacle.radius must be positive"); break;
            case ObstacleKind::ellipse: require(ax > 0.0 && ay > 0.0, "obstacle semi-axes must be positive"); break;
            case ObstacleKind::polygon:
                require(is_convex_polygon(vertices), "obstacle polygon is not convex");
                break;
        }
        if (require_left_halfplane)
            require(extents()[1] <= 0.0, "obstacle violates the placement constraint x1 <= 0");
    }
};

struct BoxSpec {
    int dim = 2;
    double x1lo = -10, x1hi = 10;
    double x2lo = -10, x2hi = 10;  // ignored for dim = 1
    double h = 0.1;
};

/// Uniform node grid x = (x1lo + i h, x2lo + j h) over a box, index i * n2 + j.
/// chi_Omega = 1 off the obstacle; outside the box the domain is treated as
/// unobstructed, so padded convolutions see the closure values there.
class ExteriorGrid {
public:
    ExteriorGrid(const Kernel& k, const BoxSpec& box, const ObstacleSpec& obstacle)
        : kernel_(k), box_(box), obstacle_(obstacle) {
        require(box.dim == k.dimension(), "domain dimension must match kernel.dimension");
        require(box.h > 0.0 && box.h <= k.support_radius() / 8.0 * (1 + 1e-12),
                "domain.h must satisfy h <= L/8");
        require(box.x1hi > box.x1lo, "domain box is empty along x1");
        if (box.dim == 2) require(box.x2hi > box.x2lo, "domain box is empty along x2");
        obstacle.validate();
        h_ = box.h;
        n1_ = static_cast<int>(std::lround((box.x1hi - box.x1lo) / h_)) + 1;
        n2_ = box.dim == 2 ? static_cast<int>(std::lround((box.x2hi - box.x2lo) / h_)) + 1 : 1;
        if (!obstacle.empty()) {
            const auto e = obstacle.extents();
            bool inside = e[0] > box.x1lo + h_ && e[1] < box.x1hi - h_;
            if (box.dim == 2) inside = inside && e[2] > box.x2lo + h_ && e[3] < box.x2hi - h_;
            require(inside, "obstacle touches the box boundary");
        }

        std::vector<double> taps;
        if (box.dim == 1) {
            const Lattice1D lat = lattice_profile_weights(k, h_);
            R_ = lat.R;
            taps = lat.w;
        } else {
            const Lattice2D lat = lattice_kernel_2d(k, h_);
            R_ = lat.R;
            taps = lat.w;
        }
        conv_ = std::make_shared<Convolver>(box.dim, n1_, n2_, R_, taps);

        outside_.assign(size(), 1);
        for (int i = 0; i < n1_; ++i)
            for (int j = 0; j < n2_; ++j)
                if (obstacle.contains(x1(i), x2(j))) outside_[index(i, j)] = 0;

        std::vector<double> ones(size(), 1.0);
        convolve(ones, [](double, double) { return 1.0; }, degree_);
        for (std::size_t i = 0; i < size(); ++i)
            if (!outside_[i]) degree_[i] = 0.0;
    }

    int dim() const { return box_.dim; }
    int n1() const { return n1_; }
    int n2() const { return n2_; }
    int radius() const { return R_; }
    double h() const { return h_; }
    const BoxSpec& box() const { return box_; }
    const Kernel& kernel() const { return kernel_; }
    const ObstacleSpec& obstacle() const { return obstacle_; }
    std::size_t size() const { return static_cast<std::size_t>(n1_) * static_cast<std::size_t>(n2_); }
    std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(i) * n2_ + j; }
    double x1(int i) const { return box_.x1lo + h_ * i; }
    double x2(int j) const { return box_.dim == 2 ? box_.x2lo + h_ * j : 0.0; }

    bool exterior(std::size_t k) const { return outside_[k] != 0; }
    const std::vector<std::uint8_t>& mask() const { return outside_; }
    const std::vector<double>& degree() const { return degree_; }
    const Convolver& convolver() const { return *conv_; }

    /// Minimum of d over exterior nodes.
    double min_degree() const {
        double m = 1.0;
        for (std::size_t k = 0; k < size(); ++k)
            if (outside_[k]) m = std::min(m, degree_[k]);
        return m;
    }

    /// Distance (in the sup sense of the box) from node (i, j) to the box edge.
    double edge_distance(int i, int j = 0) const {
        double d = std::min(x1(i) - box_.x1lo, box_.x1hi - x1(i));
        if (box_.dim == 2) d = std::min({d, x2(j) - box_.x2lo, box_.x2hi - x2(j)});
        return d;
    }

    /// Padded copy of u * chi_Omega with halo(x1, x2) outside the box.
    template <class Halo>
    void pad(const std::vector<double>& u, Halo&& halo, std::vector<double>& out) const {
        require(u.size() == size(), "field does not match the grid");
        const Convolver& c = *conv_;
        const int p1 = c.padded1(), p2 = c.padded2();
        const int off2 = box_.dim == 2 ? R_ : 0;
        out.resize(c.padded_size());
        for (int a = 0; a < p1; ++a) {
            const int i = a - R_;
            const double xa = box_.x1lo + h_ * i;
            for (int b = 0; b < p2; ++b) {
                const int j = b - off2;
                const std::size_t o = static_cast<std::size_t>(a) * p2 + b;
                if (i >= 0 && i < n1_ && j >= 0 && j < n2_) {
                    const std::size_t k = index(i, j);
                    out[o] = outside_[k] ? u[k] : 0.0;
                } else {
                    out[o] = halo(xa, box_.dim == 2 ? box_.x2lo + h_ * j : 0.0);
                }
            }
        }
    }

    /// conv(J, u chi_Omega) at every node, with u := halo outside the box.
    template <class Halo>
    void convolve(const std::vector<double>& u, Halo&& halo, std::vector<double>& out) const {
        thread_local std::vector<double> padded;
        pad(u, halo, padded);
        conv_->apply(padded, out);
    }

    template <class Halo>
    void convolve_direct(const std::vector<double>& u, Halo&& halo, std::vector<double>& out) const {
        std::vector<double> padded;
        pad(u, halo, padded);
        conv_->apply_direct(padded, out);
    }

private:
    Kernel kernel_;
    BoxSpec box_;
    ObstacleSpec obstacle_;
    double h_ = 0.0;
    int n1_ = 0, n2_ = 1, R_ = 0;
    std::vector<std::uint8_t> outside_;
    std::vector<double> degree_;
    std::shared_ptr<Convolver> conv_;
};

/// Midpoint-rule oracle for d(x) = integral over Omega of J(x - y) dy (N = 2),
/// independent of the lattice used by the grid.
inline double degree_quadrature(const Kernel& k, const ObstacleSpec& obs, double x1, double x2,
                                int per_axis = 800) {
    const double L = k.support_radius();
    const double dy = 2.0 * L / per_axis;
    double s = 0.0;
    for (int a = 0; a < per_axis; ++a) {
        const double y1 = -L + (a + 0.5) * dy;
        for (int b = 0; b < per_axis; ++b) {
            const double y2 = -L + (b + 0.5) * dy;
            if (obs.contains(x1 + y1, x2 + y2)) continue;
            s += k.eval(y1, y2);
        }
    }
    return s * dy * dy;
}

}  // namespace nldisp
