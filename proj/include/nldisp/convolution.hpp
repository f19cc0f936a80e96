#pragma once

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <memory>
#include <cstddef>
#include <mutex>
#include <vector>

#include "error.hpp"

namespace nldisp {

namespace detail {
// Plan creation and destruction in FFTW are not thread-safe.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

inline int fft_size(int n) {
    for (int m = n;; ++m) {
        int r = m;
        for (int p : {2, 3, 5, 7})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}
}  // namespace detail

/// Symmetric stencil applied to a padded array with a halo of width R:
///   out[i] = sum_k taps[k] * padded[i + R + k],  |k| <= R per axis.
/// Linear convolution by FFT on a transform at least (n + 2R) long per axis,
/// so the circular wrap never reaches the output window.
class Convolver {
public:
    Convolver() = default;
    Convolver(int dim, int n1, int n2, int R, const std::vector<double>& taps)
        : dim_(dim), n1_(n1), n2_(dim == 1 ? 1 : n2), R_(R) {
        require(dim == 1 || dim == 2, "convolver dimension must be 1 or 2");
        require(n1 > 0 && n2_ > 0 && R >= 0, "convolver sizes must be positive");
        const std::size_t k = static_cast<std::size_t>(2 * R + 1);
        require(taps.size() == (dim == 1 ? k : k * k), "convolver tap count mismatch");
        taps_ = taps;
        p1_ = n1_ + 2 * R_;
        p2_ = dim == 1 ? 1 : n2_ + 2 * R_;
        m1_ = detail::fft_size(p1_);
        m2_ = dim == 1 ? 1 : detail::fft_size(p2_);
        const std::size_t real_n = static_cast<std::size_t>(m1_) * static_cast<std::size_t>(m2_);
        const std::size_t cplx_n = dim == 1 ? static_cast<std::size_t>(m1_ / 2 + 1)
                                            : static_cast<std::size_t>(m1_) * static_cast<std::size_t>(m2_ / 2 + 1);
        real_.reset(fftw_alloc_real(real_n));
        spec_.reset(fftw_alloc_complex(cplx_n));
        kspec_.resize(cplx_n);
        {
            std::lock_guard<std::mutex> g(detail::fftw_planner_mutex());
            if (dim == 1) {
                fwd_.reset(fftw_plan_dft_r2c_1d(m1_, real_.get(), spec_.get(), FFTW_ESTIMATE));
                bwd_.reset(fftw_plan_dft_c2r_1d(m1_, spec_.get(), real_.get(), FFTW_ESTIMATE));
            } else {
                fwd_.reset(fftw_plan_dft_r2c_2d(m1_, m2_, real_.get(), spec_.get(), FFTW_ESTIMATE));
                bwd_.reset(fftw_plan_dft_c2r_2d(m1_, m2_, spec_.get(), real_.get(), FFTW_ESTIMATE));
            }
        }
        // kernel placed circularly; symmetric taps make correlation and convolution agree
        std::fill(real_.get(), real_.get() + real_n, 0.0);
        const int w = 2 * R_ + 1;
        for (int a = -R_; a <= R_; ++a) {
            const int ia = (a + m1_) % m1_;
            if (dim == 1) {
                real_.get()[ia] = taps_[static_cast<std::size_t>(a + R_)];
                continue;
            }
            for (int b = -R_; b <= R_; ++b) {
                const int ib = (b + m2_) % m2_;
                real_.get()[static_cast<std::size_t>(ia) * m2_ + ib] =
                    taps_[static_cast<std::size_t>((a + R_) * w + (b + R_))];
            }
        }
        fftw_execute(fwd_.get());
        const double scale = 1.0 / static_cast<double>(real_n);
        for (std::size_t i = 0; i < cplx_n; ++i)
            kspec_[i] = std::complex<double>(spec_.get()[i][0], spec_.get()[i][1]) * scale;
    }

    Convolver(const Convolver&) = delete;
    Convolver& operator=(const Convolver&) = delete;

    int dim() const { return dim_; }
    int n1() const { return n1_; }
    int n2() const { return n2_; }
    int radius() const { return R_; }
    int padded1() const { return p1_; }
    int padded2() const { return p2_; }
    std::size_t padded_size() const { return static_cast<std::size_t>(p1_) * static_cast<std::size_t>(p2_); }
    const std::vector<double>& taps() const { return taps_; }

    /// padded has padded1() x padded2() entries (row-major, axis 1 slow);
    /// out receives n1 x n2 entries.
    void apply(const std::vector<double>& padded, std::vector<double>& out) const {
        require(padded.size() == padded_size(), "padded array has the wrong size");
        std::lock_guard<std::mutex> g(mu_);
        const std::size_t real_n = static_cast<std::size_t>(m1_) * static_cast<std::size_t>(m2_);
        double* r = real_.get();
        std::fill(r, r + real_n, 0.0);
        for (int i = 0; i < p1_; ++i)
            std::copy_n(padded.data() + static_cast<std::size_t>(i) * p2_, p2_,
                        r + static_cast<std::size_t>(i) * m2_);
        fftw_execute(fwd_.get());
        fftw_complex* s = spec_.get();
        for (std::size_t i = 0; i < kspec_.size(); ++i) {
            const std::complex<double> v(s[i][0], s[i][1]);
            const std::complex<double> p = v * kspec_[i];
            s[i][0] = p.real();
            s[i][1] = p.imag();
        }
        fftw_execute(bwd_.get());
        out.resize(static_cast<std::size_t>(n1_) * static_cast<std::size_t>(n2_));
        const int off2 = dim_ == 1 ? 0 : R_;
        for (int i = 0; i < n1_; ++i)
            for (int j = 0; j < n2_; ++j)
                out[static_cast<std::size_t>(i) * n2_ + j] =
                    r[static_cast<std::size_t>(i + R_) * m2_ + (j + off2)];
    }

    /// O(n (2R+1)^N) reference with the same semantics.
    void apply_direct(const std::vector<double>& padded, std::vector<double>& out) const {
        require(padded.size() == padded_size(), "padded array has the wrong size");
        out.assign(static_cast<std::size_t>(n1_) * static_cast<std::size_t>(n2_), 0.0);
        const int w = 2 * R_ + 1;
        for (int i = 0; i < n1_; ++i)
            for (int j = 0; j < n2_; ++j) {
                double s = 0.0;
                if (dim_ == 1) {
                    for (int a = -R_; a <= R_; ++a)
                        s += taps_[static_cast<std::size_t>(a + R_)] * padded[static_cast<std::size_t>(i + R_ + a)];
                } else {
                    for (int a = -R_; a <= R_; ++a) {
                        const double* row = padded.data() + static_cast<std::size_t>(i + R_ + a) * p2_ + (j + R_);
                        const double* tr = taps_.data() + static_cast<std::size_t>((a + R_) * w + R_);
                        for (int b = -R_; b <= R_; ++b) s += tr[b] * row[b];
                    }
                }
                out[static_cast<std::size_t>(i) * n2_ + j] = s;
            }
    }

private:
    struct RealFree { void operator()(double* p) const { fftw_free(p); } };
    struct CplxFree { void operator()(fftw_complex* p) const { fftw_free(p); } };
    struct PlanFree {
        void operator()(fftw_plan_s* p) const {
            std::lock_guard<std::mutex> g(detail::fftw_planner_mutex());
            fftw_destroy_plan(p);
        }
    };

    int dim_ = 1, n1_ = 0, n2_ = 1, R_ = 0;
    int p1_ = 0, p2_ = 1, m1_ = 0, m2_ = 1;
    std::vector<double> taps_;
    std::vector<std::complex<double>> kspec_;
    std::unique_ptr<double, RealFree> real_;
    std::unique_ptr<fftw_complex, CplxFree> spec_;
    std::unique_ptr<fftw_plan_s, PlanFree> fwd_, bwd_;
    mutable std::mutex mu_;
};

}  // namespace nldisp
