#pragma once

// Ready-made certificate scans: grids, windows and constants assembled the
// same way for the CLI, the tests and the acceptance driver.

#include <functional>
#include <memory>
#include <vector>

#include "certificates.hpp"
#include "domain.hpp"
#include "kernel.hpp"
#include "nonlinearity.hpp"
#include "traveling_wave.hpp"
#include "zfunction.hpp"

namespace nldisp {

struct ScanOptions {
    double dt_fd = 1e-3;
    double tol = 1e-3;
    int samples = 50;
};

struct ShiftScan {
    CertificateConstants constants;
    ShiftParams params;
    ResidualReport report;
};

/// W- or W+ on the grid g (which carries the obstacle), t from tmin up to T - 2 dt_fd.
inline ShiftScan certify_shift(CertKind kind, const WaveProfile& p, const Bistable& f, const Kernel& k,
                               const ExteriorGrid& g, double tmin, const ScanOptions& opt = {}) {
    require(kind == CertKind::Wminus || kind == CertKind::Wplus, "certify_shift handles wminus / wplus");
    ShiftScan s;
    s.constants = certificate_floor_constants(p, f, k, g.obstacle());
    s.params = ShiftParams{s.constants.M, p.lambda0, p.c};
    s.params.validate(p);
    const double tmax = s.params.T() - 2.0 * opt.dt_fd;
    require(tmin < tmax, "certify.tmin must lie below T = " + std::to_string(s.params.T()));
    CertificateSetup setup;
    setup.profile = &p;
    setup.f = &f;
    setup.shift = s.params;
    s.report = certificate_residual(kind, {ScanWindow{&g, {}}}, setup, sample_times(tmin, tmax, opt.samples),
                                    opt.dt_fd, opt.tol);
    return s;
}

struct LargeTimeScanSpec {
    ZParams z{0.05, 0.02, 1.0};
    LargeTimeParams lt;            // beta, alpha, gamma, form; Kz and t_eps are computed
    double tmax = 50.0;
    double window = 6.0;           // half width of the window around the obstacle
    double template_half_x1 = 15.0, template_half_x2 = 35.0;
};

struct LargeTimeScan {
    LargeTimeSetup setup;
    std::shared_ptr<ZFunction> z;
    ResidualReport report;
};

/// u- or u+ around obstacle k_obs (near the origin): one window fixed on K and
/// one obstacle-free template following the front.
inline LargeTimeScan certify_large_time(CertKind kind, const WaveProfile& p, const Bistable& f, const Kernel& k,
                                        const ObstacleSpec& k_obs, double h, const LargeTimeScanSpec& spec,
                                        const ScanOptions& opt = {}) {
    require(kind == CertKind::Uminus || kind == CertKind::Uplus, "certify_large_time handles uminus / uplus");
    LargeTimeScan s;
    s.z = std::make_shared<ZFunction>(spec.z);
    const double w = spec.window;
    ExteriorGrid tmpl(k, BoxSpec{2, -spec.template_half_x1, spec.template_half_x1, -spec.template_half_x2,
                                 spec.template_half_x2, h},
                      ObstacleSpec::none());
    ExteriorGrid with_k(k, BoxSpec{2, -w, w, -w, w, h}, k_obs);
    ExteriorGrid without_k(k, BoxSpec{2, -w, w, -w, w, h}, ObstacleSpec::none());
    // stay dt_fd + a little clear of t = 1
    const auto times = sample_times(1.0 + opt.dt_fd + 1e-4, spec.tmax, opt.samples);
    s.setup = large_time_setup(p, f, *s.z, spec.lt, tmpl, with_k, without_k, times);
    const LargeTimeParams P = s.setup.params;
    const ZFunction& z = *s.z;
    const double sg = kind == CertKind::Uminus ? 1.0 : -1.0;
    std::function<double(double)> front = [&p, &z, P, sg](double t) {
        return -p.c * (t - 1.0 + P.t_eps) + sg * drift(t, P, z);
    };
    CertificateSetup setup;
    setup.profile = &p;
    setup.f = &f;
    setup.large = P;
    setup.z = s.z.get();
    s.report = certificate_residual(kind, {ScanWindow{&with_k, {}}, ScanWindow{&tmpl, front}}, setup, times,
                                    opt.dt_fd, opt.tol);
    return s;
}

struct PlanarScan {
    PlanarSqueezeParams params;
    ResidualReport report;
};

/// The planar pair on a strip following the front, t in (t0, tmax].
inline PlanarScan certify_planar(CertKind kind, const WaveProfile& p, const Bistable& f, const Kernel& k, double h,
                                 double tmax = 50.0, double half_x1 = 20.0, const ScanOptions& opt = {}) {
    require(kind == CertKind::PlanarLower || kind == CertKind::PlanarUpper, "certify_planar handles the planar pair");
    PlanarScan s;
    s.params = planar_params(p, f);
    ExteriorGrid strip(k, BoxSpec{2, -half_x1, half_x1, -1.0, 1.0, h}, ObstacleSpec::none());
    const double sg = kind == CertKind::PlanarLower ? -1.0 : 1.0;
    const PlanarSqueezeParams pp = s.params;
    std::function<double(double)> front = [&p, pp, sg](double t) {
        return -p.c * t - sg * pp.drift_scale() * (1.0 - std::exp(-pp.omega * (t - pp.t0)));
    };
    CertificateSetup setup;
    setup.profile = &p;
    setup.f = &f;
    setup.planar = pp;
    s.report = certificate_residual(kind, {ScanWindow{&strip, front}}, setup,
                                    sample_times(pp.t0 + opt.dt_fd + 1e-4, tmax, opt.samples), opt.dt_fd, opt.tol);
    return s;
}

}  // namespace nldisp
