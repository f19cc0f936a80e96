#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "experiments.hpp"
#include "field_io.hpp"
#include "scenarios.hpp"
#include "version.hpp"

namespace nldisp::cli {

enum Exit { ok = 0, failed = 1, bad_config = 2 };

/// Wall-clock per stage plus the config hash, written next to the outputs.
class Manifest {
public:
    Manifest(std::string command, const Config& cfg) : command_(std::move(command)), cfg_(cfg) {}

    template <class Fn>
    auto stage(const std::string& name, Fn&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record(name, t0);
        } else {
            auto r = fn();
            record(name, t0);
            return r;
        }
    }

    void write(const std::filesystem::path& dir, int exit_code) const {
        std::ofstream os(dir / "manifest.txt");
        os << "command=" << command_ << "\n";
        os << "version=" << kVersion << "\n";
        os << "compiler=" << compiler_id() << "\n";
        os << "config_hash=" << cfg_.hash() << "\n";
        os << "threads=" << cfg_.integer("threads", 1) << "\n";
        os << "seed=" << cfg_.integer("seed", 0) << "\n";
        for (const auto& [n, s] : stages_) os << "stage." << n << ".seconds=" << fmt_double(s) << "\n";
        os << "exit=" << exit_code << "\n";
        os << "# config\n" << cfg_.canonical();
    }

private:
    void record(const std::string& name, std::chrono::steady_clock::time_point t0) {
        stages_.emplace_back(name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::string command_;
    const Config& cfg_;
    std::vector<std::pair<std::string, double>> stages_;
};

struct Common {
    std::string config_path;
    std::string out;
    bool dry_run = false;
};

inline Config load_config(const Common& c) {
    return c.config_path.empty() ? Config{} : Config::load(c.config_path);
}

inline std::filesystem::path out_dir(const Common& c, const Config& cfg) {
    std::filesystem::path p = c.out.empty() ? cfg.str("output.directory", "out") : c.out;
    std::filesystem::create_directories(p);
    return p;
}

inline std::shared_ptr<WaveProfile> profile_from(const Config& cfg, const Kernel& k, const Bistable& f) {
    const double h = cfg.num("wave.h", cfg.num("domain.h", 0.1));
    return std::make_shared<WaveProfile>(solve_profile(k, f, cfg.num("wave.zmax", 40.0), h, nullptr,
                                                       profile_options_from(cfg)));
}

inline void summary_line(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& kv) {
    bool first = true;
    for (const auto& [k, v] : kv) {
        os << (first ? "" : " ") << k << "=" << v;
        first = false;
    }
    os << "\n";
}

inline std::string num(double v) { return fmt_double(v); }

inline void dump(const std::filesystem::path& file, const Field& u) {
    const ExteriorGrid& g = *u.grid;
    // row-major with x1 the fast axis
    std::vector<double> v(g.size());
    for (int j = 0; j < g.n2(); ++j)
        for (int i = 0; i < g.n1(); ++i) v[static_cast<std::size_t>(j) * g.n1() + i] = u.u[g.index(i, j)];
    write_field_file(file.string(), static_cast<std::uint32_t>(g.dim()), static_cast<std::uint32_t>(g.n1()), g.h(),
                     u.t, v);
}

// ---- subcommands -----------------------------------------------------------------

inline int cmd_wave(const Common& c) {
    const Config cfg = load_config(c);
    const Kernel k = kernel_from(cfg);
    const Bistable f = nonlinearity_from(cfg);
    const ProfileOptions opt = profile_options_from(cfg);
    if (c.dry_run) {
        std::cout << "plan: solve profile a=" << num(f.a()) << " kappa=" << num(f.kappa())
                  << " L=" << num(k.support_radius()) << " zmax=" << num(cfg.num("wave.zmax", 40.0))
                  << " h=" << num(cfg.num("wave.h", cfg.num("domain.h", 0.1))) << "\n";
        return ok;
    }
    Manifest m("wave", cfg);
    const auto dir = out_dir(c, cfg);
    auto p = m.stage("solve", [&] { return profile_from(cfg, k, f); });
    m.stage("write", [&] { save_profile((dir / "profile.csv").string(), *p); });
    const bool pass = p->residual <= opt.tol && p->c > 0.0;
    summary_line(std::cout, {{"residual", num(p->residual)}, {"c", num(p->c)}, {"lambda", num(p->lambda)},
                             {"mu", num(p->mu)}, {"pass", pass ? "1" : "0"}});
    m.write(dir, pass ? ok : failed);
    return pass ? ok : failed;
}

inline int cmd_simulate(const Common& c) {
    const Config cfg = load_config(c);
    const Kernel k = kernel_from(cfg);
    const Bistable f = nonlinearity_from(cfg);
    const BoxSpec box = box_from(cfg, k.dimension());
    const ObstacleSpec obs = obstacle_from(cfg);
    const Scheme scheme = scheme_from(cfg);
    const double t0 = cfg.num("evolve.t0", 0.0), t1 = cfg.num("evolve.t1", 10.0), dt = cfg.num("evolve.dt", 0.05);
    const int stride = cfg.integer("evolve.snapshot_stride", 20);
    const std::string init = cfg.str("evolve.initial", "planar");
    const std::string closure = cfg.str("evolve.closure", init == "constant" ? "constant" : "planar");
    require(t1 > t0, "evolve.t1 must exceed evolve.t0");
    require(stride >= 1, "evolve.snapshot_stride must be >= 1");
    require(init == "planar" || init == "constant", "evolve.initial must be planar or constant");
    require(closure == "planar" || closure == "constant", "evolve.closure must be planar or constant");
    if (c.dry_run) {
        std::cout << "plan: simulate " << init << " data on box [" << num(box.x1lo) << ", " << num(box.x1hi) << "]"
                  << " obstacle=" << obstacle_kind_name(obs.kind) << " t=" << num(t0) << ".." << num(t1)
                  << " dt=" << num(dt) << " scheme=" << scheme_name(scheme) << "\n";
        return ok;
    }
    Manifest m("simulate", cfg);
    const auto dir = out_dir(c, cfg);
    auto g = m.stage("grid", [&] { return std::make_shared<ExteriorGrid>(k, box, obs); });
    auto p = m.stage("profile", [&] { return profile_from(cfg, k, f); });
    const double shift = -cfg.num("evolve.front_x", 0.0) - p->c * t0;
    const double value = cfg.num("evolve.value", 1.0);
    Evolution ev(*g, f, closure == "planar" ? planar_closure(p, shift) : constant_closure(value));
    Field u = init == "planar" ? make_field(*g, t0, [&](double x1, double) { return p->value(x1 + p->c * t0 + shift); })
                               : make_field(*g, t0, [&](double, double) { return value; });
    std::ofstream csv(dir / "diagnostics.csv");
    csv << "t,min,max,front,distance\n";
    const Probe probe = interior_probe(*g);
    int snap = 0;
    auto record = [&](const Field& cur) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < cur.u.size(); ++i)
            if (g->exterior(i)) {
                lo = std::min(lo, cur.u[i]);
                hi = std::max(hi, cur.u[i]);
            }
        csv << num(cur.t) << "," << num(lo) << "," << num(hi) << "," << num(front_position(cur, f.theta0())) << ","
            << num(front_distance(cur, *p, cur.t, probe, shift)) << "\n";
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%05d.bin", snap++);
        dump(dir / name, cur);
    };
    long step = 0;
    m.stage("evolve", [&] {
        record(u);
        ev.advance(u, t1, dt, scheme, [&](const Field& cur) {
            if (++step % stride == 0 && cur.t < t1) record(cur);
        });
        record(u);
    });
    summary_line(std::cout, {{"t", num(u.t)}, {"snapshots", std::to_string(snap)},
                             {"distance", num(front_distance(u, *p, u.t, probe, shift))}});
    m.write(dir, ok);
    return ok;
}

inline int cmd_certify(const Common& c, std::string which) {
    const Config cfg = load_config(c);
    if (which.empty()) which = cfg.str("certify.which", "wminus");
    const CertKind kind = cert_kind_from(which);
    const Kernel k = kernel_from(cfg);
    require(k.dimension() == 2, "certify runs on 2-D grids (kernel.dimension = 2)");
    const Bistable f = nonlinearity_from(cfg);
    const BoxSpec box = box_from(cfg, 2);
    const ObstacleSpec obs = obstacle_from(cfg);
    ScanOptions so;
    so.dt_fd = cfg.num("certify.dt_fd", 1e-3);
    so.samples = cfg.integer("certify.samples", 50);
    const double tol_cert = cert_tolerance(box.h, so.dt_fd, cfg.num("certify.tol_c", 0.1));
    so.tol = cfg.num("certify.tol", tol_cert);
    if (c.dry_run) {
        std::cout << "plan: certify " << cert_kind_name(kind) << " h=" << num(box.h) << " dt_fd=" << num(so.dt_fd)
                  << " samples=" << so.samples << " tol=" << num(so.tol) << "\n";
        return ok;
    }
    Manifest m("certify " + which, cfg);
    const auto dir = out_dir(c, cfg);
    auto p = m.stage("profile", [&] { return profile_from(cfg, k, f); });
    std::vector<std::pair<std::string, std::string>> extra;
    auto run = [&]() -> ResidualReport {
        switch (kind) {
            case CertKind::Wminus: case CertKind::Wplus: {
                ExteriorGrid g(k, box, obs);
                auto s = certify_shift(kind, *p, f, k, g, cfg.num("certify.tmin", -40.0), so);
                extra = {{"M", num(s.params.M)}, {"T", num(s.params.T())}};
                return s.report;
            }
            case CertKind::Uminus: case CertKind::Uplus: {
                LargeTimeScanSpec spec;
                spec.z = zparams_from(cfg);
                spec.lt = large_time_from(cfg);
                spec.tmax = cfg.num("certify.tmax", 50.0);
                spec.window = cfg.num("certify.window", 6.0);
                auto s = certify_large_time(kind, *p, f, k, obs, box.h, spec, so);
                extra = {{"Kz", num(s.setup.params.Kz)}, {"t_eps", num(s.setup.params.t_eps)}};
                return s.report;
            }
            default: {
                auto s = certify_planar(kind, *p, f, k, box.h, cfg.num("certify.tmax", 50.0), 20.0, so);
                extra = {{"eps", num(s.params.eps)}, {"omega", num(s.params.omega)}};
                return s.report;
            }
        }
    };
    const ResidualReport r = m.stage("scan", run);
    {
        std::ofstream csv(dir / ("certify_" + cert_kind_name(kind) + ".csv"));
        csv << "t,extremum,x1,x2\n";
        for (const auto& s : r.per_time) csv << num(s.t) << "," << num(s.extremum) << "," << num(s.x1) << "," << num(s.x2) << "\n";
    }
    std::vector<std::pair<std::string, std::string>> kv{
        {"which", cert_kind_name(kind)}, {"pass", r.pass ? "1" : "0"}, {"extremum", num(r.extremum)},
        {"x1", num(r.x1)}, {"x2", num(r.x2)}, {"t", num(r.t)}, {"tol", num(r.tol)}, {"tol_cert", num(tol_cert)},
        {"T1", num(r.T1)}};
    kv.insert(kv.end(), extra.begin(), extra.end());
    summary_line(std::cout, kv);
    m.write(dir, r.pass ? ok : failed);
    return r.pass ? ok : failed;
}

inline void write_summary(const std::filesystem::path& file, const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ofstream os(file);
    for (const auto& [k, v] : kv) os << k << "=" << v << "\n";
}

inline int cmd_experiment(const Common& c, std::string kind) {
    const Config cfg = load_config(c);
    if (kind.empty()) kind = cfg.str("experiment.kind", "recover");
    require(kind == "entire" || kind == "recover" || kind == "farfield" || kind == "liouville",
            "experiment.kind must be entire, recover, farfield or liouville");
    const Kernel k = kernel_from(cfg);
    require(k.dimension() == 2, "experiments run on 2-D grids (kernel.dimension = 2)");
    const Bistable f = nonlinearity_from(cfg);
    const BoxSpec box = box_from(cfg, 2);
    const ObstacleSpec obs = obstacle_from(cfg);
    const Scheme scheme = scheme_from(cfg);
    const double dt = cfg.num("evolve.dt", kind == "liouville" ? 0.08 : 0.05);
    RecoveryConfig rc;
    rc.front_x = cfg.num("experiment.front_x", 7.0);
    rc.t_end = cfg.num("experiment.t_end", 80.0);
    rc.dt = dt;
    rc.scheme = scheme;
    rc.diag_every = cfg.num("experiment.diag_every", 0.5);
    rc.eps_boundary = cfg.num("experiment.eps_boundary", 0.01);
    rc.peak_threshold = cfg.num("experiment.peak_threshold", 0.1);
    rc.final_threshold = cfg.num("experiment.final_threshold", 0.05);
    rc.relapse_threshold = cfg.num("experiment.relapse_threshold", 0.15);
    rc.snapshot_every = kind == "farfield" ? cfg.num("experiment.snapshot_every", 2.0) : 0.0;
    const auto offsets = cfg.list("experiment.offsets", {8.0, 16.0, 32.0});
    if (c.dry_run) {
        std::cout << "plan: experiment " << kind << " obstacle=" << obstacle_kind_name(obs.kind) << " box=["
                  << num(box.x1lo) << "," << num(box.x1hi) << "]x[" << num(box.x2lo) << "," << num(box.x2hi)
                  << "] h=" << num(box.h) << " dt=" << num(dt) << "\n";
        return ok;
    }
    Manifest m("experiment " + kind, cfg);
    const auto dir = out_dir(c, cfg);
    auto g = m.stage("grid", [&] { return std::make_shared<ExteriorGrid>(k, box, obs); });
    std::vector<std::pair<std::string, std::string>> kv{{"kind", kind}};
    bool pass = true;

    if (kind == "liouville") {
        LiouvilleConfig lc;
        lc.dip = cfg.num("experiment.dip", 0.5);
        lc.width = cfg.num("experiment.width", 2.0);
        lc.t_end = cfg.num("experiment.t_end", 200.0);
        lc.dt = dt;
        lc.scheme = scheme;
        LiouvilleReport rep;
        Field u = m.stage("evolve", [&] { return stationary_liouville(*g, f, lc, &rep); });
        dump(dir / "final.bin", u);
        pass = rep.sup_dev <= 1e-3 && rep.rhs_sup <= 1e-6;
        kv.insert(kv.end(), {{"sup_dev", num(rep.sup_dev)}, {"rhs_sup", num(rep.rhs_sup)},
                             {"condition_margin", num(rep.condition.margin)}, {"t", num(rep.t)}});
    } else {
        auto p = m.stage("profile", [&] { return profile_from(cfg, k, f); });
        if (kind == "entire") {
            const auto consts = m.stage("constants", [&] { return certificate_floor_constants(*p, f, k, obs); });
            ShiftParams sp{consts.M, p->lambda0, p->c};
            std::vector<int> ns;
            for (double n : cfg.list("experiment.n_list", {10, 20, 40})) ns.push_back(static_cast<int>(n));
            EntireOptions eo;
            eo.eval_times = cfg.list("experiment.eval_times", {-5.0, 0.0, 5.0});
            eo.dt = dt;
            eo.scheme = scheme;
            eo.lipschitz_until = cfg.num("experiment.lipschitz_until", std::numeric_limits<double>::quiet_NaN());
            auto r = m.stage("evolve", [&] { return construct_entire(ns, *g, f, p, sp, eo); });
            for (std::size_t ti = 0; ti < r.eval_times.size(); ++ti) {
                char name[48];
                std::snprintf(name, sizeof name, "entire_t%+g.bin", r.eval_times[ti]);
                dump(dir / name, r.limit(ti));
            }
            bool cauchy_ok = true;
            for (const auto& row : r.cauchy)
                for (std::size_t i = 1; i < row.size(); ++i) cauchy_ok = cauchy_ok && row[i] * 2.0 <= row[i - 1];
            pass = r.monotone_min >= -1e-8 && r.sandwich_violations == 0 && r.min_ut >= -1e-8 && cauchy_ok;
            kv.insert(kv.end(), {{"M", num(sp.M)}, {"T", num(sp.T())}, {"T1", num(r.T1)},
                                 {"monotone_min", num(r.monotone_min)},
                                 {"sandwich_violations", std::to_string(r.sandwich_violations)},
                                 {"min_ut", num(r.min_ut)}, {"mid_min_ut", num(r.mid_min_ut)},
                                 {"error_estimate", num(r.error_estimate)}, {"cauchy_ok", cauchy_ok ? "1" : "0"}});
        } else {
            auto d = m.stage("evolve", [&] { return recovery_experiment(*g, f, p, rc); });
            {
                std::ofstream csv(dir / "front_diagnostics.csv");
                csv << "t,distance,min,max";
                for (double l : d.lines) csv << ",front_x2=" << num(l);
                csv << "\n";
                for (std::size_t i = 0; i < d.t.size(); ++i) {
                    csv << num(d.t[i]) << "," << num(d.D[i]) << "," << num(d.umin[i]) << "," << num(d.umax[i]);
                    for (const auto& fr : d.front) csv << "," << num(fr[i]);
                    csv << "\n";
                }
            }
            kv.insert(kv.end(), {{"peak_D", num(d.peak_D)}, {"final_D", num(d.final_D)},
                                 {"t_boundary", num(d.t_boundary)}, {"relapse_max", num(d.relapse_max)},
                                 {"hypothesis_ok", d.hypothesis_ok ? "1" : "0"},
                                 {"conclusion_ok", d.conclusion_ok ? "1" : "0"}});
            pass = d.hypothesis_ok && d.conclusion_ok;
            if (kind == "farfield") {
                const double hw = cfg.num("experiment.half_width", k.support_radius());
                auto ff = farfield_translate_check(d.trajectory, *p, offsets, hw, -rc.front_x);
                ExteriorGrid g0(k, box, ObstacleSpec::none());
                auto d0 = m.stage("control", [&] { return recovery_experiment(g0, f, p, rc); });
                auto ff0 = farfield_translate_check(d0.trajectory, *p, offsets, hw, -rc.front_x);
                for (std::size_t i = 0; i < offsets.size(); ++i) {
                    kv.emplace_back("offset_" + num(offsets[i]), num(ff.distance[i]));
                    kv.emplace_back("floor_" + num(offsets[i]), num(ff0.distance[i]));
                }
                pass = ff.strictly_decreasing && ff.distance.back() <= 2.0 * ff0.distance.back();
                kv.emplace_back("strictly_decreasing", ff.strictly_decreasing ? "1" : "0");
            }
        }
    }
    kv.emplace_back("pass", pass ? "1" : "0");
    write_summary(dir / "summary.txt", kv);
    summary_line(std::cout, kv);
    m.write(dir, pass ? ok : failed);
    return pass ? ok : failed;
}

inline int cmd_zfn(const Common& c, double eta, double eps1, double t1, double tmax, int samples) {
    ZFunction z(ZParams{eta, eps1, t1});
    if (tmax <= 0.0) tmax = t1 + 20.0 / eta;
    require(samples >= 2, "zfn --samples must be >= 2");
    if (c.dry_run) {
        std::cout << "plan: z-function eta=" << num(eta) << " eps1=" << num(eps1) << " t1=" << num(t1)
                  << " samples=" << samples << "\n";
        return ok;
    }
    const ZReport r = z_report(z);
    const bool pass = r.min_slack >= -1e-10 && r.z0 == eps1 && r.z_at_1 >= 0.5 * eps1 && r.min_tail_slack >= 0.0 &&
                      r.max_jump_value <= 1e-10 && r.max_jump_slope <= 1e-10 && std::isfinite(r.integral);
    std::ostringstream csv;
    csv << "t,z,dz\n";
    for (int i = 0; i < samples; ++i) {
        const double t = tmax * i / (samples - 1);
        csv << num(t) << "," << num(z(t)) << "," << num(z.deriv(t)) << "\n";
    }
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!c.out.empty()) {
        std::filesystem::create_directories(c.out);
        file.open(std::filesystem::path(c.out) / "zfn.csv");
        os = &file;
    }
    *os << csv.str();
    std::ostringstream sum;
    summary_line(sum, {{"min_slack", num(r.min_slack)}, {"z0", num(r.z0)}, {"z1", num(r.z_at_1)}, {"K0", num(r.K0)},
                       {"min_tail_slack", num(r.min_tail_slack)}, {"jump_value", num(r.max_jump_value)},
                       {"jump_slope", num(r.max_jump_slope)}, {"integral", num(r.integral)},
                       {"integral_bound", num(r.integral_bound)}, {"pass", pass ? "1" : "0"}});
    if (c.out.empty()) std::cout << "# " << sum.str();
    else std::cout << sum.str();
    return pass ? ok : failed;
}

/// Quick end-to-end sanity pass on small grids.
inline int cmd_selfcheck(const Common& c) {
    if (c.dry_run) {
        std::cout << "plan: selfcheck (profile, z-function, 1-D planar advection)\n";
        return ok;
    }
    bool all = true;
    auto line = [&](const std::string& name, bool pass, const std::string& detail) {
        std::cout << (pass ? "PASS " : "FAIL ") << name << " " << detail << "\n";
        all = all && pass;
    };
    const Kernel k(1, 1.0, 2);
    const Bistable f(0.25, 1.0);
    auto p = std::make_shared<WaveProfile>(solve_profile(k, f, 20.0, 0.0625));
    line("profile", p->residual <= 1e-8 && p->c > 0.0, "residual=" + num(p->residual) + " c=" + num(p->c));
    const ZReport zr = z_report(ZFunction(ZParams{0.3, 0.1, 20.0}));
    line("zfn", zr.min_slack >= -1e-10 && zr.max_jump_value <= 1e-10, "min_slack=" + num(zr.min_slack));
    ExteriorGrid g(k, BoxSpec{1, -20, 20, 0, 0, 0.0625}, ObstacleSpec::none());
    Evolution ev(g, f, planar_closure(p));
    Field u = make_field(g, 0.0, [&](double x1, double) { return p->value(x1); });
    ev.advance(u, 2.0, 0.02, Scheme::rk4);
    const double D = front_distance(u, *p, 2.0, interior_probe(g));
    line("advection", D <= 1e-3, "D=" + num(D));
    return all ? ok : failed;
}

// ---- entry point -----------------------------------------------------------------

inline int run(int argc, char** argv) {
    CLI::App app{"nldisp: bistable nonlocal dispersal on exterior domains"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* s, bool need_config) {
        auto* o = s->add_option("--config", common.config_path, "run configuration file");
        if (need_config) o->required()->check(CLI::ExistingFile);
        s->add_option("--out", common.out, "output directory");
        s->add_flag("--dry-run", common.dry_run, "validate and print the plan, write nothing");
    };
    auto* wave = app.add_subcommand("wave", "solve the traveling-wave profile");
    add_common(wave, true);
    auto* sim = app.add_subcommand("simulate", "evolve initial data on the exterior grid");
    add_common(sim, true);
    std::string which;
    auto* cert = app.add_subcommand("certify", "residual sign scan of a sub/super-solution");
    add_common(cert, true);
    cert->add_option("--which", which, "wminus|wplus|uminus|uplus|planar|planar_upper");
    std::string kind;
    auto* exp = app.add_subcommand("experiment", "recovery, entire, far-field and stationary runs");
    add_common(exp, true);
    exp->add_option("kind", kind, "entire|recover|farfield|liouville");
    double eta = 0.3, eps1 = 0.1, t1 = 20.0, tmax = -1.0;
    int samples = 1001;
    auto* zfn = app.add_subcommand("zfn", "tabulate the damping function z");
    add_common(zfn, false);
    zfn->add_option("--eta", eta);
    zfn->add_option("--eps1", eps1);
    zfn->add_option("--t1", t1);
    zfn->add_option("--tmax", tmax);
    zfn->add_option("--samples", samples);
    auto* self = app.add_subcommand("selfcheck", "small end-to-end checks");
    add_common(self, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : bad_config;
    }
    try {
        if (*wave) return cmd_wave(common);
        if (*sim) return cmd_simulate(common);
        if (*cert) return cmd_certify(common, which);
        if (*exp) return cmd_experiment(common, kind);
        if (*zfn) return cmd_zfn(common, eta, eps1, t1, tmax, samples);
        return cmd_selfcheck(common);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return bad_config;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return bad_config;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return failed;
    }
}

}  // namespace nldisp::cli
