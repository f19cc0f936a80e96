#pragma once

#include <charconv>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "certificates.hpp"
#include "domain.hpp"
#include "error.hpp"
#include "evolution.hpp"
#include "kernel.hpp"
#include "nonlinearity.hpp"
#include "traveling_wave.hpp"
#include "zfunction.hpp"

namespace nldisp {

/// Every key the run configuration understands; anything else is rejected.
inline const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys = {
        "seed", "threads",
        "kernel.dimension", "kernel.support_radius", "kernel.exponent", "kernel.quad_nodes",
        "nonlinearity.family", "nonlinearity.a", "nonlinearity.kappa", "nonlinearity.roots",
        "domain.box", "domain.h",
        "obstacle.kind", "obstacle.center", "obstacle.radius", "obstacle.axes", "obstacle.vertices",
        "obstacle.require_left_halfplane",
        "wave.zmax", "wave.h", "wave.tol", "wave.max_newton",
        "evolve.dt", "evolve.scheme", "evolve.t0", "evolve.t1", "evolve.snapshot_stride", "evolve.initial",
        "evolve.front_x", "evolve.value", "evolve.closure",
        "certify.which", "certify.tol", "certify.tol_c", "certify.dt_fd", "certify.samples", "certify.tmin",
        "certify.tmax", "certify.beta", "certify.alpha", "certify.gamma", "certify.beta_plus",
        "certify.alpha_plus", "certify.tilt", "certify.eta_z", "certify.eps1", "certify.t1", "certify.window",
        "experiment.kind", "experiment.n_list", "experiment.eval_times", "experiment.offsets",
        "experiment.half_width", "experiment.t_end", "experiment.front_x", "experiment.diag_every",
        "experiment.peak_threshold", "experiment.final_threshold", "experiment.relapse_threshold",
        "experiment.eps_boundary", "experiment.dip", "experiment.width", "experiment.snapshot_every",
        "experiment.lipschitz_until",
        "output.directory", "output.formats",
    };
    return keys;
}

/// Sectioned key = value text: `[section]` headers, `#` comments, lists as
/// `[1, 2, 3]` or bare comma-separated values, optional double quotes on strings.
class Config {
public:
    static Config parse(std::istream& is, const std::string& source = "<config>") {
        Config c;
        std::string line, section;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const std::string where = source + ":" + std::to_string(lineno);
            if (line.front() == '[' && line.find('=') == std::string::npos) {
                if (line.back() != ']') throw ConfigError(where + ": malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
            std::string key = trim(line.substr(0, eq));
            std::string val = trim(line.substr(eq + 1));
            if (key.empty()) throw ConfigError(where + ": empty key");
            if (!section.empty()) key = section + "." + key;
            if (!known_config_keys().count(key)) throw ConfigError("unknown config key '" + key + "' (" + where + ")");
            if (c.kv_.count(key)) throw ConfigError("duplicate config key '" + key + "' (" + where + ")");
            if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
            c.kv_[key] = val;
        }
        return c;
    }

    static Config parse_string(const std::string& text) {
        std::istringstream is(text);
        return parse(is);
    }

    static Config load(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw ConfigError("cannot read config file " + path);
        return parse(is, path);
    }

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    void set(const std::string& key, const std::string& v) {
        if (!known_config_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
        kv_[key] = v;
    }

    double num(const std::string& key, double def) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? def : to_double(key, it->second);
    }
    int integer(const std::string& key, int def) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return def;
        int v = 0;
        const auto& s = it->second;
        auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError(key + ": expected an integer, got '" + s + "'");
        return v;
    }
    std::string str(const std::string& key, const std::string& def) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? def : it->second;
    }
    bool flag(const std::string& key, bool def) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return def;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw ConfigError(key + ": expected true or false");
    }
    std::vector<double> list(const std::string& key, const std::vector<double>& def) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return def;
        std::string s = it->second;
        if (!s.empty() && s.front() == '[') {
            if (s.back() != ']') throw ConfigError(key + ": unterminated list");
            s = s.substr(1, s.size() - 2);
        }
        std::vector<double> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(to_double(key, item));
        }
        return out;
    }

    const std::map<std::string, std::string>& entries() const { return kv_; }

    /// Canonical `key = value` dump (sorted keys).
    std::string canonical() const {
        std::string s;
        for (const auto& [k, v] : kv_) s += k + " = " + v + "\n";
        return s;
    }

    /// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
    std::string hash() const {
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char ch : canonical()) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

private:
    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }
    static double to_double(const std::string& key, const std::string& s) {
        double v = 0.0;
        auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError(key + ": expected a number, got '" + s + "'");
        return v;
    }

    std::map<std::string, std::string> kv_;
};

// ---- typed views ---------------------------------------------------------------

namespace detail {
template <class Fn>
auto keyed(const std::string& key, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what());
    }
}
}  // namespace detail

inline Kernel kernel_from(const Config& c) {
    return detail::keyed("kernel", [&] {
        return Kernel(c.integer("kernel.dimension", 2), c.num("kernel.support_radius", 1.6),
                      c.integer("kernel.exponent", 2), c.integer("kernel.quad_nodes", 1024));
    });
}

inline Bistable nonlinearity_from(const Config& c) {
    return detail::keyed("nonlinearity", [&] {
        const std::string fam = c.str("nonlinearity.family", "bistable");
        const double kappa = c.num("nonlinearity.kappa", 1.0);
        if (fam == "bistable") return Bistable(c.num("nonlinearity.a", 0.25), kappa);
        if (fam == "multistable") {
            const auto r = c.list("nonlinearity.roots", {0.2, 0.5, 0.7});
            require(r.size() == 3, "nonlinearity.roots needs three values");
            return Bistable::multistable(r[0], r[1], r[2], kappa);
        }
        throw ConfigError("nonlinearity.family must be bistable or multistable");
    });
}

inline BoxSpec box_from(const Config& c, int dim) {
    const auto b = c.list("domain.box", dim == 1 ? std::vector<double>{-40, 40} : std::vector<double>{-12, 24, -8, 8});
    BoxSpec s;
    s.dim = dim;
    s.h = c.num("domain.h", 0.1);
    if (dim == 1) {
        require(b.size() == 2, "domain.box needs [x1lo, x1hi] in 1-D");
        s.x1lo = b[0];
        s.x1hi = b[1];
        s.x2lo = s.x2hi = 0.0;
    } else {
        require(b.size() == 4, "domain.box needs [x1lo, x1hi, x2lo, x2hi] in 2-D");
        s.x1lo = b[0];
        s.x1hi = b[1];
        s.x2lo = b[2];
        s.x2hi = b[3];
    }
    return s;
}

inline ObstacleSpec obstacle_from(const Config& c) {
    const std::string kind = c.str("obstacle.kind", "none");
    const auto ctr = c.list("obstacle.center", {0.0, 0.0});
    require(ctr.size() == 2, "obstacle.center needs two values");
    ObstacleSpec s;
    if (kind == "none") {
        s = ObstacleSpec::none();
    } else if (kind == "disc") {
        s = ObstacleSpec::disc(ctr[0], ctr[1], c.num("obstacle.radius", 1.0));
    } else if (kind == "ellipse") {
        const auto ax = c.list("obstacle.axes", {1.0, 1.0});
        require(ax.size() == 2, "obstacle.axes needs two values");
        s = ObstacleSpec::ellipse(ctr[0], ctr[1], ax[0], ax[1]);
    } else if (kind == "polygon") {
        const auto v = c.list("obstacle.vertices", {});
        require(v.size() >= 6 && v.size() % 2 == 0, "obstacle.vertices needs x,y pairs for at least 3 vertices");
        std::vector<Point2> pts;
        for (std::size_t i = 0; i < v.size(); i += 2) pts.push_back({v[i], v[i + 1]});
        s = ObstacleSpec::polygon(std::move(pts));
    } else {
        throw ConfigError("obstacle.kind must be none, disc, ellipse or polygon");
    }
    s.require_left_halfplane = c.flag("obstacle.require_left_halfplane", false);
    detail::keyed("obstacle", [&] { s.validate(); return 0; });
    return s;
}

inline Scheme scheme_from(const Config& c) {
    const std::string s = c.str("evolve.scheme", "rk4");
    if (s == "rk4") return Scheme::rk4;
    if (s == "heun") return Scheme::heun;
    throw ConfigError("evolve.scheme must be rk4 or heun");
}

inline CertKind cert_kind_from(const std::string& s) {
    if (s == "wminus") return CertKind::Wminus;
    if (s == "wplus") return CertKind::Wplus;
    if (s == "uminus") return CertKind::Uminus;
    if (s == "uplus") return CertKind::Uplus;
    if (s == "planar" || s == "planar_lower") return CertKind::PlanarLower;
    if (s == "planar_upper") return CertKind::PlanarUpper;
    throw ConfigError("certify.which must be wminus, wplus, uminus, uplus or planar");
}

inline TiltForm tilt_form_from(const Config& c) {
    const std::string s = c.str("certify.tilt", "gaussian");
    if (s == "gaussian") return TiltForm::gaussian;
    if (s == "linear") return TiltForm::linear;
    throw ConfigError("certify.tilt must be gaussian or linear");
}

inline ZParams zparams_from(const Config& c) {
    return ZParams{c.num("certify.eta_z", 0.05), c.num("certify.eps1", 0.02), c.num("certify.t1", 1.0)};
}

inline LargeTimeParams large_time_from(const Config& c) {
    LargeTimeParams lt;
    lt.beta = c.num("certify.beta", 0.2);
    lt.alpha = c.num("certify.alpha", 0.75);
    lt.gamma = c.num("certify.gamma", 2.0);
    lt.beta_plus = c.num("certify.beta_plus", lt.beta);
    lt.alpha_plus = c.num("certify.alpha_plus", lt.alpha);
    lt.form = tilt_form_from(c);
    lt.eps = 0.5 * zparams_from(c).eps1;
    return lt;
}

inline ProfileOptions profile_options_from(const Config& c) {
    ProfileOptions o;
    o.tol = c.num("wave.tol", 1e-8);
    o.max_newton = c.integer("wave.max_newton", 100);
    require(o.tol > 0.0 && o.max_newton > 0, "wave.tol and wave.max_newton must be positive");
    return o;
}

}  // namespace nldisp
