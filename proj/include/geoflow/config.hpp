#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "geoflow/dynamics.hpp"
#include "geoflow/shapes.hpp"

namespace geoflow {

/// Flat key = value configuration; '#' starts a comment; CLI --set overrides
/// file keys.
struct RunConfig {
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        std::size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size())
            throw std::invalid_argument("config: malformed number for key " + key);
        return v;
    }

    int get_int(const std::string& key, int fallback) const {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        std::size_t pos = 0;
        int v = std::stoi(it->second, &pos);
        if (pos != it->second.size())
            throw std::invalid_argument("config: malformed integer for key " + key);
        return v;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw std::invalid_argument("config: malformed bool for key " + key);
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

inline void apply_override(RunConfig& cfg, const std::string& assignment) {
    std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must look like key=value: " + assignment);
    std::string key = detail::trim(assignment.substr(0, eq));
    std::string val = detail::trim(assignment.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("override has empty key: " + assignment);
    cfg.kv[key] = val;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        apply_override(cfg, line);
    }
    return cfg;
}

/// Parses "name" or "name(a,b,c)" into name + numeric args.
inline std::pair<std::string, std::vector<double>> parse_preset(const std::string& text) {
    std::size_t open = text.find('(');
    if (open == std::string::npos) return {detail::trim(text), {}};
    if (text.back() != ')')
        throw std::invalid_argument("malformed preset: " + text);
    std::string name = detail::trim(text.substr(0, open));
    std::string args = text.substr(open + 1, text.size() - open - 2);
    std::vector<double> vals;
    std::stringstream ss(args);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(detail::trim(tok)));
    return {name, vals};
}

inline FunctionalSpec build_functional(const RunConfig& cfg) {
    auto [name, args] = parse_preset(cfg.get_string("functional.preset", "area"));
    if (name == "area") return preset_area();
    if (name == "willmore") return preset_willmore();
    if (name == "helfrich") {
        if (args.size() != 1) throw std::invalid_argument("helfrich needs (c0)");
        return preset_helfrich(args[0]);
    }
    if (name == "gauss") return preset_gauss();
    if (name == "total_mean") return preset_total_mean();
    if (name == "h2_plus_g") return preset_h2_plus_g();
    if (name == "aniso_diag") {
        if (args.size() != 3) throw std::invalid_argument("aniso_diag needs (m1,m2,m3)");
        return preset_aniso_diag(args[0], args[1], args[2]);
    }
    throw std::invalid_argument("unknown functional preset: " + name);
}

inline GridSpec build_grid(const RunConfig& cfg) {
    int nx = cfg.get_int("grid.nx", cfg.get_int("grid.n", 64));
    int ny = cfg.get_int("grid.ny", nx);
    int nz = cfg.get_int("grid.nz", nx);
    double xmin = cfg.get_double("box.xmin", cfg.get_double("box.min", -1.0));
    double xmax = cfg.get_double("box.xmax", cfg.get_double("box.max", 1.0));
    double h = (xmax - xmin) / (nx - 1);
    double ymin = cfg.get_double("box.ymin", xmin);
    double zmin = cfg.get_double("box.zmin", xmin);
    if (cfg.has("box.ymax")) {
        double hy = (cfg.get_double("box.ymax", 0.0) - ymin) / (ny - 1);
        if (std::abs(hy - h) > 1e-12 * std::abs(h))
            throw std::invalid_argument("config: y spacing differs from x spacing");
    }
    if (cfg.has("box.zmax")) {
        double hz = (cfg.get_double("box.zmax", 0.0) - zmin) / (nz - 1);
        if (std::abs(hz - h) > 1e-12 * std::abs(h))
            throw std::invalid_argument("config: z spacing differs from x spacing");
    }
    return GridSpec({nx, ny, nz}, {xmin, ymin, zmin}, h);
}

inline AnalyticShape build_shape(const RunConfig& cfg) {
    std::string kind = cfg.get_string("shape.kind", "sphere");
    AnalyticShape base;
    if (kind == "sphere") {
        base = Sphere{{cfg.get_double("shape.cx", 0.0), cfg.get_double("shape.cy", 0.0),
                       cfg.get_double("shape.cz", 0.0)},
                      cfg.get_double("shape.radius", 0.5)};
    } else if (kind == "ellipsoid") {
        base = Ellipsoid{cfg.get_double("shape.a", 0.5), cfg.get_double("shape.b", 0.5),
                         cfg.get_double("shape.c", 0.5)};
    } else if (kind == "torus") {
        base = Torus{cfg.get_double("shape.major", 0.5), cfg.get_double("shape.minor", 0.2)};
    } else {
        throw std::invalid_argument("unknown shape.kind: " + kind);
    }
    std::string mult = cfg.get_string("shape.multiplier", "none");
    if (mult == "none") return base;
    Multiplier m;
    if (mult == "two_plus_x")
        m = Multiplier::TwoPlusX;
    else if (mult == "exp_x")
        m = Multiplier::ExpX;
    else
        throw std::invalid_argument("unknown shape.multiplier: " + mult);
    Perturbed p;
    if (auto* s = std::get_if<Sphere>(&base))
        p.base = *s;
    else if (auto* e = std::get_if<Ellipsoid>(&base))
        p.base = *e;
    else
        p.base = std::get<Torus>(base);
    p.mult = m;
    return p;
}

inline SmearKernel build_kernel(const RunConfig& cfg, double h) {
    double ratio = cfg.get_double("kernel.eps_over_h", 3.0);
    return SmearKernel(ratio * h);
}

inline FlowConfig build_flow_config(const RunConfig& cfg) {
    FlowConfig fc;
    fc.dt_safety = cfg.get_double("flow.dt_safety", 0.5);
    fc.redistance_every = cfg.get_int("flow.redistance_every", 1);
    fc.max_steps = cfg.get_int("flow.steps", 100);
    fc.stop_grad_norm = cfg.get_double("flow.stop_grad_norm", 0.0);
    double cap = cfg.get_double("flow.dt_cap", 0.0);
    if (cap > 0.0) fc.dt_cap = cap;
    return fc;
}

/// Named velocity presets used by the gradient command and the oracle tests.
inline VelocitySpec velocity_preset(const std::string& name, const GridSpec& spec) {
    if (name == "uniform") {
        return NormalSpeed{map_points(spec, [](std::size_t) { return 1.0; })};
    }
    if (name == "linear") {
        return FullVector{sample_vector(spec, [](const Vec3& p) {
            return Vec3{p.x, -p.y, 0.0};
        })};
    }
    if (name == "trig") {
        return FullVector{sample_vector(spec, [](const Vec3& p) {
            return Vec3{0.5 * std::sin(p.x) + 0.3 * std::cos(2.0 * p.y),
                        0.4 * std::sin(p.y) + 0.2 * std::cos(p.z),
                        0.6 * std::sin(p.z) + 0.2 * std::sin(p.x + p.y)};
        })};
    }
    throw std::invalid_argument("unknown velocity preset: " + name);
}

inline std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = detail::trim(tok);
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

}  // namespace geoflow
