#include "statgeo/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace statgeo {

namespace {

using json = nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string indexed(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const char* type_name(const json& j) { return j.type_name(); }

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, std::string("expected a number, got ") + type_name(j));
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
    return v;
}

long long as_integer(const json& j, const std::string& path) {
    if (j.is_number_integer()) return j.get<long long>();
    const double v = as_number(j, path);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ConfigError(path, "expected an integer");
    return static_cast<long long>(v);
}

// Object view that remembers which keys were read, so leftovers can be
// reported as unknown.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    const std::string& path() const noexcept { return path_; }
    std::string child(const std::string& key) const { return join(path_, key); }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& at(const std::string& key) {
        if (!j_.contains(key)) throw ConfigError(child(key), "required key is missing");
        used_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key, double fallback) {
        return has(key) ? as_number(at(key), child(key)) : fallback;
    }

    int integer(const std::string& key, int fallback, long long lo = std::numeric_limits<int>::min(),
                long long hi = std::numeric_limits<int>::max()) {
        if (!has(key)) return fallback;
        const long long v = as_integer(at(key), child(key));
        if (v < lo || v > hi) {
            throw ConfigError(child(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        return static_cast<int>(v);
    }

    std::string string(const std::string& key) {
        const json& v = at(key);
        if (!v.is_string()) throw ConfigError(child(key), std::string("expected a string, got ") + type_name(v));
        return v.get<std::string>();
    }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!used_.count(item.key())) throw ConfigError(child(item.key()), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

const json& as_array(const json& j, const std::string& path, std::size_t expected = 0) {
    if (!j.is_array()) throw ConfigError(path, std::string("expected an array, got ") + type_name(j));
    if (expected && j.size() != expected) {
        throw ConfigError(path, "expected " + std::to_string(expected) + " entries, got " + std::to_string(j.size()));
    }
    return j;
}

Vec as_point(const json& j, const std::string& path, std::size_t dim) {
    as_array(j, path, dim);
    Vec v(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) v[static_cast<Eigen::Index>(i)] = as_number(j[i], indexed(path, i));
    return v;
}

FieldExpr as_expr(const json& j, const std::string& path, const std::vector<std::string>& coords) {
    if (j.is_number()) return FieldExpr::constant(as_number(j, path));
    if (!j.is_string()) throw ConfigError(path, std::string("expected an expression string, got ") + type_name(j));
    try {
        return FieldExpr::parse(j.get<std::string>(), coords);
    } catch (const ParseError& e) {
        throw ConfigError(path, e.what());
    } catch (const UnknownIdentifier& e) {
        throw ConfigError(path, e.what());
    }
}

// Registry errors carry paths relative to the spacetime section.
[[noreturn]] void rethrow_under(const std::string& prefix, const ConfigError& e) {
    if (e.path().rfind(prefix + ".", 0) == 0) throw e;
    const std::string what = e.what();
    const std::string detail = what.size() > e.path().size() + 2 ? what.substr(e.path().size() + 2) : what;
    throw ConfigError(join(prefix, e.path()), detail);
}

StationarySpacetime registry_spacetime(Section& sec) {
    const std::string name = sec.string("registry");
    RegistryParams params;
    if (sec.has("params")) {
        Section p(sec.at("params"), sec.child("params"));
        for (const auto& item : sec.at("params").items()) {
            const json& v = p.at(item.key());
            if (v.is_number()) {
                params[item.key()] = as_number(v, p.child(item.key()));
            } else if (v.is_string()) {
                params[item.key()] = v.get<std::string>();
            } else {
                throw ConfigError(p.child(item.key()), "expected a number or an expression string");
            }
        }
    }
    try {
        return registry_get(name, params);
    } catch (const ConfigError& e) {
        rethrow_under(sec.path(), e);
    }
}

StationarySpacetime inline_spacetime(const json& j, const std::string& path) {
    Section sec(j, path);
    std::vector<std::string> coords;
    const json& cj = as_array(sec.at("coords"), sec.child("coords"));
    for (std::size_t i = 0; i < cj.size(); ++i) {
        if (!cj[i].is_string()) throw ConfigError(indexed(sec.child("coords"), i), "expected a coordinate name");
        coords.push_back(cj[i].get<std::string>());
    }
    const std::size_t d = coords.size();
    if (d < 1 || d > static_cast<std::size_t>(kMaxSpatialDim)) {
        throw ConfigError(sec.child("coords"), "between 1 and " + std::to_string(kMaxSpatialDim) + " coordinates required");
    }
    if (sec.has("dimension") && sec.integer("dimension", 0) != static_cast<int>(d)) {
        throw ConfigError(sec.child("dimension"), "does not match the number of coordinates");
    }

    std::vector<FieldExpr> domain;
    if (sec.has("domain")) {
        const json& dj = as_array(sec.at("domain"), sec.child("domain"));
        for (std::size_t i = 0; i < dj.size(); ++i) domain.push_back(as_expr(dj[i], indexed(sec.child("domain"), i), coords));
    }
    std::vector<std::optional<double>> periods(d);
    if (sec.has("periods")) {
        const json& pj = as_array(sec.at("periods"), sec.child("periods"), d);
        for (std::size_t i = 0; i < d; ++i) {
            if (!pj[i].is_null()) periods[i] = as_number(pj[i], indexed(sec.child("periods"), i));
        }
    }
    std::vector<std::vector<FieldExpr>> g(d);
    const json& gj = as_array(sec.at("g"), sec.child("g"), d);
    for (std::size_t r = 0; r < d; ++r) {
        const std::string row_path = indexed(sec.child("g"), r);
        const json& row = as_array(gj[r], row_path, d);
        for (std::size_t c = 0; c < d; ++c) g[r].push_back(as_expr(row[c], indexed(row_path, c), coords));
    }
    FieldExpr beta = as_expr(sec.at("beta"), sec.child("beta"), coords);
    std::vector<FieldExpr> delta;
    if (sec.has("delta")) {
        const json& dj = as_array(sec.at("delta"), sec.child("delta"), d);
        for (std::size_t i = 0; i < d; ++i) delta.push_back(as_expr(dj[i], indexed(sec.child("delta"), i), coords));
    } else {
        delta.assign(d, FieldExpr::constant(0.0));
    }
    Vec base = Vec::Zero(static_cast<Eigen::Index>(d));
    if (sec.has("base_point")) base = as_point(sec.at("base_point"), sec.child("base_point"), d);
    std::string label = "inline";
    if (sec.has("label")) label = sec.string("label");
    sec.finish();

    ChartManifold chart(coords, std::move(domain), std::move(periods), base);
    StationarySpacetime st(std::move(chart), std::move(g), std::move(beta), std::move(delta), label);
    st.validate(st.probe_points());
    return st;
}

EndpointConfig parse_endpoints(const json& j, const std::string& path, std::size_t dim) {
    Section sec(j, path);
    EndpointConfig e;
    e.x_p = as_point(sec.at("x_p"), sec.child("x_p"), dim);
    e.x_q = as_point(sec.at("x_q"), sec.child("x_q"), dim);
    e.t_p = sec.number("t_p", 0.0);
    e.t_q = as_number(sec.at("t_q"), sec.child("t_q"));
    if (sec.has("windings")) {
        const json& wj = as_array(sec.at("windings"), sec.child("windings"), dim);
        for (std::size_t i = 0; i < dim; ++i) {
            e.windings.push_back(static_cast<int>(as_integer(wj[i], indexed(sec.child("windings"), i))));
        }
    }
    sec.finish();
    return e;
}

SolveConfig parse_solver(const json& j, const std::string& path) {
    Section sec(j, path);
    SolveConfig c;
    c.segments = sec.integer("segments", c.segments, 2, 1 << 20);
    c.max_iterations = sec.integer("max_iterations", c.max_iterations, 0);
    c.gradient_tolerance = sec.number("gradient_tolerance", c.gradient_tolerance);
    c.armijo_c1 = sec.number("armijo_c1", c.armijo_c1);
    c.backtrack = sec.number("backtrack", c.backtrack);
    c.max_backtracks = sec.integer("max_backtracks", c.max_backtracks, 1);
    c.dedupe_radius = sec.number("dedupe_radius", c.dedupe_radius);
    c.stall_window = sec.integer("stall_window", c.stall_window, 1);
    c.blowup_factor = sec.number("blowup_factor", c.blowup_factor);
    c.boundary_floor = sec.number("boundary_floor", c.boundary_floor);
    c.threads = sec.integer("threads", c.threads, 0);
    if (sec.has("seeds")) {
        Section s(sec.at("seeds"), sec.child("seeds"));
        c.seeds.random_count = s.integer("random_count", c.seeds.random_count, 0);
        c.seeds.winding_lo = s.integer("winding_lo", c.seeds.winding_lo);
        c.seeds.winding_hi = s.integer("winding_hi", c.seeds.winding_hi);
        c.seeds.perturbation = s.number("perturbation", c.seeds.perturbation);
        if (s.has("rng_seed")) {
            const long long v = as_integer(s.at("rng_seed"), s.child("rng_seed"));
            if (v < 0) throw ConfigError(s.child("rng_seed"), "must be non-negative");
            c.seeds.rng_seed = static_cast<std::uint64_t>(v);
        }
        s.finish();
    }
    sec.finish();
    try {
        c.validate();
    } catch (const InvariantViolation& e) {
        throw ConfigError(path, e.what());
    }
    return c;
}

VerifyThresholds parse_verify(const json& j, const std::string& path) {
    Section sec(j, path);
    VerifyThresholds t;
    t.residual = sec.number("residual", t.residual);
    t.constraint_drift = sec.number("constraint_drift", t.constraint_drift);
    t.energy_drift = sec.number("energy_drift", t.energy_drift);
    sec.finish();
    if (!(t.residual > 0.0 && t.constraint_drift > 0.0 && t.energy_drift > 0.0)) {
        throw ConfigError(path, "thresholds must be positive");
    }
    return t;
}

DiagnoseConfig parse_diagnose(const json& j, const std::string& path) {
    Section sec(j, path);
    DiagnoseConfig c;
    c.growth.r_min = sec.number("r_min", c.growth.r_min);
    c.growth.r_max = sec.number("r_max", c.growth.r_max);
    c.growth.samples = sec.integer("samples", c.growth.samples, 4, 1 << 16);
    c.growth.slack = sec.number("slack", c.growth.slack);
    c.probe.first_shell = sec.number("first_shell", c.probe.first_shell);
    c.probe.max_length = sec.number("max_length", c.probe.max_length);
    c.probe.cap = sec.number("cap", c.probe.cap);
    sec.finish();
    if (!(c.growth.r_min > 0.0 && c.growth.r_max > c.growth.r_min)) {
        throw ConfigError(path, "need 0 < r_min < r_max");
    }
    if (!(c.probe.first_shell > 0.0 && c.probe.max_length >= c.probe.first_shell && c.probe.cap > 0.0)) {
        throw ConfigError(path, "need 0 < first_shell <= max_length and cap > 0");
    }
    return c;
}

}  // namespace

ProblemInstance RunConfig::problem() const {
    if (!endpoints) throw ConfigError("endpoints", "required for this command");
    return ProblemInstance::make(spacetime, endpoints->x_p, endpoints->t_p, endpoints->x_q, endpoints->t_q,
                                 endpoints->windings);
}

RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    Section root(doc, "");
    RunConfig cfg;

    Section sp(root.at("spacetime"), "spacetime");
    const bool registry = sp.has("registry");
    const bool inline_def = sp.has("inline");
    if (registry == inline_def) {
        throw ConfigError("spacetime", "exactly one of 'registry' or 'inline' is required");
    }
    if (registry) {
        cfg.spacetime = std::make_shared<const StationarySpacetime>(registry_spacetime(sp));
        cfg.spacetime_source = cfg.spacetime->label();
    } else {
        cfg.spacetime = std::make_shared<const StationarySpacetime>(inline_spacetime(sp.at("inline"), "spacetime.inline"));
        cfg.spacetime_source = "inline";
    }
    sp.finish();

    const auto dim = static_cast<std::size_t>(cfg.spacetime->dim());
    if (root.has("endpoints")) {
        cfg.endpoints = parse_endpoints(root.at("endpoints"), "endpoints", dim);
        for (const auto& [key, x] : {std::pair{"x_p", &cfg.endpoints->x_p}, std::pair{"x_q", &cfg.endpoints->x_q}}) {
            if (!cfg.spacetime->base().contains(*x)) {
                throw ConfigError(std::string("endpoints.") + key, "point lies outside the chart domain");
            }
        }
        cfg.spacetime->validate({cfg.endpoints->x_p, cfg.endpoints->x_q});
    }
    if (root.has("solver")) cfg.solver = parse_solver(root.at("solver"), "solver");
    if (root.has("verify")) cfg.verify = parse_verify(root.at("verify"), "verify");
    if (root.has("diagnose")) cfg.diagnose = parse_diagnose(root.at("diagnose"), "diagnose");
    if (root.has("curve")) {
        std::filesystem::path p = root.string("curve");
        cfg.curve = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    }
    root.finish();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("config", "cannot open '" + file.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    return parse_run_config(doc, file.parent_path());
}

}  // namespace statgeo
