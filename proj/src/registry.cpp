#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "statgeo/metric_model.hpp"

namespace statgeo {

namespace {

std::vector<std::string> coordinate_names(int d) {
    std::vector<std::string> names;
    for (int i = 1; i <= d; ++i) names.push_back("x" + std::to_string(i));
    return names;
}

class ParamReader {
public:
    ParamReader(const std::string& name, const RegistryParams& params, const RegistryEntry& entry)
        : name_(name), params_(params) {
        for (const auto& [key, value] : params_) {
            bool known = false;
            for (const auto& p : entry.params) known = known || p.name == key;
            if (!known) throw ConfigError("params." + key, "unknown parameter for spacetime '" + name_ + "'");
        }
    }

    double number(const std::string& key, double fallback) const {
        auto it = params_.find(key);
        if (it == params_.end()) return fallback;
        if (const double* v = std::get_if<double>(&it->second)) return *v;
        throw ConfigError("params." + key, "expected a number");
    }

    int integer(const std::string& key, int fallback) const {
        const double v = number(key, fallback);
        if (v != std::floor(v)) throw ConfigError("params." + key, "expected an integer");
        return static_cast<int>(v);
    }

    std::string expr(const std::string& key, const std::string& fallback) const {
        auto it = params_.find(key);
        if (it == params_.end()) return fallback;
        if (const std::string* v = std::get_if<std::string>(&it->second)) return *v;
        if (const double* v = std::get_if<double>(&it->second)) {
            return FieldExpr::constant(*v).serialize();
        }
        return fallback;
    }

private:
    const std::string& name_;
    const RegistryParams& params_;
};

FieldExpr parse_param(const std::string& key, const std::string& text, const std::vector<std::string>& coords) {
    try {
        return FieldExpr::parse(text, coords);
    } catch (const Error& e) {
        throw ConfigError("params." + key, e.what());
    }
}

std::vector<std::vector<FieldExpr>> identity_metric(int d) {
    std::vector<std::vector<FieldExpr>> g(static_cast<std::size_t>(d),
                                          std::vector<FieldExpr>(static_cast<std::size_t>(d)));
    for (int i = 0; i < d; ++i) {
        g[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = FieldExpr::constant(1.0);
    }
    return g;
}

std::vector<FieldExpr> zero_shift(int d) {
    return std::vector<FieldExpr>(static_cast<std::size_t>(d), FieldExpr::constant(0.0));
}

// |x|^2 - r^2 >= 0 over the given coordinates.
FieldExpr outside_ball(const std::vector<std::string>& coords, double radius) {
    std::string text;
    for (const auto& c : coords) text += (text.empty() ? "" : " + ") + c + "^2";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", radius * radius);
    text += std::string(" - ") + buf;
    return FieldExpr::parse(text, coords);
}

StationarySpacetime finish(StationarySpacetime st) {
    st.validate(st.probe_points());
    return st;
}

}  // namespace

const std::vector<RegistryEntry>& registry_entries() {
    static const std::vector<RegistryEntry> entries{
        {"minkowski_static",
         "flat R^d x R: g = I, beta = 1, delta = 0",
         {{"d", "integer", "2", "spatial dimension"}}},
        {"minkowski_skewed",
         "flat L^2 written as dx^2 + 2 f(x) dx dt - dt^2 on R x R",
         {{"delta", "expr", "x1", "shift component f(x1)"}}},
        {"circle_static",
         "S^1 x R (theta period 2 pi) with dtheta^2 + 2 dt dtheta - dt^2",
         {}},
        {"cylinder_static",
         "static cylinder (S^1 x R) x R: g = I, beta = 1, delta = 0; x1 periodic",
         {{"circumference", "number", "6.283185307179586", "period of x1"}}},
        {"excised_disk_static",
         "R^2 minus the open disk |x| < radius, g = I, delta = 0",
         {{"radius", "number", "1", "disk radius"}, {"beta", "expr", "1", "lapse beta(x1, x2)"}}},
        {"radial_static",
         "R^d (optionally minus a ball) with g = I, delta = 0 and a user lapse",
         {{"beta", "expr", "1", "lapse beta(x1..xd)"},
          {"d", "integer", "1", "spatial dimension"},
          {"inner_radius", "number", "0", "excised ball radius (0 = none)"}}},
    };
    return entries;
}

StationarySpacetime registry_get(const std::string& name, const RegistryParams& params) {
    const auto& entries = registry_entries();
    auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.name == name; });
    if (it == entries.end()) throw ConfigError("spacetime.registry", "unknown spacetime '" + name + "'");
    const ParamReader read(name, params, *it);

    if (name == "minkowski_static") {
        const int d = read.integer("d", 2);
        if (d < 1 || d > kMaxSpatialDim) throw ConfigError("params.d", "dimension out of range");
        ChartManifold chart(coordinate_names(d), {}, {}, Vec::Zero(d));
        return finish(StationarySpacetime(std::move(chart), identity_metric(d), FieldExpr::constant(1.0),
                                          zero_shift(d), name));
    }
    if (name == "minkowski_skewed") {
        const auto coords = coordinate_names(1);
        FieldExpr shift = parse_param("delta", read.expr("delta", "x1"), coords);
        ChartManifold chart(coords, {}, {}, Vec::Zero(1));
        return finish(StationarySpacetime(std::move(chart), identity_metric(1), FieldExpr::constant(1.0),
                                          {std::move(shift)}, name));
    }
    if (name == "circle_static") {
        ChartManifold chart(coordinate_names(1), {}, {2.0 * std::numbers::pi}, Vec::Zero(1));
        return finish(StationarySpacetime(std::move(chart), identity_metric(1), FieldExpr::constant(1.0),
                                          {FieldExpr::constant(1.0)}, name));
    }
    if (name == "cylinder_static") {
        const double circumference = read.number("circumference", 2.0 * std::numbers::pi);
        if (!(circumference > 0.0)) throw ConfigError("params.circumference", "must be positive");
        ChartManifold chart(coordinate_names(2), {}, {circumference, std::nullopt}, Vec::Zero(2));
        return finish(StationarySpacetime(std::move(chart), identity_metric(2), FieldExpr::constant(1.0),
                                          zero_shift(2), name));
    }
    if (name == "excised_disk_static") {
        const double radius = read.number("radius", 1.0);
        if (!(radius > 0.0)) throw ConfigError("params.radius", "must be positive");
        const auto coords = coordinate_names(2);
        FieldExpr beta = parse_param("beta", read.expr("beta", "1"), coords);
        Vec base(2);
        base << 2.0 * radius, 0.0;
        ChartManifold chart(coords, {outside_ball(coords, radius)}, {}, base);
        return finish(StationarySpacetime(std::move(chart), identity_metric(2), std::move(beta), zero_shift(2),
                                          name));
    }
    // radial_static
    const int d = read.integer("d", 1);
    if (d < 1 || d > kMaxSpatialDim) throw ConfigError("params.d", "dimension out of range");
    const double inner = read.number("inner_radius", 0.0);
    if (inner < 0.0) throw ConfigError("params.inner_radius", "must be non-negative");
    const auto coords = coordinate_names(d);
    FieldExpr beta = parse_param("beta", read.expr("beta", "1"), coords);
    std::vector<FieldExpr> constraints;
    Vec base = Vec::Zero(d);
    if (inner > 0.0) {
        constraints.push_back(outside_ball(coords, inner));
        base[0] = 2.0 * inner;
    }
    ChartManifold chart(coords, std::move(constraints), {}, base);
    return finish(StationarySpacetime(std::move(chart), identity_metric(d), std::move(beta), zero_shift(d), name));
}

}  // namespace statgeo
