#include "statgeo/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace statgeo {

using json = nlohmann::json;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(finite_or_null(v[i]));
    return a;
}

json to_json(const FunctionalBreakdown& b) {
    return {{"kinetic", finite_or_null(b.kinetic)},
            {"mixed", finite_or_null(b.mixed)},
            {"drift", finite_or_null(b.drift)},
            {"lapse", finite_or_null(b.lapse)},
            {"value", finite_or_null(b.value)},
            {"constraint_constant", finite_or_null(b.constraint_constant)}};
}

json to_json(const SolveReport& r) {
    double max_h1 = 0.0;
    double max_base = 0.0;
    for (const auto& row : r.trace) {
        max_h1 = std::max(max_h1, row.h1);
        max_base = std::max(max_base, row.max_base_distance);
    }
    json out = {{"status", to_string(r.status)},
                {"seed_index", r.seed_index},
                {"value", finite_or_null(r.value)},
                {"gradient_norm", finite_or_null(r.gradient_norm)},
                {"constraint_constant", finite_or_null(r.constraint_constant)},
                {"iterations", r.iterations},
                {"segments", r.curve.segments()},
                {"message", r.message}};
    out["monitor"] = {{"initial_h1", r.trace.empty() ? json(nullptr) : finite_or_null(r.trace.front().h1)},
                      {"final_h1", r.trace.empty() ? json(nullptr) : finite_or_null(r.trace.back().h1)},
                      {"max_h1", finite_or_null(max_h1)},
                      {"min_boundary_distance", finite_or_null(r.min_boundary_distance())},
                      {"max_base_distance", finite_or_null(max_base)}};
    return out;
}

json to_json(const ConservationDrift& d) {
    return {{"constraint_drift", finite_or_null(d.constraint_drift)},
            {"energy_drift", finite_or_null(d.energy_drift)},
            {"constraint_mean", finite_or_null(d.constraint_mean)},
            {"energy_mean", finite_or_null(d.energy_mean)}};
}

json to_json(const CausalCheck& c) {
    const auto index = [](int i) { return i < 0 ? json(nullptr) : json(i); };
    json classes = json::array();
    for (const auto& s : c.segments) classes.push_back(std::string(to_string(s.character)) + "/" + to_string(s.orientation));
    return {{"verdict", to_string(c.verdict)},
            {"offending_segment", index(c.offending_segment)},
            {"first_misclassified", index(c.first_misclassified)},
            {"first_nonmonotone", index(c.first_nonmonotone)},
            {"method", "per-segment classification plus strict monotonicity of t"},
            {"segments", classes}};
}

json to_json(const VerificationReport& r, const VerifyThresholds& thresholds) {
    return {{"passed", r.passed},
            {"max_residual", finite_or_null(r.max_residual)},
            {"residual_norm", "comparison metric"},
            {"drift", to_json(r.drift)},
            {"causal", to_json(r.causal)},
            {"thresholds",
             {{"residual", thresholds.residual},
              {"constraint_drift", thresholds.constraint_drift},
              {"energy_drift", thresholds.energy_drift}}}};
}

json to_json(const HyperbolicityDiagnostics& d) {
    json exits = json::array();
    for (const auto& e : d.exits) exits.push_back({{"direction", to_json(e.direction)}, {"last_radius", e.last_radius}});
    json rays = json::array();
    for (const auto& c : d.completeness) {
        rays.push_back({{"direction", to_json(c.direction)},
                        {"verdict", to_string(c.verdict)},
                        {"length", finite_or_null(c.length)},
                        {"reach", finite_or_null(c.reach)}});
    }
    return {{"beta_exponent", finite_or_null(d.beta_exponent)},
            {"delta_exponent", finite_or_null(d.delta_exponent)},
            {"beta_fit_points", d.beta_fit_points},
            {"delta_fit_points", d.delta_fit_points},
            {"quad_ok", d.quad_ok},
            {"linear_ok", d.linear_ok},
            {"partial_fit", d.partial},
            {"ray_exits", exits},
            {"completeness", rays},
            {"static_intent", d.static_intent},
            {"distance_proxy", d.distance_proxy}};
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
    out << "iteration,J,gradnorm,h1,boundary_dist\n";
    char buf[160];
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", r.iteration, r.value, r.gradient_norm, r.h1,
                      r.boundary_distance);
        out << buf;
    }
}

void write_causal_csv(std::ostream& out, const CausalCheck& c) {
    out << "segment,character,orientation\n";
    for (std::size_t i = 0; i < c.segments.size(); ++i) {
        out << i << ',' << to_string(c.segments[i].character) << ',' << to_string(c.segments[i].orientation) << '\n';
    }
}

}  // namespace statgeo
