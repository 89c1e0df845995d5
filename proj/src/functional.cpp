#include "statgeo/functional.hpp"

#include <cmath>

namespace statgeo {

ProblemInstance ProblemInstance::make(std::shared_ptr<const StationarySpacetime> st, Vec x_p, double t_p,
                                      Vec x_q, double t_q, std::vector<int> windings) {
    if (!st) throw InvariantViolation("problem instance needs a spacetime");
    const int d = st->dim();
    if (x_p.size() != d || x_q.size() != d) throw InvariantViolation("endpoint dimension does not match the chart");
    if (!std::isfinite(t_p) || !std::isfinite(t_q)) throw InvariantViolation("endpoint times must be finite");
    st->base().require_inside(x_p);
    st->base().require_inside(x_q);
    if (windings.empty()) windings.assign(static_cast<std::size_t>(d), 0);
    if (static_cast<int>(windings.size()) != d) throw InvariantViolation("one winding entry per coordinate");
    for (int k = 0; k < d; ++k) {
        if (windings[static_cast<std::size_t>(k)] != 0 && !st->base().periods()[static_cast<std::size_t>(k)]) {
            throw InvariantViolation("winding given for non-periodic coordinate " + std::to_string(k + 1));
        }
    }
    ProblemInstance pi;
    pi.spacetime = std::move(st);
    pi.x_p = std::move(x_p);
    pi.x_q = std::move(x_q);
    pi.t_p = t_p;
    pi.t_q = t_q;
    pi.windings = std::move(windings);
    return pi;
}

Vec ProblemInstance::lifted_target() const {
    // Straight line in the covering chart: minimal-image offset plus windings.
    Vec target = x_p + chart().displacement(x_p, x_q);
    for (int k = 0; k < target.size(); ++k) {
        if (const auto& p = chart().periods()[static_cast<std::size_t>(k)]) {
            target[k] += windings[static_cast<std::size_t>(k)] * *p;
        }
    }
    return target;
}

ProblemInstance ProblemInstance::time_shifted(double shift) const {
    ProblemInstance out = *this;
    out.t_p += shift;
    out.t_q += shift;
    return out;
}

// ---------------------------------------------------------------------------

SegmentTerms segment_terms(const StationarySpacetime& st, const Vec& a, const Vec& b, int n) {
    const Vec step = st.base().displacement(a, b);
    const Vec v = static_cast<double>(n) * step;
    const FieldSample f = st.sample(a + 0.5 * step);
    const double inv_n = 1.0 / n;
    const double gvv = v.dot(f.g * v);
    const double av = f.delta_flat.dot(v);
    SegmentTerms t;
    t.kinetic = 0.5 * gvv * inv_n;
    t.mixed = 0.5 * av * av / f.beta * inv_n;
    t.drift = av / f.beta * inv_n;
    t.lapse = inv_n / f.beta;
    t.stiffness = (f.g.trace() + f.delta_flat.squaredNorm() / f.beta) / static_cast<double>(f.g.rows());
    return t;
}

std::vector<SegmentTerms> segment_terms(const ProblemInstance& pi, const SpatialPolyline& x) {
    const int n = x.segments();
    std::vector<SegmentTerms> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = segment_terms(pi.st(), x.node(i), x.node(i + 1), n);
    return out;
}

ActionSums sum_terms(const std::vector<SegmentTerms>& terms) {
    ActionSums s;
    for (const auto& t : terms) s += t;
    return s;
}

double action_value(const ActionSums& s, double dt) {
    const double u = s.drift - dt;
    return s.kinetic + s.mixed - 0.5 * u * u / s.lapse;
}

double action_change(const ActionSums& s, const ActionSums& delta, double dt) {
    // u'^2/B' - u^2/B = (2 u dA B + dA^2 B - u^2 dB) / (B B')
    const double u = s.drift - dt;
    const double b = s.lapse;
    const double b_new = s.lapse + delta.lapse;
    const double da = delta.drift;
    const double last = (2.0 * u * da * b + da * da * b - u * u * delta.lapse) / (b * b_new);
    return delta.kinetic + delta.mixed - 0.5 * last;
}

void require_endpoints(const ProblemInstance& pi, const SpatialPolyline& x) {
    if (x.dim() != pi.st().dim()) throw InvariantViolation("curve dimension does not match the chart");
    const auto tol = [](const Vec& p) { return 1e-9 * std::max(1.0, p.cwiseAbs().maxCoeff()); };
    if (pi.chart().chart_distance(x.node(0), pi.x_p) > tol(pi.x_p)) {
        throw InvariantViolation("curve does not start at x_p");
    }
    if (pi.chart().chart_distance(x.node(x.segments()), pi.x_q) > tol(pi.x_q)) {
        throw InvariantViolation("curve does not end at x_q");
    }
}

FunctionalBreakdown reduced_action(const ProblemInstance& pi, const SpatialPolyline& x) {
    require_endpoints(pi, x);
    const ActionSums s = sum_terms(segment_terms(pi, x));
    FunctionalBreakdown out;
    out.kinetic = s.kinetic;
    out.mixed = s.mixed;
    out.drift = s.drift;
    out.lapse = s.lapse;
    out.value = action_value(s, pi.dt());
    out.constraint_constant = (s.drift - pi.dt()) / s.lapse;
    return out;
}

double constraint_constant(const ProblemInstance& pi, const SpatialPolyline& x) {
    return reduced_action(pi, x).constraint_constant;
}

SpacetimePolyline time_reconstruction(const ProblemInstance& pi, const SpatialPolyline& x) {
    require_endpoints(pi, x);
    const auto terms = segment_terms(pi, x);
    const ActionSums s = sum_terms(terms);
    const double c = (s.drift - pi.dt()) / s.lapse;
    SpacetimePolyline z;
    z.space = x;
    z.time.resize(terms.size() + 1);
    z.time[0] = pi.t_p;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        z.time[i + 1] = z.time[i] + (terms[i].drift - c * terms[i].lapse);
    }
    // The increments telescope to dt; pin the last node against roundoff.
    z.time.back() = pi.t_q;
    return z;
}

double full_action(const ProblemInstance& pi, const SpacetimePolyline& z) {
    require_endpoints(pi, z.space);
    const double tol = 1e-9 * std::max({1.0, std::abs(pi.t_p), std::abs(pi.t_q)});
    if (std::abs(z.time.front() - pi.t_p) > tol || std::abs(z.time.back() - pi.t_q) > tol) {
        throw InvariantViolation("spacetime curve does not join t_p to t_q");
    }
    const int n = z.segments();
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec tangent = segment_tangent(pi.chart(), z, i);
        const FieldSample f = pi.st().sample(segment_midpoint(pi.chart(), z.space, i));
        sum += tangent.dot(lorentz_matrix(f) * tangent);
    }
    return 0.5 * sum / n;
}

LightlikeArrival lightlike_arrival(const ProblemInstance& pi, const SpatialPolyline& x) {
    require_endpoints(pi, x);
    const int n = x.segments();
    LightlikeArrival out;
    out.curve.space = x;
    out.curve.time.resize(static_cast<std::size_t>(n) + 1);
    out.curve.time[0] = pi.t_p;
    bool moving = false;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec v = segment_velocity(pi.chart(), x, i);
        moving = moving || !v.isZero(0.0);
        const FieldSample f = pi.st().sample(segment_midpoint(pi.chart(), x, i));
        const double a = f.delta_flat.dot(v);
        const double rate = (a + std::sqrt(a * a + v.dot(f.g * v) * f.beta)) / f.beta;
        total += rate;
        out.curve.time[static_cast<std::size_t>(i) + 1] = out.curve.time[static_cast<std::size_t>(i)] + rate / n;
    }
    if (!moving) {
        throw DegenerateCurve("lightlike lift needs a non-constant spatial path (x_p = x_q with a constant curve)");
    }
    out.arrival_time = total / n;
    return out;
}

double arrival_upper_bound(const ProblemInstance& pi, const SpatialPolyline& x) {
    const FunctionalBreakdown b = reduced_action(pi, x);
    if (b.kinetic == 0.0) {
        throw DegenerateCurve("arrival bound needs a non-constant spatial path (x_p = x_q with a constant curve)");
    }
    return b.drift + std::sqrt((2.0 * b.mixed + 2.0 * b.kinetic) * b.lapse);
}

double coercivity_lower_bound(const ProblemInstance& pi, const SpatialPolyline& x) {
    const FunctionalBreakdown b = reduced_action(pi, x);
    const double dt = pi.dt();
    return 2.0 * b.kinetic - dt * (dt - 2.0 * b.drift) / b.lapse;
}

}  // namespace statgeo
