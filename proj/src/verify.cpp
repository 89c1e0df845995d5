#include "statgeo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include <Eigen/Eigenvalues>

namespace statgeo {

namespace {

constexpr int kMaxStepHalvings = 40;

double fd_step(double coordinate) { return 1e-5 * std::max(1.0, std::abs(coordinate)); }

// Central-difference step along axis k that keeps both probes inside.
double inside_step(const ChartManifold& chart, const Vec& x, int k) {
    double h = fd_step(x[k]);
    for (int attempt = 0; attempt <= kMaxStepHalvings; ++attempt, h *= 0.5) {
        Vec up = x;
        Vec down = x;
        up[k] += h;
        down[k] -= h;
        if (chart.contains(up) && chart.contains(down)) return h;
    }
    throw DomainError("metric derivative probe cannot stay inside the domain");
}

// Second difference and averaged velocity of a spacetime polyline at node i.
struct NodeKinematics {
    Vec accel;
    Vec velocity;
};

NodeKinematics kinematics(const ChartManifold& chart, const SpacetimePolyline& z, int i) {
    const int d = z.space.dim();
    const double n = z.segments();
    const Vec back = chart.displacement(z.space.node(i - 1), z.space.node(i));
    const Vec ahead = chart.displacement(z.space.node(i), z.space.node(i + 1));
    const auto t = [&](int k) { return z.time[static_cast<std::size_t>(k)]; };
    NodeKinematics out;
    out.accel.resize(d + 1);
    out.velocity.resize(d + 1);
    out.accel.head(d) = n * n * (ahead - back);
    out.accel[d] = n * n * ((t(i + 1) - t(i)) - (t(i) - t(i - 1)));
    out.velocity.head(d) = 0.5 * n * (ahead + back);
    out.velocity[d] = 0.5 * n * (t(i + 1) - t(i - 1));
    return out;
}

double comparison_norm(const StationarySpacetime& st, const Vec& x, const Vec& r) {
    return std::sqrt(std::max(0.0, r.dot(st.comparison_metric_at(x) * r)));
}

Vec contract(const std::vector<Mat>& gamma, const Vec& v) {
    Vec out(static_cast<Eigen::Index>(gamma.size()));
    for (std::size_t a = 0; a < gamma.size(); ++a) out[static_cast<Eigen::Index>(a)] = v.dot(gamma[a] * v);
    return out;
}

double node_residual(const StationarySpacetime& st, const SpacetimePolyline& z, int i) {
    const Vec x = st.base().wrap(z.space.node(i));
    const NodeKinematics k = kinematics(st.base(), z, i);
    const Vec r = k.accel + contract(christoffel_symbols(st, x), k.velocity);
    return comparison_norm(st, x, r);
}

}  // namespace

std::vector<Mat> christoffel_symbols(const StationarySpacetime& st, const Vec& x) {
    const int d = st.dim();
    const int m = d + 1;
    // Derivatives of L along each spatial axis; the time derivative vanishes.
    std::vector<Mat> dl(static_cast<std::size_t>(m), Mat::Zero(m, m));
    for (int k = 0; k < d; ++k) {
        const double h = inside_step(st.base(), x, k);
        Vec up = x;
        Vec down = x;
        up[k] += h;
        down[k] -= h;
        dl[static_cast<std::size_t>(k)] = (st.lorentz_metric_at(up) - st.lorentz_metric_at(down)) / (up[k] - down[k]);
    }
    const Mat inv = st.lorentz_metric_at(x).inverse();
    std::vector<Mat> gamma(static_cast<std::size_t>(m), Mat::Zero(m, m));
    for (int b = 0; b < m; ++b) {
        for (int c = b; c < m; ++c) {
            Vec lowered(m);
            for (int e = 0; e < m; ++e) {
                lowered[e] = 0.5 * (dl[static_cast<std::size_t>(b)](e, c) + dl[static_cast<std::size_t>(c)](e, b) -
                                    dl[static_cast<std::size_t>(e)](b, c));
            }
            const Vec raised = inv * lowered;
            for (int a = 0; a < m; ++a) {
                gamma[static_cast<std::size_t>(a)](b, c) = raised[a];
                gamma[static_cast<std::size_t>(a)](c, b) = raised[a];
            }
        }
    }
    return gamma;
}

std::vector<double> geodesic_residuals(const StationarySpacetime& st, const SpacetimePolyline& z, bool parallel) {
    const int n = z.segments();
    if (n < 2) throw InvariantViolation("geodesic residual needs at least two segments");
    std::vector<double> out(static_cast<std::size_t>(n - 1), 0.0);
    int failed_node = std::numeric_limits<int>::max();
    std::exception_ptr failure;

#pragma omp parallel for schedule(static) if (parallel)
    for (int i = 1; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i - 1)] = node_residual(st, z, i);
        } catch (...) {
#pragma omp critical(statgeo_residual_failure)
            if (i < failed_node) {
                failed_node = i;
                failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

double geodesic_residual(const StationarySpacetime& st, const SpacetimePolyline& z) {
    const auto r = geodesic_residuals(st, z);
    return *std::max_element(r.begin(), r.end());
}

namespace reference {

// Gamma^a_{bc} v^b v^c assembled one symbol at a time, re-sampling the
// metric for every partial derivative.
std::vector<double> geodesic_residuals(const StationarySpacetime& st, const SpacetimePolyline& z) {
    const int n = z.segments();
    if (n < 2) throw InvariantViolation("geodesic residual needs at least two segments");
    const int d = st.dim();
    const int m = d + 1;
    std::vector<double> out;
    for (int i = 1; i < n; ++i) {
        const Vec x = st.base().wrap(z.space.node(i));
        const NodeKinematics k = kinematics(st.base(), z, i);
        const auto partial = [&](int axis, int row, int col) {
            if (axis == d) return 0.0;
            const double h = inside_step(st.base(), x, axis);
            Vec up = x;
            Vec down = x;
            up[axis] += h;
            down[axis] -= h;
            return (st.lorentz_metric_at(up)(row, col) - st.lorentz_metric_at(down)(row, col)) / (up[axis] - down[axis]);
        };
        const Mat inv = st.lorentz_metric_at(x).inverse();
        Vec r = k.accel;
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) {
                for (int c = 0; c < m; ++c) {
                    double symbol = 0.0;
                    for (int e = 0; e < m; ++e) {
                        symbol += 0.5 * inv(a, e) * (partial(b, e, c) + partial(c, e, b) - partial(e, b, c));
                    }
                    r[a] += symbol * k.velocity[b] * k.velocity[c];
                }
            }
        }
        out.push_back(comparison_norm(st, x, r));
    }
    return out;
}

}  // namespace reference

ConservationDrift conservation_check(const StationarySpacetime& st, const SpacetimePolyline& z) {
    const int n = z.segments();
    if (n < 1) throw InvariantViolation("conservation check needs at least one segment");
    std::vector<double> constraint(static_cast<std::size_t>(n));
    std::vector<double> energy(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Vec tangent = segment_tangent(st.base(), z, i);
        const FieldSample f = st.sample(segment_midpoint(st.base(), z.space, i));
        constraint[static_cast<std::size_t>(i)] = killing_product(f, tangent);
        energy[static_cast<std::size_t>(i)] = tangent.dot(lorentz_matrix(f) * tangent);
    }
    const auto spread = [](const std::vector<double>& v, double& mean) {
        mean = 0.0;
        for (const double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double worst = 0.0;
        for (const double x : v) worst = std::max(worst, std::abs(x - mean));
        return worst;
    };
    ConservationDrift out;
    out.constraint_drift = spread(constraint, out.constraint_mean);
    out.energy_drift = spread(energy, out.energy_mean);
    return out;
}

const char* to_string(CausalVerdict v) {
    switch (v) {
        case CausalVerdict::CausalFuture: return "causal-future";
        case CausalVerdict::CausalPast: return "causal-past";
        case CausalVerdict::NotCausal: return "not-causal";
    }
    return "unknown";
}

CausalCheck causal_curve_check(const StationarySpacetime& st, const SpacetimePolyline& z) {
    const int n = z.segments();
    if (n < 1) throw InvariantViolation("causal check needs at least one segment");
    CausalCheck out;
    for (int i = 0; i < n; ++i) {
        out.segments.push_back(st.classify_tangent(segment_midpoint(st.base(), z.space, i), segment_tangent(st.base(), z, i)));
    }
    // The first segment fixes which time orientation is being tested.
    const auto orientation = out.segments.front().causal() ? out.segments.front().orientation
                                                           : CausalClass::Orientation::Future;
    const double sign = orientation == CausalClass::Orientation::Past ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) {
        const auto& c = out.segments[static_cast<std::size_t>(i)];
        if (out.first_misclassified < 0 && !(c.causal() && c.orientation == orientation)) out.first_misclassified = i;
        const double step = z.time[static_cast<std::size_t>(i) + 1] - z.time[static_cast<std::size_t>(i)];
        if (out.first_nonmonotone < 0 && !(sign * step > 0.0)) out.first_nonmonotone = i;
    }
    if (out.first_misclassified < 0 && out.first_nonmonotone < 0) {
        out.verdict = sign > 0 ? CausalVerdict::CausalFuture : CausalVerdict::CausalPast;
    } else {
        out.verdict = CausalVerdict::NotCausal;
        if (out.first_misclassified < 0) {
            out.offending_segment = out.first_nonmonotone;
        } else if (out.first_nonmonotone < 0) {
            out.offending_segment = out.first_misclassified;
        } else {
            out.offending_segment = std::min(out.first_misclassified, out.first_nonmonotone);
        }
    }
    return out;
}

VerificationReport verify_curve(const StationarySpacetime& st, const SpacetimePolyline& z,
                                const VerifyThresholds& thresholds) {
    VerificationReport out;
    out.max_residual = geodesic_residual(st, z);
    out.drift = conservation_check(st, z);
    out.causal = causal_curve_check(st, z);
    out.passed = out.max_residual <= thresholds.residual && out.drift.constraint_drift <= thresholds.constraint_drift &&
                 out.drift.energy_drift <= thresholds.energy_drift;
    return out;
}

// ---------------------------------------------------------------------------
// Diagnostics

const char* to_string(CompletenessRay::Verdict v) {
    switch (v) {
        case CompletenessRay::Verdict::Diverges: return "diverges";
        case CompletenessRay::Verdict::Converges: return "converges";
        case CompletenessRay::Verdict::Boundary: return "boundary";
    }
    return "unknown";
}

std::vector<Vec> diagnostic_directions(int dim) {
    std::vector<Vec> out;
    for (int k = 0; k < dim; ++k) {
        for (const double s : {1.0, -1.0}) {
            Vec u = Vec::Zero(dim);
            u[k] = s;
            out.push_back(u);
        }
    }
    if (dim >= 2) {
        const Vec diag = Vec::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
        out.push_back(diag);
        out.push_back(-diag);
    }
    return out;
}

namespace {

struct PowerFit {
    double exponent = 0.0;
    int points = 0;
};

// Least-squares slope of log(value) against log(radius), zero values skipped.
PowerFit fit_power(const std::vector<double>& radii, const std::vector<double>& values) {
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (values[i] > 0.0 && std::isfinite(values[i])) {
            lx.push_back(std::log(radii[i]));
            ly.push_back(std::log(values[i]));
        }
    }
    PowerFit fit;
    fit.points = static_cast<int>(lx.size());
    if (lx.size() < 2) return fit;
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(lx.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    fit.exponent = sxx > 0.0 ? sxy / sxx : 0.0;
    return fit;
}

struct FieldNorms {
    double beta;
    double delta;
};

bool sample_norms(const StationarySpacetime& st, const Vec& x, FieldNorms& out) {
    if (!st.base().contains(x)) return false;
    try {
        const FieldSample f = st.sample(x);
        out.beta = f.beta;
        out.delta = std::sqrt(std::max(0.0, f.delta.dot(f.delta_flat)));
    } catch (const DomainError&) {
        return false;
    }
    return std::isfinite(out.beta) && std::isfinite(out.delta);
}

// Gauss-Legendre rule on [-1, 1] via the Golub-Welsch eigenproblem.
struct Quadrature {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

const Quadrature& gauss_legendre() {
    static const Quadrature rule = [] {
        constexpr int m = 8;
        Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(m, m);
        for (int k = 1; k < m; ++k) {
            const double b = k / std::sqrt(4.0 * k * k - 1.0);
            jacobi(k, k - 1) = b;
            jacobi(k - 1, k) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
        Quadrature q;
        q.nodes = eig.eigenvalues();
        q.weights = 2.0 * eig.eigenvectors().row(0).transpose().array().square();
        return q;
    }();
    return rule;
}

// Conformal speed sqrt(g(u, u) / beta) at distance r along the ray, or NaN
// when the point is unusable.
double conformal_speed(const StationarySpacetime& st, const Vec& origin, const Vec& u, double r) {
    const Vec x = origin + r * u;
    if (!st.base().contains(x)) return std::numeric_limits<double>::quiet_NaN();
    try {
        const FieldSample f = st.sample(x);
        const double v = u.dot(f.g * u) / f.beta;
        return f.beta > 0.0 && std::isfinite(v) ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
    } catch (const DomainError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

// Integral over [a, b]; NaN if any quadrature node is unusable.
double shell_length(const StationarySpacetime& st, const Vec& origin, const Vec& u, double a, double b) {
    const Quadrature& q = gauss_legendre();
    double sum = 0.0;
    for (Eigen::Index k = 0; k < q.nodes.size(); ++k) {
        const double r = 0.5 * (a + b) + 0.5 * (b - a) * q.nodes[k];
        sum += q.weights[k] * conformal_speed(st, origin, u, r);
    }
    return 0.5 * (b - a) * sum;
}

CompletenessRay probe_ray(const StationarySpacetime& st, const Vec& u, const CompletenessSpec& spec) {
    const Vec& origin = st.base().base_point();
    CompletenessRay ray;
    ray.direction = u;
    double a = 0.0;
    double b = spec.first_shell;
    while (true) {
        const double shell = std::isfinite(conformal_speed(st, origin, u, b)) ? shell_length(st, origin, u, a, b)
                                                                              : std::numeric_limits<double>::quiet_NaN();
        if (!std::isfinite(shell)) {
            // Locate the exit radius in (a, b] by bisection on usability.
            double lo = a;
            double hi = b;
            for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                (std::isfinite(conformal_speed(st, origin, u, mid)) ? lo : hi) = mid;
            }
            const double tail = lo > a ? shell_length(st, origin, u, a, lo) : 0.0;
            ray.length += std::isfinite(tail) ? tail : 0.0;
            ray.reach = lo;
            ray.verdict = CompletenessRay::Verdict::Boundary;
            return ray;
        }
        ray.length += shell;
        ray.reach = b;
        if (ray.length > spec.cap) {
            ray.verdict = CompletenessRay::Verdict::Diverges;
            return ray;
        }
        if (b >= spec.max_length) {
            ray.verdict = CompletenessRay::Verdict::Converges;
            return ray;
        }
        a = b;
        b = std::min(2.0 * b, spec.max_length);
    }
}

}  // namespace

HyperbolicityDiagnostics growth_bounds(const StationarySpacetime& st, const GrowthSampling& sampling) {
    if (!(sampling.r_min > 0.0 && sampling.r_max > sampling.r_min) || sampling.samples < 4) {
        throw InvariantViolation("growth sampling needs 0 < r_min < r_max and at least 4 radii");
    }
    const int d = st.dim();
    const Vec& origin = st.base().base_point();
    const auto dirs = diagnostic_directions(d);
    const int count = sampling.samples;

    std::vector<double> radii(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
        radii[static_cast<std::size_t>(j)] =
            sampling.r_min * std::pow(sampling.r_max / sampling.r_min, static_cast<double>(j) / (count - 1));
    }
    std::vector<double> beta_max(radii.size(), -1.0);
    std::vector<double> delta_max(radii.size(), -1.0);

    HyperbolicityDiagnostics out;
    for (const Vec& u : dirs) {
        double last = 0.0;
        bool exited = false;
        for (std::size_t j = 0; j < radii.size(); ++j) {
            FieldNorms v{};
            if (!sample_norms(st, origin + radii[j] * u, v)) {
                exited = true;
                break;
            }
            beta_max[j] = std::max(beta_max[j], v.beta);
            delta_max[j] = std::max(delta_max[j], v.delta);
            last = radii[j];
        }
        if (exited) out.exits.push_back(RayExit{u, last});
    }
    out.partial = !out.exits.empty();

    // Outer half of the radii that at least one ray reached.
    std::vector<double> r_fit;
    std::vector<double> b_fit;
    std::vector<double> d_fit;
    for (std::size_t j = static_cast<std::size_t>(count / 2); j < radii.size(); ++j) {
        if (beta_max[j] < 0.0) continue;
        r_fit.push_back(radii[j]);
        b_fit.push_back(beta_max[j]);
        d_fit.push_back(delta_max[j]);
    }
    const PowerFit bf = fit_power(r_fit, b_fit);
    const PowerFit df = fit_power(r_fit, d_fit);
    out.beta_exponent = bf.exponent;
    out.delta_exponent = df.exponent;
    out.beta_fit_points = bf.points;
    out.delta_fit_points = df.points;
    out.quad_ok = out.beta_exponent <= 2.0 + sampling.slack;
    out.linear_ok = out.delta_exponent <= 1.0 + sampling.slack;
    out.static_intent = st.is_static();
    return out;
}

std::vector<CompletenessRay> conformal_completeness_probe(const StationarySpacetime& st, const CompletenessSpec& spec) {
    if (!(spec.first_shell > 0.0 && spec.max_length >= spec.first_shell && spec.cap > 0.0)) {
        throw InvariantViolation("completeness probe needs 0 < first_shell <= max_length and cap > 0");
    }
    std::vector<CompletenessRay> out;
    for (const Vec& u : diagnostic_directions(st.dim())) out.push_back(probe_ray(st, u, spec));
    return out;
}

HyperbolicityDiagnostics diagnose(const StationarySpacetime& st, const GrowthSampling& sampling,
                                  const CompletenessSpec& probe) {
    HyperbolicityDiagnostics out = growth_bounds(st, sampling);
    out.completeness = conformal_completeness_probe(st, probe);
    return out;
}

}  // namespace statgeo
