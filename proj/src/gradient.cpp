#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "statgeo/functional.hpp"

namespace statgeo {

namespace {

constexpr int kMaxStepHalvings = 40;

double initial_step(double coordinate) { return 1e-5 * std::max(1.0, std::abs(coordinate)); }

// Fourth-order central stencil. The second-order one leaves a truncation
// error of order n * h^2 per node, which dominates the dual gradient norm on
// fine curves long before the solver tolerance is reached.
constexpr double kStencil[4] = {-2.0, -1.0, 1.0, 2.0};

double combine(const double (&f)[4], double h) { return (8.0 * (f[2] - f[1]) - (f[3] - f[0])) / (12.0 * h); }

ActionSums local_delta(const SegmentTerms& left, const SegmentTerms& right, const SegmentTerms& old_left,
                       const SegmentTerms& old_right) {
    ActionSums d;
    d.kinetic = (left.kinetic - old_left.kinetic) + (right.kinetic - old_right.kinetic);
    d.mixed = (left.mixed - old_left.mixed) + (right.mixed - old_right.mixed);
    d.drift = (left.drift - old_left.drift) + (right.drift - old_right.drift);
    d.lapse = (left.lapse - old_left.lapse) + (right.lapse - old_right.lapse);
    return d;
}

// Step that keeps every stencil probe of `value` representable and inside the
// domain; `usable(p)` decides membership. Returns 0 when none is found.
template <class Usable>
double probe_step(double value, Usable&& usable, int& attempts) {
    double h = initial_step(value) * std::ldexp(1.0, -attempts);
    for (; attempts <= kMaxStepHalvings; ++attempts, h *= 0.5) {
        if (!(value + h > value)) return 0.0;
        bool ok = true;
        for (const double k : kStencil) ok = ok && usable(value + k * h);
        if (ok) return h;
    }
    return 0.0;
}

// Partial derivative of J in coordinate c of node j, touching only the two
// segments that share the node.
double local_partial(const ProblemInstance& pi, const SpatialPolyline& x, const std::vector<SegmentTerms>& terms,
                     const ActionSums& sums, int j, int c) {
    const int n = x.segments();
    const Vec prev = x.node(j - 1);
    const Vec cur = x.node(j);
    const Vec next = x.node(j + 1);
    const auto& old_left = terms[static_cast<std::size_t>(j) - 1];
    const auto& old_right = terms[static_cast<std::size_t>(j)];
    const auto inside = [&](double v) {
        Vec p = cur;
        p[c] = v;
        return pi.chart().contains(p);
    };

    for (int attempts = 0; attempts <= kMaxStepHalvings; ++attempts) {
        const double h = probe_step(cur[c], inside, attempts);
        if (h == 0.0) break;
        try {
            double f[4];
            for (int k = 0; k < 4; ++k) {
                Vec p = cur;
                p[c] += kStencil[k] * h;
                f[k] = action_change(sums,
                                     local_delta(segment_terms(pi.st(), prev, p, n), segment_terms(pi.st(), p, next, n),
                                                 old_left, old_right),
                                     pi.dt());
            }
            const double partial = combine(f, h);
            if (std::isfinite(partial)) return partial;
        } catch (const DomainError&) {
            // A midpoint left the domain between the probes; retry with a smaller step.
        }
    }
    throw DomainError("gradient probe at node " + std::to_string(j) + " cannot stay inside the domain");
}

}  // namespace

Eigen::MatrixXd gradient(const ProblemInstance& pi, const SpatialPolyline& x, const std::vector<SegmentTerms>& terms,
                         bool parallel) {
    const int n = x.segments();
    const int d = x.dim();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, std::max(0, n - 1));
    if (n < 2) return out;
    const ActionSums sums = sum_terms(terms);

    // Exceptions may not cross the parallel region; keep the one from the
    // lowest node so the reported error does not depend on scheduling.
    int failed_node = std::numeric_limits<int>::max();
    std::exception_ptr failure;

#pragma omp parallel for schedule(static) if (parallel)
    for (int j = 1; j < n; ++j) {
        try {
            for (int c = 0; c < d; ++c) out(c, j - 1) = local_partial(pi, x, terms, sums, j, c);
        } catch (...) {
#pragma omp critical(statgeo_gradient_failure)
            if (j < failed_node) {
                failed_node = j;
                failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

Eigen::MatrixXd gradient(const ProblemInstance& pi, const SpatialPolyline& x) {
    require_endpoints(pi, x);
    return gradient(pi, x, segment_terms(pi, x), true);
}

namespace reference {

Eigen::MatrixXd gradient(const ProblemInstance& pi, const SpatialPolyline& x) {
    require_endpoints(pi, x);
    const int n = x.segments();
    const int d = x.dim();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, std::max(0, n - 1));
    SpatialPolyline probe = x;
    for (int j = 1; j < n; ++j) {
        for (int c = 0; c < d; ++c) {
            const double base = x.nodes()(c, j);
            const auto inside = [&](double v) {
                probe.mutable_nodes()(c, j) = v;
                return pi.chart().contains(probe.node(j));
            };
            bool done = false;
            for (int attempts = 0; attempts <= kMaxStepHalvings && !done; ++attempts) {
                const double h = probe_step(base, inside, attempts);
                if (h == 0.0) break;
                try {
                    double f[4];
                    for (int k = 0; k < 4; ++k) {
                        probe.mutable_nodes()(c, j) = base + kStencil[k] * h;
                        f[k] = reduced_action(pi, probe).value;
                    }
                    out(c, j - 1) = combine(f, h);
                    done = std::isfinite(out(c, j - 1));
                } catch (const DomainError&) {
                }
            }
            probe.mutable_nodes()(c, j) = base;
            if (!done) throw DomainError("gradient probe at node " + std::to_string(j) + " cannot stay inside the domain");
        }
    }
    return out;
}

}  // namespace reference

}  // namespace statgeo
