#include "statgeo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <random>

#include <omp.h>

namespace statgeo {

void SolveConfig::validate() const {
    const auto fail = [](const std::string& what) { throw InvariantViolation("solver config: " + what); };
    if (segments < 2) fail("segments must be >= 2");
    if (max_iterations < 0) fail("max_iterations must be >= 0");
    if (!(gradient_tolerance > 0.0)) fail("gradient_tolerance must be > 0");
    if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) fail("armijo_c1 must lie in (0, 1)");
    if (!(backtrack > 0.0 && backtrack < 1.0)) fail("backtrack factor must lie in (0, 1)");
    if (max_backtracks < 1) fail("max_backtracks must be >= 1");
    if (seeds.random_count < 0) fail("seeds.random_count must be >= 0");
    if (seeds.winding_lo > seeds.winding_hi) fail("seeds.winding range is empty");
    if (!(seeds.perturbation >= 0.0)) fail("seeds.perturbation must be >= 0");
    if (!(dedupe_radius > 0.0)) fail("dedupe_radius must be > 0");
    if (stall_window < 1) fail("stall_window must be >= 1");
    if (!(blowup_factor > 1.0)) fail("blowup_factor must be > 1");
    if (!(boundary_floor > 0.0)) fail("boundary_floor must be > 0");
    if (threads < 0) fail("threads must be >= 0");
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::BoundaryEscape: return "boundary_escape";
        case SolveStatus::NormBlowup: return "norm_blowup";
        case SolveStatus::Stalled: return "stalled";
        case SolveStatus::MaxIters: return "max_iters";
    }
    return "unknown";
}

double SolveReport::min_boundary_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& row : trace) best = std::min(best, row.boundary_distance);
    return best;
}

namespace {

// In-place Thomas solve of a symmetric tridiagonal system; `rhs` becomes the
// solution. diag has m entries, off has m - 1.
void solve_tridiagonal(const std::vector<double>& diag, const std::vector<double>& off, double* rhs, int m) {
    std::vector<double> c(static_cast<std::size_t>(m));
    double denom = diag[0];
    c[0] = m > 1 ? off[0] / denom : 0.0;
    rhs[0] /= denom;
    for (int i = 1; i < m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        denom = diag[k] - off[k - 1] * c[k - 1];
        if (i + 1 < m) c[k] = off[k] / denom;
        rhs[i] = (rhs[i] - off[k - 1] * rhs[i - 1]) / denom;
    }
    for (int i = m - 2; i >= 0; --i) rhs[i] -= c[static_cast<std::size_t>(i)] * rhs[i + 1];
}

// Applies the inverse of n * tridiag(-w_{i-1}, w_{i-1} + w_i, -w_i) to every
// coordinate row of `grad`.
Eigen::MatrixXd apply_inverse_stiffness(const Eigen::MatrixXd& grad, const std::vector<double>& weights, int n) {
    const int m = n - 1;
    std::vector<double> diag(static_cast<std::size_t>(m));
    std::vector<double> off(static_cast<std::size_t>(std::max(0, m - 1)));
    for (int i = 0; i < m; ++i) {
        diag[static_cast<std::size_t>(i)] = n * (weights[static_cast<std::size_t>(i)] + weights[static_cast<std::size_t>(i) + 1]);
        if (i + 1 < m) off[static_cast<std::size_t>(i)] = -n * weights[static_cast<std::size_t>(i) + 1];
    }
    Eigen::MatrixXd out = grad;
    std::vector<double> row(static_cast<std::size_t>(m));
    for (Eigen::Index c = 0; c < out.rows(); ++c) {
        for (int i = 0; i < m; ++i) row[static_cast<std::size_t>(i)] = out(c, i);
        solve_tridiagonal(diag, off, row.data(), m);
        for (int i = 0; i < m; ++i) out(c, i) = row[static_cast<std::size_t>(i)];
    }
    return out;
}

struct Evaluation {
    std::vector<SegmentTerms> terms;
    bool ok = false;
};

// Segment terms of x, or ok == false when a node or midpoint is infeasible.
Evaluation try_evaluate(const ProblemInstance& pi, const SpatialPolyline& x) {
    Evaluation e;
    for (int i = 0; i <= x.segments(); ++i) {
        if (!pi.chart().contains(x.node(i))) return e;
    }
    try {
        e.terms = segment_terms(pi, x);
    } catch (const DomainError&) {
        return e;
    }
    for (const auto& t : e.terms) {
        if (!std::isfinite(t.kinetic) || !std::isfinite(t.mixed) || !std::isfinite(t.drift) ||
            !std::isfinite(t.lapse)) {
            return e;
        }
    }
    e.ok = true;
    return e;
}

bool feasible(const ProblemInstance& pi, const SpatialPolyline& x) { return try_evaluate(pi, x).ok; }

double h1_from_terms(const std::vector<SegmentTerms>& terms) {
    double s = 0.0;
    for (const auto& t : terms) s += 2.0 * t.kinetic;
    return s;
}

// Winding offsets over all periodic coordinates, the zero offset first.
std::vector<std::vector<int>> winding_offsets(const ChartManifold& chart, const SeedSpec& spec) {
    std::vector<int> periodic;
    for (int k = 0; k < chart.dim(); ++k) {
        if (chart.periods()[static_cast<std::size_t>(k)]) periodic.push_back(k);
    }
    std::vector<std::vector<int>> out{std::vector<int>(static_cast<std::size_t>(chart.dim()), 0)};
    if (periodic.empty()) return out;
    std::vector<int> cur(periodic.size(), spec.winding_lo);
    while (true) {
        std::vector<int> offset(static_cast<std::size_t>(chart.dim()), 0);
        bool zero = true;
        for (std::size_t j = 0; j < periodic.size(); ++j) {
            offset[static_cast<std::size_t>(periodic[j])] = cur[j];
            zero = zero && cur[j] == 0;
        }
        if (!zero) out.push_back(std::move(offset));
        std::size_t j = periodic.size();
        while (j > 0 && cur[j - 1] == spec.winding_hi) cur[--j] = spec.winding_lo;
        if (j == 0) break;
        ++cur[j - 1];
    }
    return out;
}

// Unit vector orthogonal to the chord, built from the least aligned axis.
Vec bump_direction(const Vec& chord) {
    const int d = static_cast<int>(chord.size());
    Vec dir = Vec::Zero(d);
    const double len = chord.norm();
    if (len == 0.0) {
        dir[d > 1 ? 1 : 0] = 1.0;
        return dir;
    }
    const Vec unit = chord / len;
    Eigen::Index axis = 0;
    unit.cwiseAbs().minCoeff(&axis);
    dir[axis] = 1.0;
    dir -= dir.dot(unit) * unit;
    return dir / dir.norm();
}

SpatialPolyline add_profile(const SpatialPolyline& base, const Vec& first, const Vec& second) {
    Eigen::MatrixXd nodes = base.nodes();
    const int n = base.segments();
    for (int i = 1; i < n; ++i) {
        const double s = base.parameter(i);
        nodes.col(i) += std::sin(std::numbers::pi * s) * first + std::sin(2.0 * std::numbers::pi * s) * second;
    }
    return SpatialPolyline(std::move(nodes));
}

// Infeasible straight seeds become one bent seed per side of the chord.
std::vector<SpatialPolyline> repair(const ProblemInstance& pi, const SpatialPolyline& base) {
    if (feasible(pi, base)) return {base};
    std::vector<SpatialPolyline> out;
    if (base.dim() < 2) return out;
    const Vec chord = base.node(base.segments()) - base.node(0);
    const Vec dir = bump_direction(chord);
    const Vec zero = Vec::Zero(base.dim());
    for (const double side : {1.0, -1.0}) {
        double amplitude = 0.05 * std::max(1.0, chord.norm());
        for (int attempt = 0; attempt < 16; ++attempt, amplitude *= 1.6) {
            SpatialPolyline bent = add_profile(base, side * amplitude * dir, zero);
            if (feasible(pi, bent)) {
                out.push_back(std::move(bent));
                break;
            }
        }
    }
    return out;
}

}  // namespace

double gradient_dual_norm(const Eigen::MatrixXd& grad, int segments) {
    if (grad.cols() == 0) return 0.0;
    const std::vector<double> unit(static_cast<std::size_t>(segments), 1.0);
    const Eigen::MatrixXd solved = apply_inverse_stiffness(grad, unit, segments);
    const double sq = grad.cwiseProduct(solved).sum();
    return sq > 0.0 ? std::sqrt(sq) : (sq == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN());
}

std::vector<SpatialPolyline> seed_curves(const ProblemInstance& pi, const SolveConfig& cfg) {
    cfg.validate();
    const ChartManifold& chart = pi.chart();
    const int n = cfg.segments;
    const Vec target = pi.lifted_target();

    std::vector<SpatialPolyline> classes;
    for (const auto& offset : winding_offsets(chart, cfg.seeds)) {
        Vec end = target;
        for (int k = 0; k < chart.dim(); ++k) {
            if (const auto& p = chart.periods()[static_cast<std::size_t>(k)]) end[k] += offset[static_cast<std::size_t>(k)] * *p;
        }
        for (auto& c : repair(pi, SpatialPolyline::straight(pi.x_p, end, n))) classes.push_back(std::move(c));
    }
    if (classes.empty()) {
        throw NoFeasibleSeed("no feasible seed found: endpoints appear to lie in different domain components");
    }

    std::vector<SpatialPolyline> seeds = classes;
    const auto lo = static_cast<std::uint32_t>(cfg.seeds.rng_seed & 0xffffffffu);
    const auto hi = static_cast<std::uint32_t>(cfg.seeds.rng_seed >> 32);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        std::seed_seq seq{lo, hi, static_cast<std::uint32_t>(c)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        const SpatialPolyline& base = classes[c];
        const double chord = (base.node(n) - base.node(0)).norm();
        for (int r = 0; r < cfg.seeds.random_count; ++r) {
            Vec first(base.dim());
            Vec second(base.dim());
            for (int k = 0; k < base.dim(); ++k) first[k] = unif(rng);
            for (int k = 0; k < base.dim(); ++k) second[k] = 0.5 * unif(rng);
            double scale = cfg.seeds.perturbation * std::max(1.0, chord);
            for (int attempt = 0; attempt < 10 && scale > 0.0; ++attempt, scale *= 0.5) {
                SpatialPolyline candidate = add_profile(base, scale * first, scale * second);
                if (feasible(pi, candidate)) {
                    seeds.push_back(std::move(candidate));
                    break;
                }
            }
        }
    }
    return seeds;
}

SolveReport minimize(const ProblemInstance& pi, const SpatialPolyline& x0, const SolveConfig& cfg) {
    cfg.validate();
    require_endpoints(pi, x0);
    const int n = x0.segments();
    const double dt = pi.dt();
    const ChartManifold& chart = pi.chart();
    const bool parallel_gradient = !omp_in_parallel();

    SolveReport report;
    SpatialPolyline x = x0;
    Evaluation eval = try_evaluate(pi, x);
    if (!eval.ok) throw DomainError("initial curve leaves the domain");
    std::vector<SegmentTerms> terms = std::move(eval.terms);
    ActionSums sums = sum_terms(terms);
    double value = action_value(sums, dt);

    double ref_h1 = std::max(h1_from_terms(terms), 1e-12);
    {
        const Evaluation straight = try_evaluate(pi, SpatialPolyline::straight(x0.node(0), x0.node(n), n));
        if (straight.ok) ref_h1 = std::max(ref_h1, h1_from_terms(straight.terms));
    }

    int below_floor = 0;
    double gnorm = 0.0;
    for (int iter = 0;; ++iter) {
        report.iterations = iter;
        const double h1 = h1_from_terms(terms);
        TraceRow row{iter, value, 0.0, h1, std::numeric_limits<double>::infinity(), 0.0};
        for (int i = 0; i <= n; ++i) {
            const Vec node = x.node(i);
            row.boundary_distance = std::min(row.boundary_distance, chart.boundary_distance(node));
            row.max_base_distance = std::max(row.max_base_distance, chart.chart_distance(node, chart.base_point()));
            // Fields are sampled at segment midpoints, so a chord can graze the
            // boundary while both of its nodes stay clear.
            if (i < n) {
                row.boundary_distance =
                    std::min(row.boundary_distance, chart.boundary_distance(segment_midpoint(chart, x, i)));
            }
        }
        Eigen::MatrixXd grad;
        try {
            grad = gradient(pi, x, terms, parallel_gradient);
        } catch (const DomainError& e) {
            row.gradient_norm = std::numeric_limits<double>::quiet_NaN();
            report.trace.push_back(row);
            report.status = SolveStatus::BoundaryEscape;
            report.message = e.what();
            break;
        }
        gnorm = gradient_dual_norm(grad, n);
        row.gradient_norm = gnorm;
        report.trace.push_back(row);
        if (!std::isfinite(gnorm)) {
            report.status = SolveStatus::Stalled;
            report.message = "gradient is not finite";
            break;
        }

        if (gnorm <= cfg.gradient_tolerance) {
            report.status = SolveStatus::Converged;
            break;
        }
        if (h1 > cfg.blowup_factor * ref_h1) {
            report.status = SolveStatus::NormBlowup;
            report.message = "h1 energy exceeded the blow-up threshold";
            break;
        }
        below_floor = row.boundary_distance < cfg.boundary_floor ? below_floor + 1 : 0;
        if (below_floor >= cfg.stall_window) {
            report.status = SolveStatus::BoundaryEscape;
            report.message = "nodes stayed within the boundary floor for the whole stall window";
            break;
        }
        if (iter >= cfg.stall_window) {
            const double earlier = report.trace[report.trace.size() - 1 - static_cast<std::size_t>(cfg.stall_window)].value;
            if (earlier - value <= 1e-14 * std::max(1.0, std::abs(value))) {
                report.status = SolveStatus::Stalled;
                report.message = "no decrease over the stall window";
                break;
            }
        }
        if (iter >= cfg.max_iterations) {
            report.status = SolveStatus::MaxIters;
            break;
        }

        std::vector<double> weights(terms.size());
        for (std::size_t i = 0; i < terms.size(); ++i) weights[i] = terms[i].stiffness;
        const Eigen::MatrixXd direction = -apply_inverse_stiffness(grad, weights, n);
        const double slope = grad.cwiseProduct(direction).sum();
        if (!(slope < 0.0)) {
            report.status = SolveStatus::Stalled;
            report.message = "preconditioned direction is not a descent direction";
            break;
        }

        bool accepted = false;
        double alpha = 1.0;
        for (int k = 0; k <= cfg.max_backtracks && !accepted; ++k, alpha *= cfg.backtrack) {
            SpatialPolyline trial = x;
            trial.mutable_nodes().middleCols(1, n - 1) += alpha * direction;
            Evaluation next = try_evaluate(pi, trial);
            if (!next.ok) continue;
            ActionSums change;
            for (std::size_t i = 0; i < terms.size(); ++i) {
                change.kinetic += next.terms[i].kinetic - terms[i].kinetic;
                change.mixed += next.terms[i].mixed - terms[i].mixed;
                change.drift += next.terms[i].drift - terms[i].drift;
                change.lapse += next.terms[i].lapse - terms[i].lapse;
            }
            const double dj = action_change(sums, change, dt);
            if (std::isfinite(dj) && dj <= cfg.armijo_c1 * alpha * slope) {
                x = std::move(trial);
                terms = std::move(next.terms);
                sums = sum_terms(terms);
                value += dj;
                accepted = true;
            }
        }
        if (!accepted) {
            if (row.boundary_distance < cfg.boundary_floor) {
                report.status = SolveStatus::BoundaryEscape;
                report.message = "line search blocked at the domain boundary";
            } else {
                report.status = SolveStatus::Stalled;
                report.message = "line search failed";
            }
            break;
        }
    }

    report.curve = x;
    const FunctionalBreakdown b = reduced_action(pi, x);
    report.value = b.value;
    report.constraint_constant = b.constraint_constant;
    report.gradient_norm = gnorm;
    return report;
}

std::vector<SolveReport> multistart(const ProblemInstance& pi, const SolveConfig& cfg) {
    const std::vector<SpatialPolyline> seeds = seed_curves(pi, cfg);
    const int count = static_cast<int>(seeds.size());
    std::vector<SolveReport> runs(seeds.size());
    std::vector<std::exception_ptr> errors(seeds.size());
    const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (int i = 0; i < count; ++i) {
        try {
            runs[static_cast<std::size_t>(i)] = minimize(pi, seeds[static_cast<std::size_t>(i)], cfg);
            runs[static_cast<std::size_t>(i)].seed_index = i;
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::vector<std::size_t> converged;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (runs[i].status == SolveStatus::Converged) converged.push_back(i);
    }
    std::stable_sort(converged.begin(), converged.end(),
                     [&](std::size_t a, std::size_t b) { return runs[a].value < runs[b].value; });

    std::vector<SolveReport> out;
    for (const std::size_t i : converged) {
        const bool duplicate = std::any_of(out.begin(), out.end(), [&](const SolveReport& kept) {
            return curve_distance(pi.chart(), kept.curve, runs[i].curve) <= cfg.dedupe_radius;
        });
        if (!duplicate) out.push_back(std::move(runs[i]));
    }
    for (auto& r : runs) {
        if (r.status != SolveStatus::Converged) out.push_back(std::move(r));
    }
    return out;
}

}  // namespace statgeo
