#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "statgeo/curves.hpp"
#include "statgeo/metric_model.hpp"

namespace statgeo {

/// Endpoints p = (x_p, t_p), q = (x_q, t_q) in a fixed spacetime.
///
/// `windings` has one entry per coordinate (zero on non-periodic ones) and
/// selects the homotopy class used when seeding: the straight seed runs from
/// x_p to x_q + windings * period in the covering chart.
struct ProblemInstance {
    std::shared_ptr<const StationarySpacetime> spacetime;
    Vec x_p;
    Vec x_q;
    double t_p = 0.0;
    double t_q = 0.0;
    std::vector<int> windings;

    static ProblemInstance make(std::shared_ptr<const StationarySpacetime> st, Vec x_p, double t_p, Vec x_q,
                                double t_q, std::vector<int> windings = {});

    const StationarySpacetime& st() const { return *spacetime; }
    const ChartManifold& chart() const { return spacetime->base(); }
    double dt() const noexcept { return t_q - t_p; }
    /// x_q shifted by the winding offsets.
    Vec lifted_target() const;
    /// Same problem with every time shifted by `shift`.
    ProblemInstance time_shifted(double shift) const;
};

/// Integral pieces of the reduced action and the resulting value.
struct FunctionalBreakdown {
    double kinetic = 0.0;      // 1/2 int g(x', x')
    double mixed = 0.0;        // 1/2 int <delta, x'>^2 / beta
    double drift = 0.0;        // A = int <delta, x'> / beta
    double lapse = 0.0;        // B = int 1 / beta
    double value = 0.0;        // kinetic + mixed - (A - dt)^2 / (2B)
    double constraint_constant = 0.0;  // C_z = (A - dt) / B
};

/// Per-segment contributions (already weighted by 1/n). `stiffness` is a
/// scalar H^1 weight used only by the solver's preconditioner.
struct SegmentTerms {
    double kinetic = 0.0;
    double mixed = 0.0;
    double drift = 0.0;
    double lapse = 0.0;
    double stiffness = 1.0;
};

struct ActionSums {
    double kinetic = 0.0;
    double mixed = 0.0;
    double drift = 0.0;
    double lapse = 0.0;

    ActionSums& operator+=(const SegmentTerms& t) {
        kinetic += t.kinetic;
        mixed += t.mixed;
        drift += t.drift;
        lapse += t.lapse;
        return *this;
    }
    ActionSums& operator-=(const SegmentTerms& t) {
        kinetic -= t.kinetic;
        mixed -= t.mixed;
        drift -= t.drift;
        lapse -= t.lapse;
        return *this;
    }
};

/// Terms of the segment a -> b for an n-segment curve.
SegmentTerms segment_terms(const StationarySpacetime& st, const Vec& a, const Vec& b, int n);
std::vector<SegmentTerms> segment_terms(const ProblemInstance& pi, const SpatialPolyline& x);
/// Sums in fixed (segment) order.
ActionSums sum_terms(const std::vector<SegmentTerms>& terms);

double action_value(const ActionSums& s, double dt);
/// J(s + delta) - J(s), arranged so the result carries relative precision of
/// the change rather than of J itself.
double action_change(const ActionSums& s, const ActionSums& delta, double dt);

/// Throws InvariantViolation when x does not join x_p to x_q (up to wrap).
void require_endpoints(const ProblemInstance& pi, const SpatialPolyline& x);

FunctionalBreakdown reduced_action(const ProblemInstance& pi, const SpatialPolyline& x);
double constraint_constant(const ProblemInstance& pi, const SpatialPolyline& x);

/// Lift t = Psi(x): cumulative midpoint quadrature of (<delta,x'> - C_z)/beta,
/// with t_0 = t_p and t_n = t_q.
SpacetimePolyline time_reconstruction(const ProblemInstance& pi, const SpatialPolyline& x);

/// 1/2 sum_i (1/n) <z'_i, z'_i>_L at segment midpoints.
double full_action(const ProblemInstance& pi, const SpacetimePolyline& z);

struct LightlikeArrival {
    double arrival_time = 0.0;  // T(x)
    SpacetimePolyline curve;    // future lightlike lift starting at (x_p, t_p)
};

/// Throws DegenerateCurve when every segment velocity vanishes.
LightlikeArrival lightlike_arrival(const ProblemInstance& pi, const SpatialPolyline& x);
double arrival_upper_bound(const ProblemInstance& pi, const SpatialPolyline& x);
/// ||x'||^2 - dt (dt - 2A) / B; 2 J(x) is never below it.
double coercivity_lower_bound(const ProblemInstance& pi, const SpatialPolyline& x);

/// Finite-difference gradient of J with respect to interior nodes, d x (n-1).
///
/// Central differences with h = 1e-5 * max(1, |node coordinate|), halved
/// while a probe would leave the domain. Only the two segments adjacent to
/// the probed node are re-evaluated; columns are computed in parallel and
/// each column is independent of thread count.
Eigen::MatrixXd gradient(const ProblemInstance& pi, const SpatialPolyline& x);
Eigen::MatrixXd gradient(const ProblemInstance& pi, const SpatialPolyline& x,
                         const std::vector<SegmentTerms>& terms, bool parallel);

namespace reference {

/// Serial gradient by full re-evaluation of reduced_action at every probe.
Eigen::MatrixXd gradient(const ProblemInstance& pi, const SpatialPolyline& x);

}  // namespace reference

}  // namespace statgeo
