#pragma once

#include <string>
#include <vector>

#include "statgeo/curves.hpp"
#include "statgeo/metric_model.hpp"

namespace statgeo {

/// Per-interior-node residual of the geodesic equation,
/// n^2 (z_{i+1} - 2 z_i + z_{i-1}) + Gamma(z_i)(v_i, v_i), measured in the
/// comparison metric at z_i. Entry k belongs to node k + 1.
///
/// Christoffel symbols come from central differences of the Lorentz metric
/// (step 1e-5 * max(1, |x_k|), shrunk near the boundary), so the check does
/// not share code with the reduced functional.
std::vector<double> geodesic_residuals(const StationarySpacetime& st, const SpacetimePolyline& z, bool parallel = true);
double geodesic_residual(const StationarySpacetime& st, const SpacetimePolyline& z);

namespace reference {
/// Serial version of geodesic_residuals without metric caching.
std::vector<double> geodesic_residuals(const StationarySpacetime& st, const SpacetimePolyline& z);
}  // namespace reference

/// Christoffel symbols Gamma^a_{bc} at spatial point x, stored as
/// gamma[a](b, c) over the (d+1) spacetime indices.
std::vector<Mat> christoffel_symbols(const StationarySpacetime& st, const Vec& x);

struct ConservationDrift {
    double constraint_drift = 0.0;  // max |<z'_i, K> - mean|
    double energy_drift = 0.0;      // max |<z'_i, z'_i> - mean|
    double constraint_mean = 0.0;
    double energy_mean = 0.0;
};

ConservationDrift conservation_check(const StationarySpacetime& st, const SpacetimePolyline& z);

enum class CausalVerdict { CausalFuture, CausalPast, NotCausal };
const char* to_string(CausalVerdict v);

/// Discrete causal-curve test: for polylines it reduces exactly to
/// per-segment classification plus strict monotonicity of t.
struct CausalCheck {
    CausalVerdict verdict = CausalVerdict::NotCausal;
    int offending_segment = -1;  // first segment breaking the tested orientation
    int first_misclassified = -1;
    int first_nonmonotone = -1;   // first segment whose t step has the wrong sign or is zero
    std::vector<CausalClass> segments;
};

CausalCheck causal_curve_check(const StationarySpacetime& st, const SpacetimePolyline& z);

struct VerifyThresholds {
    double residual = 1e-3;
    double constraint_drift = 1e-8;
    double energy_drift = 1e-5;
};

struct VerificationReport {
    double max_residual = 0.0;
    ConservationDrift drift;
    CausalCheck causal;
    bool passed = false;
};

VerificationReport verify_curve(const StationarySpacetime& st, const SpacetimePolyline& z,
                                const VerifyThresholds& thresholds);

// ---------------------------------------------------------------------------
// Global hyperbolicity diagnostics

struct GrowthSampling {
    double r_min = 1.0;
    double r_max = 16.0;
    int samples = 32;     // radii, geometrically spaced
    double slack = 0.1;
};

struct RayExit {
    Vec direction;
    double last_radius = 0.0;  // largest sampled radius still inside the domain
};

struct CompletenessRay {
    enum class Verdict { Diverges, Converges, Boundary };
    Vec direction;
    Verdict verdict = Verdict::Diverges;
    double length = 0.0;  // accumulated conformal length
    double reach = 0.0;   // chart distance covered along the ray
};

const char* to_string(CompletenessRay::Verdict v);

struct CompletenessSpec {
    double first_shell = 1.0;
    double max_length = 1e6;  // chart truncation radius
    double cap = 1e3;         // conformal length that counts as divergence
};

struct HyperbolicityDiagnostics {
    double beta_exponent = 0.0;
    double delta_exponent = 0.0;
    int beta_fit_points = 0;
    int delta_fit_points = 0;
    bool quad_ok = false;    // beta grows at most quadratically
    bool linear_ok = false;  // |delta| grows at most linearly
    bool partial = false;    // some ray left the domain
    std::vector<RayExit> exits;
    std::vector<CompletenessRay> completeness;
    bool static_intent = true;
    std::string distance_proxy = "chart ray length";
};

/// Default rays from the base point: +-axes, and +-(1,..,1)/sqrt(d) for d >= 2.
std::vector<Vec> diagnostic_directions(int dim);

HyperbolicityDiagnostics growth_bounds(const StationarySpacetime& st, const GrowthSampling& sampling);

std::vector<CompletenessRay> conformal_completeness_probe(const StationarySpacetime& st, const CompletenessSpec& spec);

/// growth_bounds plus the completeness probe.
HyperbolicityDiagnostics diagnose(const StationarySpacetime& st, const GrowthSampling& sampling,
                                  const CompletenessSpec& probe);

}  // namespace statgeo
