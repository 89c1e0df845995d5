#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "statgeo/curves.hpp"
#include "statgeo/error.hpp"
#include "statgeo/functional.hpp"

namespace statgeo {

/// How multistart builds its initial curves.
struct SeedSpec {
    int random_count = 2;       // perturbed copies per homotopy class
    int winding_lo = 0;         // extra windings added on every periodic coordinate
    int winding_hi = 0;
    double perturbation = 0.1;  // relative to max(1, chord length)
    std::uint64_t rng_seed = 1;
};

struct SolveConfig {
    int segments = 128;
    int max_iterations = 4000;
    double gradient_tolerance = 1e-8;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 60;
    SeedSpec seeds;
    double dedupe_radius = 1e-3;
    int stall_window = 100;
    double blowup_factor = 50.0;
    double boundary_floor = 1e-3;
    int threads = 0;  // multistart workers; 0 means the OpenMP default

    /// Throws InvariantViolation naming the first bad field.
    void validate() const;
};

enum class SolveStatus { Converged, BoundaryEscape, NormBlowup, Stalled, MaxIters };

const char* to_string(SolveStatus s);

/// One row of the Palais-Smale monitor.
struct TraceRow {
    int iteration = 0;
    double value = 0.0;           // J, accumulated from exact per-step changes
    double gradient_norm = 0.0;
    double h1 = 0.0;              // int g(x', x')
    double boundary_distance = 0.0;
    double max_base_distance = 0.0;  // max chart distance of a node from the base point
};

struct SolveReport {
    SolveStatus status = SolveStatus::MaxIters;
    SpatialPolyline curve;
    double value = 0.0;
    double gradient_norm = 0.0;
    double constraint_constant = 0.0;
    int iterations = 0;
    int seed_index = -1;
    std::string message;
    std::vector<TraceRow> trace;

    double min_boundary_distance() const;
};

class NoFeasibleSeed : public Error {
public:
    using Error::Error;
};

/// Straight seed(s), winding copies, then random perturbations of each class.
/// Seeds that cross the domain boundary are bent away from it; throws
/// NoFeasibleSeed when nothing feasible is left.
std::vector<SpatialPolyline> seed_curves(const ProblemInstance& pi, const SolveConfig& cfg);

/// H^1-preconditioned steepest descent with Armijo backtracking.
SolveReport minimize(const ProblemInstance& pi, const SpatialPolyline& x0, const SolveConfig& cfg);

/// Runs minimize on every seed (in parallel), then lists distinct converged
/// curves sorted by J followed by the remaining reports in seed order.
std::vector<SolveReport> multistart(const ProblemInstance& pi, const SolveConfig& cfg);

/// Dual H^1 norm sqrt(g^T L^{-1} g), L = n * tridiag(-1, 2, -1) per coordinate.
double gradient_dual_norm(const Eigen::MatrixXd& grad, int segments);

}  // namespace statgeo
