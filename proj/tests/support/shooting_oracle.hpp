#pragma once

#include <array>
#include <functional>
#include <vector>

namespace statgeo::testing {

/// State of a spacetime geodesic with one spatial coordinate: (x, t, x', t').
using GeodesicState = std::array<double, 4>;

/// Right-hand side of the geodesic ODE, written out by hand for the test.
using GeodesicRhs = std::function<GeodesicState(const GeodesicState&)>;

/// Geodesic equations of dx^2 + 2 x dx dt - dt^2:
///   x'' = -x x'^2 / (1 + x^2),   t'' = x'^2 / (1 + x^2).
GeodesicState skewed_rhs(const GeodesicState& s);

/// Classical RK4 on s in [0, 1]; returns `samples + 1` states at s = i / samples,
/// taking `substeps` RK4 steps between consecutive samples.
std::vector<GeodesicState> integrate_rk4(const GeodesicRhs& rhs, const GeodesicState& start, int samples,
                                         int substeps);

struct ShootingResult {
    std::vector<GeodesicState> path;  // sampled at s = i / samples
    double miss = 0.0;                // endpoint error after Newton
    int iterations = 0;
};

/// Newton shooting on the initial velocities so that (x, t)(1) = (x1, t1).
ShootingResult shoot(const GeodesicRhs& rhs, double x0, double t0, double x1, double t1, int samples,
                     int substeps = 16);

}  // namespace statgeo::testing
