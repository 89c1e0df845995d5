#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "statgeo/metric_model.hpp"

namespace statgeo {

/// Uniform-parameter polyline x_0..x_n in chart coordinates, s_i = i/n.
///
/// Nodes are stored unwrapped (a lift to the covering chart), so a curve that
/// winds around a periodic coordinate keeps monotone node values. All
/// differences go through ChartManifold::displacement regardless.
class SpatialPolyline {
public:
    SpatialPolyline() = default;
    /// `nodes` is d x (n+1); n >= 1.
    explicit SpatialPolyline(Eigen::MatrixXd nodes);

    static SpatialPolyline straight(const Vec& from, const Vec& to, int segments);

    int dim() const noexcept { return static_cast<int>(nodes_.rows()); }
    int segments() const noexcept { return static_cast<int>(nodes_.cols()) - 1; }
    Vec node(int i) const { return nodes_.col(i); }
    const Eigen::MatrixXd& nodes() const noexcept { return nodes_; }
    Eigen::MatrixXd& mutable_nodes() noexcept { return nodes_; }
    double parameter(int i) const { return static_cast<double>(i) / segments(); }

private:
    Eigen::MatrixXd nodes_;
};

/// Polyline in spacetime: spatial nodes plus one time value per node.
struct SpacetimePolyline {
    SpatialPolyline space;
    std::vector<double> time;

    int segments() const noexcept { return space.segments(); }
    /// Spacetime node (x_i, t_i) as a (d+1)-vector.
    Vec node(int i) const;
};

/// n * (x_{i+1} - x_i) with minimal image on periodic coordinates.
Vec segment_velocity(const ChartManifold& chart, const SpatialPolyline& c, int i);
/// x_i + (x_{i+1} - x_i) / 2, same convention.
Vec segment_midpoint(const ChartManifold& chart, const SpatialPolyline& c, int i);
/// Segment tangent n * (z_{i+1} - z_i) of a spacetime polyline.
Vec segment_tangent(const ChartManifold& chart, const SpacetimePolyline& z, int i);

/// Midpoint rule for integral_0^1 g(x')(x', x') ds.
double h1_energy(const StationarySpacetime& st, const SpatialPolyline& c);

enum class Integrand {
    DeltaDotOverBeta,    // <delta, x'> / beta
    DeltaDotSqOverBeta,  // <delta, x'>^2 / beta
    OneOverBeta,         // 1 / beta
    RiemannLength,       // sqrt(g(x', x'))
};

double integrate_along(const StationarySpacetime& st, const SpatialPolyline& c, Integrand kind);

/// Max over nodes of the chart distance (minimal image); curves must share n.
double curve_distance(const ChartManifold& chart, const SpatialPolyline& a, const SpatialPolyline& b);

/// Piecewise-linear reparameterisation onto m uniform segments.
SpatialPolyline resample(const ChartManifold& chart, const SpatialPolyline& c, int m);

/// Reversed node order (s -> 1 - s).
SpatialPolyline reversed(const SpatialPolyline& c);

// CSV dumps: header `s,<coord names>[,t]`, one row per node.
void write_curve_csv(std::ostream& out, const std::vector<std::string>& coords, const SpatialPolyline& c);
void write_curve_csv(std::ostream& out, const std::vector<std::string>& coords, const SpacetimePolyline& z);

struct CurveCsv {
    SpatialPolyline space;
    std::vector<double> time;  // empty when the file has no t column
    bool has_time() const noexcept { return !time.empty(); }
};

/// Parses a curve dump; the column schema must match `coords` (the t column
/// is optional). Throws ConfigError with the offending line on mismatch.
CurveCsv read_curve_csv(std::istream& in, const std::vector<std::string>& coords);

}  // namespace statgeo
