#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "statgeo/field_expr.hpp"
#include "statgeo/types.hpp"

namespace statgeo {

/// Single-chart base manifold. Membership is the conjunction of the
/// constraints c_k(x) >= 0; periodic coordinates model S^1 factors and are
/// reduced into [0, period) before any field is evaluated.
class ChartManifold {
public:
    ChartManifold(std::vector<std::string> coords, std::vector<FieldExpr> constraints,
                  std::vector<std::optional<double>> periods, Vec base_point);

    int dim() const noexcept { return static_cast<int>(coords_.size()); }
    const std::vector<std::string>& coords() const noexcept { return coords_; }
    const std::vector<FieldExpr>& constraints() const noexcept { return constraints_; }
    const std::vector<std::optional<double>>& periods() const noexcept { return periods_; }
    const Vec& base_point() const noexcept { return base_point_; }
    bool has_periodic() const noexcept;

    Vec wrap(const Vec& x) const;
    /// to - from, taking the minimal image on periodic coordinates.
    Vec displacement(const Vec& from, const Vec& to) const;
    double chart_distance(const Vec& a, const Vec& b) const;

    bool contains(const Vec& x) const;
    void require_inside(const Vec& x) const;

    /// First-order distance estimate min_k c_k(x) / |grad c_k(x)|; +inf when
    /// the chart has no constraints.
    double boundary_distance(const Vec& x) const;

private:
    std::vector<std::string> coords_;
    std::vector<FieldExpr> constraints_;
    std::vector<std::optional<double>> periods_;
    Vec base_point_;
};

/// Metric data evaluated at one base point.
struct FieldSample {
    Mat g;            // spatial metric
    double beta = 1;  // lapse, must be > 0
    Vec delta;        // chart components of the shift vector field
    Vec delta_flat;   // g * delta, so <delta, v> = delta_flat . v
};

struct CausalClass {
    enum class Character { Timelike, Lightlike, Spacelike };
    enum class Orientation { Future, Past, None };

    Character character = Character::Spacelike;
    Orientation orientation = Orientation::None;

    bool causal() const noexcept { return character != Character::Spacelike; }
    bool operator==(const CausalClass&) const = default;
};

const char* to_string(CausalClass::Character c);
const char* to_string(CausalClass::Orientation o);

/// Relative width of the lightlike band: |<z,z>_L| <= eps * |z|_R^2.
inline constexpr double kLightlikeBand = 1e-9;

/// Standard stationary metric  g + 2 <delta, .> dt - beta dt^2  on base x R.
///
/// Spacetime vectors are ordered (xi_1 .. xi_d, tau) with the time component
/// last; the Killing field is K = (0, ..., 0, 1).
class StationarySpacetime {
public:
    StationarySpacetime(ChartManifold base, std::vector<std::vector<FieldExpr>> g, FieldExpr beta,
                        std::vector<FieldExpr> delta, std::string label = "inline");

    /// Probes the sampled invariants (g positive definite, beta > 0, Lorentzian
    /// signature) at every point; throws InvariantViolation on the first failure.
    void validate(const std::vector<Vec>& probes) const;
    /// Base point plus `count` deterministic points within `radius` of it.
    std::vector<Vec> probe_points(int count = 64, double radius = 3.0, std::uint64_t seed = 17) const;

    const ChartManifold& base() const noexcept { return base_; }
    int dim() const noexcept { return base_.dim(); }
    const std::string& label() const noexcept { return label_; }
    bool is_static() const noexcept;

    const std::vector<std::vector<FieldExpr>>& g_exprs() const noexcept { return g_; }
    const FieldExpr& beta_expr() const noexcept { return beta_; }
    const std::vector<FieldExpr>& delta_exprs() const noexcept { return delta_; }

    /// Fields at x; throws DomainError outside the chart domain.
    FieldSample sample(const Vec& x) const;

    Mat lorentz_metric_at(const Vec& x) const;
    Mat comparison_metric_at(const Vec& x) const;
    Mat conformal_metric_at(const Vec& x) const;

    CausalClass classify_tangent(const Vec& x, const Vec& zeta) const;

private:
    ChartManifold base_;
    std::vector<std::vector<FieldExpr>> g_;
    FieldExpr beta_;
    std::vector<FieldExpr> delta_;
    std::string label_;
};

// Pointwise algebra on an already evaluated FieldSample.
Mat lorentz_matrix(const FieldSample& f);
Mat comparison_matrix(const FieldSample& f);
/// <zeta, K>_L = <delta, xi> - beta * tau.
double killing_product(const FieldSample& f, const Vec& zeta);
CausalClass classify(const FieldSample& f, const Vec& zeta);

// ---------------------------------------------------------------------------
// Registry of named example spacetimes.

using ParamValue = std::variant<double, std::string>;
using RegistryParams = std::map<std::string, ParamValue>;

struct RegistryParam {
    std::string name;
    std::string type;  // "number" | "integer" | "expr"
    std::string default_value;
    std::string description;
};

struct RegistryEntry {
    std::string name;
    std::string description;
    std::vector<RegistryParam> params;
};

const std::vector<RegistryEntry>& registry_entries();

/// Builds and validates a named spacetime. Unknown names, unknown parameter
/// keys and ill-typed values throw ConfigError.
StationarySpacetime registry_get(const std::string& name, const RegistryParams& params = {});

}  // namespace statgeo
