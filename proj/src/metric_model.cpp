#include "statgeo/metric_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace statgeo {

namespace {

std::string describe_point(const Vec& x) {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ')';
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// ChartManifold

ChartManifold::ChartManifold(std::vector<std::string> coords, std::vector<FieldExpr> constraints,
                             std::vector<std::optional<double>> periods, Vec base_point)
    : coords_(std::move(coords)),
      constraints_(std::move(constraints)),
      periods_(std::move(periods)),
      base_point_(std::move(base_point)) {
    const int d = dim();
    if (d < 1 || d > kMaxSpatialDim) {
        throw InvariantViolation("chart dimension must be in [1, " + std::to_string(kMaxSpatialDim) + "]");
    }
    std::set<std::string> unique(coords_.begin(), coords_.end());
    if (static_cast<int>(unique.size()) != d) throw InvariantViolation("coordinate names must be distinct");
    if (periods_.empty()) periods_.resize(static_cast<std::size_t>(d));
    if (static_cast<int>(periods_.size()) != d) throw InvariantViolation("one period entry per coordinate");
    for (const auto& p : periods_) {
        if (p && !(*p > 0.0)) throw InvariantViolation("periodic coordinates need period > 0");
    }
    if (base_point_.size() != d) throw InvariantViolation("base point dimension mismatch");
    for (const auto& c : constraints_) {
        if (!c.is_constant() && static_cast<int>(c.arity()) != d) {
            throw InvariantViolation("domain constraint must be written over the chart coordinates");
        }
    }
    if (!contains(base_point_)) {
        throw InvariantViolation("base point " + describe_point(base_point_) + " lies outside the domain");
    }
}

bool ChartManifold::has_periodic() const noexcept {
    return std::any_of(periods_.begin(), periods_.end(), [](const auto& p) { return p.has_value(); });
}

Vec ChartManifold::wrap(const Vec& x) const {
    Vec out = x;
    for (int k = 0; k < dim(); ++k) {
        if (const auto& p = periods_[static_cast<std::size_t>(k)]) {
            out[k] = x[k] - *p * std::floor(x[k] / *p);
            if (out[k] >= *p) out[k] -= *p;
        }
    }
    return out;
}

Vec ChartManifold::displacement(const Vec& from, const Vec& to) const {
    Vec d = to - from;
    for (int k = 0; k < dim(); ++k) {
        if (const auto& p = periods_[static_cast<std::size_t>(k)]) {
            d[k] -= *p * std::round(d[k] / *p);
        }
    }
    return d;
}

double ChartManifold::chart_distance(const Vec& a, const Vec& b) const {
    return displacement(a, b).norm();
}

bool ChartManifold::contains(const Vec& x) const {
    if (x.size() != dim()) return false;
    for (int k = 0; k < dim(); ++k) {
        if (!std::isfinite(x[k])) return false;
    }
    const Vec w = wrap(x);
    for (const auto& c : constraints_) {
        try {
            if (!(c.eval(as_span(w)) >= 0.0)) return false;
        } catch (const DomainError&) {
            return false;
        }
    }
    return true;
}

void ChartManifold::require_inside(const Vec& x) const {
    if (!contains(x)) throw DomainError("point " + describe_point(x) + " lies outside the chart domain");
}

double ChartManifold::boundary_distance(const Vec& x) const {
    double best = std::numeric_limits<double>::infinity();
    const Vec w = wrap(x);
    for (const auto& c : constraints_) {
        const double value = c.eval(as_span(w));
        const auto grad = c.grad_fd(as_span(w));
        double norm = 0.0;
        for (double gk : grad) norm += gk * gk;
        norm = std::sqrt(norm);
        const double dist = norm > 0.0 ? value / norm : (value >= 0.0 ? best : 0.0);
        best = std::min(best, std::max(dist, 0.0));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Causal classes

const char* to_string(CausalClass::Character c) {
    switch (c) {
        case CausalClass::Character::Timelike: return "timelike";
        case CausalClass::Character::Lightlike: return "lightlike";
        case CausalClass::Character::Spacelike: return "spacelike";
    }
    return "?";
}

const char* to_string(CausalClass::Orientation o) {
    switch (o) {
        case CausalClass::Orientation::Future: return "future";
        case CausalClass::Orientation::Past: return "past";
        case CausalClass::Orientation::None: return "none";
    }
    return "?";
}

Mat lorentz_matrix(const FieldSample& f) {
    const int d = static_cast<int>(f.g.rows());
    Mat L(d + 1, d + 1);
    L.topLeftCorner(d, d) = f.g;
    L.block(0, d, d, 1) = f.delta_flat;
    L.block(d, 0, 1, d) = f.delta_flat.transpose();
    L(d, d) = -f.beta;
    return L;
}

Mat comparison_matrix(const FieldSample& f) {
    // <z,z'>_R = <z,z'>_L - 2 <z,K>_L <z',K>_L / <K,K>_L with <K,K>_L = -beta.
    const int d = static_cast<int>(f.g.rows());
    Mat R = lorentz_matrix(f);
    Vec lk(d + 1);
    lk.head(d) = f.delta_flat;
    lk[d] = -f.beta;
    R.noalias() += (2.0 / f.beta) * lk * lk.transpose();
    return R;
}

double killing_product(const FieldSample& f, const Vec& zeta) {
    const int d = static_cast<int>(f.g.rows());
    return f.delta_flat.dot(zeta.head(d)) - f.beta * zeta[d];
}

CausalClass classify(const FieldSample& f, const Vec& zeta) {
    using C = CausalClass;
    if (zeta.isZero(0.0)) return {};
    const double lorentz = zeta.dot(lorentz_matrix(f) * zeta);
    const double comparison = zeta.dot(comparison_matrix(f) * zeta);
    C out;
    if (std::abs(lorentz) <= kLightlikeBand * comparison) {
        out.character = C::Character::Lightlike;
    } else if (lorentz < 0.0) {
        out.character = C::Character::Timelike;
    } else {
        return out;
    }
    const double k = killing_product(f, zeta);
    if (k < 0.0) {
        out.orientation = C::Orientation::Future;
    } else if (k > 0.0) {
        out.orientation = C::Orientation::Past;
    } else {
        return {};
    }
    return out;
}

// ---------------------------------------------------------------------------
// StationarySpacetime

StationarySpacetime::StationarySpacetime(ChartManifold base, std::vector<std::vector<FieldExpr>> g,
                                         FieldExpr beta, std::vector<FieldExpr> delta, std::string label)
    : base_(std::move(base)), g_(std::move(g)), beta_(std::move(beta)), delta_(std::move(delta)),
      label_(std::move(label)) {
    const auto d = static_cast<std::size_t>(base_.dim());
    if (g_.size() != d) throw InvariantViolation("g must be a d x d matrix of expressions");
    for (const auto& row : g_) {
        if (row.size() != d) throw InvariantViolation("g must be a d x d matrix of expressions");
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            if (g_[i][j].serialize() != g_[j][i].serialize()) {
                throw InvariantViolation("g must be symmetric (entries " + std::to_string(i + 1) + "," +
                                         std::to_string(j + 1) + " differ)");
            }
        }
    }
    if (delta_.size() != d) throw InvariantViolation("delta must have one component per coordinate");
}

bool StationarySpacetime::is_static() const noexcept {
    return std::all_of(delta_.begin(), delta_.end(), [](const FieldExpr& e) {
        if (!e.is_constant()) return false;
        const std::vector<double> origin(e.arity(), 0.0);
        return e.eval(origin) == 0.0;
    });
}

FieldSample StationarySpacetime::sample(const Vec& x) const {
    base_.require_inside(x);
    const Vec w = base_.wrap(x);
    const auto p = as_span(w);
    const int d = dim();
    FieldSample f;
    f.g.resize(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            const double v = g_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(p);
            f.g(i, j) = v;
            f.g(j, i) = v;
        }
    }
    f.beta = beta_.eval(p);
    f.delta.resize(d);
    for (int i = 0; i < d; ++i) f.delta[i] = delta_[static_cast<std::size_t>(i)].eval(p);
    f.delta_flat = f.g * f.delta;
    return f;
}

Mat StationarySpacetime::lorentz_metric_at(const Vec& x) const { return lorentz_matrix(sample(x)); }

Mat StationarySpacetime::comparison_metric_at(const Vec& x) const { return comparison_matrix(sample(x)); }

Mat StationarySpacetime::conformal_metric_at(const Vec& x) const {
    const FieldSample f = sample(x);
    return f.g / f.beta;
}

CausalClass StationarySpacetime::classify_tangent(const Vec& x, const Vec& zeta) const {
    return classify(sample(x), zeta);
}

std::vector<Vec> StationarySpacetime::probe_points(int count, double radius, std::uint64_t seed) const {
    std::vector<Vec> out{base_.base_point()};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const int d = dim();
    for (int attempt = 0; attempt < 20 * count && static_cast<int>(out.size()) <= count; ++attempt) {
        Vec x = base_.base_point();
        for (int k = 0; k < d; ++k) {
            if (const auto& per = base_.periods()[static_cast<std::size_t>(k)]) {
                x[k] = 0.5 * *per * (unit(rng) + 1.0);
            } else {
                x[k] += radius * unit(rng);
            }
        }
        if (base_.contains(x)) out.push_back(x);
    }
    return out;
}

void StationarySpacetime::validate(const std::vector<Vec>& probes) const {
    for (const Vec& x : probes) {
        if (!base_.contains(x)) continue;
        FieldSample f;
        try {
            f = sample(x);
        } catch (const DomainError& e) {
            throw InvariantViolation(std::string("field evaluation failed at ") + describe_point(x) + ": " +
                                     e.what());
        }
        if (!(f.beta > 0.0) || !std::isfinite(f.beta)) {
            throw InvariantViolation("beta must be positive (beta = " + std::to_string(f.beta) + " at " +
                                     describe_point(x) + ")");
        }
        Eigen::SelfAdjointEigenSolver<Mat> spatial(f.g, Eigen::EigenvaluesOnly);
        if (!(spatial.eigenvalues().minCoeff() > 0.0)) {
            throw InvariantViolation("spatial metric g must be positive definite at " + describe_point(x));
        }
        Eigen::SelfAdjointEigenSolver<Mat> full(lorentz_matrix(f), Eigen::EigenvaluesOnly);
        const auto negatives = (full.eigenvalues().array() < 0.0).count();
        if (negatives != 1) {
            throw InvariantViolation("Lorentzian metric must have signature (d,1) at " + describe_point(x));
        }
    }
}

}  // namespace statgeo
