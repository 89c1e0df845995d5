#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "statgeo/functional.hpp"
#include "statgeo/metric_model.hpp"

namespace statgeo::testing {

inline Vec vec(std::initializer_list<double> values) {
    Vec v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (const double x : values) v[i++] = x;
    return v;
}

inline std::shared_ptr<const StationarySpacetime> spacetime(const std::string& name, const RegistryParams& params = {}) {
    return std::make_shared<const StationarySpacetime>(registry_get(name, params));
}

inline ProblemInstance problem(const std::string& name, const Vec& x_p, double t_p, const Vec& x_q, double t_q,
                               const RegistryParams& params = {}, std::vector<int> windings = {}) {
    return ProblemInstance::make(spacetime(name, params), x_p, t_p, x_q, t_q, std::move(windings));
}

/// One endpoint problem per registry entry, with non-trivial fields where the
/// entry allows it.
struct NamedProblem {
    std::string label;
    ProblemInstance pi;
};

inline std::vector<NamedProblem> registry_problems() {
    return {
        {"minkowski_static", problem("minkowski_static", vec({0, 0}), 0, vec({1, 0}), 2)},
        {"minkowski_skewed", problem("minkowski_skewed", vec({0}), 0, vec({1}), 2.5)},
        {"circle_static", problem("circle_static", vec({0.5}), 0, vec({2.0}), 3)},
        {"cylinder_static", problem("cylinder_static", vec({0, 0}), 0, vec({1, 0.5}), 10)},
        {"excised_disk_static",
         problem("excised_disk_static", vec({2, 0}), 0, vec({0, 2.5}), 1.5, {{"beta", std::string("1 + x2^2/10")}})},
        {"radial_static", problem("radial_static", vec({0.5}), 0, vec({2}), 1, {{"beta", std::string("1 + x1^2")}})},
    };
}

/// Random feasible polylines joining the problem's endpoints: the straight
/// chord plus a few random sine modes, rejected while they leave the domain.
class RandomCurves {
public:
    RandomCurves(const ProblemInstance& pi, int segments, std::uint64_t seed, double scale = 0.3)
        : pi_(pi), segments_(segments), rng_(seed), scale_(scale) {}

    SpatialPolyline next() {
        const Vec from = pi_.x_p;
        const Vec to = pi_.lifted_target();
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (int attempt = 0; attempt < 1000; ++attempt) {
            Eigen::MatrixXd nodes(from.size(), segments_ + 1);
            Eigen::MatrixXd coeff(from.size(), 3);
            for (Eigen::Index r = 0; r < coeff.rows(); ++r) {
                for (Eigen::Index c = 0; c < coeff.cols(); ++c) coeff(r, c) = scale_ * unif(rng_) / (c + 1);
            }
            for (int i = 0; i <= segments_; ++i) {
                const double s = static_cast<double>(i) / segments_;
                Eigen::VectorXd p = (1.0 - s) * from + s * to;
                if (i > 0 && i < segments_) {
                    for (int m = 0; m < 3; ++m) p += coeff.col(m) * std::sin((m + 1) * std::numbers::pi * s);
                }
                nodes.col(i) = p;
            }
            SpatialPolyline x(std::move(nodes));
            if (usable(x)) return x;
        }
        throw std::runtime_error("could not draw a feasible random curve");
    }

private:
    bool usable(const SpatialPolyline& x) const {
        for (int i = 0; i <= x.segments(); ++i) {
            if (!pi_.chart().contains(x.node(i))) return false;
        }
        try {
            reduced_action(pi_, x);
        } catch (const DomainError&) {
            return false;
        }
        return true;
    }

    const ProblemInstance& pi_;
    int segments_;
    std::mt19937_64 rng_;
    double scale_;
};

}  // namespace statgeo::testing
