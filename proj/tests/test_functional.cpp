#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "statgeo/functional.hpp"
#include "support/fixtures.hpp"
#include "support/oracle_values.hpp"

using namespace statgeo;
using statgeo::testing::problem;
using statgeo::testing::RandomCurves;
using statgeo::testing::vec;

namespace {

SpatialPolyline polyline_1d(std::initializer_list<double> xs) {
    Eigen::MatrixXd nodes(1, static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (const double x : xs) nodes(0, i++) = x;
    return SpatialPolyline(nodes);
}

TEST(ReducedAction, MatchesHandComputedSkewedPolyline) {
    const ProblemInstance pi = problem("minkowski_skewed", vec({0}), 0, vec({1}), 2.5);
    const FunctionalBreakdown b = reduced_action(pi, polyline_1d({0.0, 0.3, 0.55, 1.0}));
    EXPECT_NEAR(b.kinetic, oracle::kSkewedPolyKinetic, 1e-14);
    EXPECT_NEAR(b.mixed, oracle::kSkewedPolyMixed, 1e-14);
    EXPECT_NEAR(b.drift, oracle::kSkewedPolyDrift, 1e-14);
    EXPECT_NEAR(b.lapse, oracle::kSkewedPolyLapse, 1e-14);
    EXPECT_NEAR(b.value, oracle::kSkewedPolyValue, 1e-14);
    EXPECT_NEAR(b.constraint_constant, oracle::kSkewedPolyConstraint, 1e-14);
}

TEST(ReducedAction, MatchesHandComputedLapsePolyline) {
    const ProblemInstance pi = problem("radial_static", vec({2, 0}), 0, vec({1.5, 2}), 1.5,
                                       {{"d", 2.0}, {"beta", std::string("1 + x1^2/4 + x2^2/9")}});
    Eigen::MatrixXd nodes(2, 4);
    nodes << 2, 2.25, 2.1, 1.5, 0, 0.5, 1.25, 2;
    EXPECT_NEAR(reduced_action(pi, SpatialPolyline(nodes)).value, oracle::kRadialPolyValue, 1e-13);
}

TEST(ReducedAction, FlatStraightLine) {
    const ProblemInstance pi = problem("minkowski_static", vec({0, 0}), 0, vec({1, 0}), 2);
    const FunctionalBreakdown b = reduced_action(pi, SpatialPolyline::straight(pi.x_p, pi.x_q, 16));
    EXPECT_NEAR(b.value, -1.5, 1e-14);
    EXPECT_NEAR(b.constraint_constant, -2.0, 1e-14);
}

TEST(ReducedAction, RejectsCurvesWithWrongEndpoints) {
    const ProblemInstance pi = problem("minkowski_skewed", vec({0}), 0, vec({1}), 2.5);
    EXPECT_THROW(reduced_action(pi, polyline_1d({0.0, 0.5, 0.9})), InvariantViolation);
    EXPECT_NO_THROW(reduced_action(pi, polyline_1d({0.0, 0.5, 1.0 + 1e-12})));
}

TEST(ProblemInstance, ValidatesEndpointsAndWindings) {
    EXPECT_THROW(problem("excised_disk_static", vec({0, 0}), 0, vec({2, 0}), 1), DomainError);
    EXPECT_THROW(problem("minkowski_static", vec({0, 0}), 0, vec({1, 0}), 1, {}, {1, 0}), InvariantViolation);
    EXPECT_THROW(problem("minkowski_static", vec({0}), 0, vec({1, 0}), 1), InvariantViolation);
    const ProblemInstance cyl = problem("cylinder_static", vec({0, 0}), 0, vec({0, 0}), 1, {}, {2, 0});
    EXPECT_NEAR(cyl.lifted_target()[0], 4.0 * std::numbers::pi, 1e-13);
}

TEST(TimeReconstruction, LiftRecoversTheFullAction) {
    for (const auto& fx : statgeo::testing::registry_problems()) {
        RandomCurves draw(fx.pi, 64, 21);
        for (int k = 0; k < 10; ++k) {
            const SpatialPolyline x = draw.next();
            const SpacetimePolyline z = time_reconstruction(fx.pi, x);
            EXPECT_EQ(z.time.front(), fx.pi.t_p) << fx.label;
            EXPECT_EQ(z.time.back(), fx.pi.t_q) << fx.label;
            EXPECT_NEAR(full_action(fx.pi, z), reduced_action(fx.pi, x).value, 1e-10) << fx.label;
        }
    }
}

TEST(TimeReconstruction, LiftMaximisesOverTimeProfiles) {
    // Any other time profile with the same endpoints has a smaller action.
    const ProblemInstance pi = problem("minkowski_skewed", vec({0}), 0, vec({1}), 2.5);
    RandomCurves draw(pi, 32, 4);
    const SpatialPolyline x = draw.next();
    const SpacetimePolyline z = time_reconstruction(pi, x);
    const double best = full_action(pi, z);
    for (int i = 1; i < 32; i += 5) {
        SpacetimePolyline w = z;
        w.time[static_cast<std::size_t>(i)] += 1e-3;
        EXPECT_LT(full_action(pi, w), best);
    }
}

TEST(Coercivity, LowerBoundHoldsAndIsSharpForUnitLapse) {
    for (const auto& fx : statgeo::testing::registry_problems()) {
        RandomCurves draw(fx.pi, 64, 8);
        const bool sharp = fx.label == "minkowski_static" || fx.label == "cylinder_static";
        for (int k = 0; k < 20; ++k) {
            const SpatialPolyline x = draw.next();
            const double twice = 2.0 * reduced_action(fx.pi, x).value;
            const double rhs = coercivity_lower_bound(fx.pi, x);
            EXPECT_GE(twice - rhs, -1e-10 * std::max(1.0, std::abs(rhs))) << fx.label;
            if (sharp) EXPECT_NEAR(twice, rhs, 1e-10) << fx.label;
        }
    }
}

TEST(LightlikeArrival, ConstantShiftOracle) {
    const ProblemInstance pi = problem("minkowski_skewed", vec({0}), 0, vec({2}), 5, {{"delta", std::string("0.5")}});
    const LightlikeArrival a = lightlike_arrival(pi, SpatialPolyline::straight(pi.x_p, pi.x_q, 32));
    EXPECT_NEAR(a.arrival_time, oracle::kLightlikeConstShift, 1e-13);
    EXPECT_EQ(a.curve.time.front(), 0.0);
    EXPECT_NEAR(a.curve.time.back(), oracle::kLightlikeConstShift, 1e-13);
}

TEST(LightlikeArrival, BoundedByTheClosedFormAndZeroActionThere) {
    for (const auto& fx : statgeo::testing::registry_problems()) {
        RandomCurves draw(fx.pi, 64, 13);
        for (int k = 0; k < 10; ++k) {
            const SpatialPolyline x = draw.next();
            const double arrival = lightlike_arrival(fx.pi, x).arrival_time;
            const double bound = arrival_upper_bound(fx.pi, x);
            EXPECT_LE(arrival, bound * (1 + 1e-14) + 1e-14) << fx.label;
            const ProblemInstance at = ProblemInstance::make(fx.pi.spacetime, fx.pi.x_p, fx.pi.t_p, fx.pi.x_q,
                                                             fx.pi.t_p + bound, fx.pi.windings);
            EXPECT_NEAR(reduced_action(at, x).value, 0.0, 1e-9) << fx.label;
        }
    }
}

TEST(LightlikeArrival, ConstantPathIsDegenerate) {
    const ProblemInstance pi = problem("minkowski_static", vec({0.25, 0.5}), 0, vec({0.25, 0.5}), 1);
    const SpatialPolyline x = SpatialPolyline::straight(pi.x_p, pi.x_q, 8);
    EXPECT_THROW(lightlike_arrival(pi, x), DegenerateCurve);
    EXPECT_THROW(arrival_upper_bound(pi, x), DegenerateCurve);
}

TEST(Symmetries, TimeTranslationLeavesTheActionUnchanged) {
    for (const auto& fx : statgeo::testing::registry_problems()) {
        RandomCurves draw(fx.pi, 48, 2);
        const SpatialPolyline x = draw.next();
        const ProblemInstance shifted = fx.pi.time_shifted(3.75);
        EXPECT_NEAR(reduced_action(shifted, x).value, reduced_action(fx.pi, x).value, 1e-13) << fx.label;
        const SpacetimePolyline a = time_reconstruction(fx.pi, x);
        const SpacetimePolyline b = time_reconstruction(shifted, x);
        for (std::size_t i = 0; i < a.time.size(); ++i) EXPECT_NEAR(b.time[i] - a.time[i], 3.75, 1e-12);
    }
}

TEST(Symmetries, ReversingTheCurveAndTimeLeavesTheActionUnchanged) {
    for (const auto& fx : statgeo::testing::registry_problems()) {
        RandomCurves draw(fx.pi, 48, 5);
        const SpatialPolyline x = draw.next();
        const ProblemInstance back = ProblemInstance::make(fx.pi.spacetime, x.node(x.segments()), fx.pi.t_q, fx.pi.x_p,
                                                           fx.pi.t_p);
        EXPECT_LT(back.dt(), 0.0);
        EXPECT_NEAR(reduced_action(back, reversed(x)).value, reduced_action(fx.pi, x).value, 1e-11) << fx.label;
    }
}

TEST(Gradient, ExactForTheFlatQuadratic) {
    const ProblemInstance pi = problem("minkowski_static", vec({0, 0}), 0, vec({1, 0}), 2);
    RandomCurves draw(pi, 16, 9);
    const SpatialPolyline x = draw.next();
    const Eigen::MatrixXd g = gradient(pi, x);
    const int n = x.segments();
    ASSERT_EQ(g.cols(), n - 1);
    for (int j = 1; j < n; ++j) {
        const Eigen::VectorXd expected = n * (2.0 * x.nodes().col(j) - x.nodes().col(j - 1) - x.nodes().col(j + 1));
        EXPECT_NEAR((g.col(j - 1) - expected).norm(), 0.0, 1e-8);
    }
}

TEST(Gradient, LocalKernelMatchesFullReevaluation) {
    for (const auto& fx : statgeo::testing::registry_problems()) {
        RandomCurves draw(fx.pi, 32, 17);
        const SpatialPolyline x = draw.next();
        const Eigen::MatrixXd fast = gradient(fx.pi, x);
        const Eigen::MatrixXd slow = reference::gradient(fx.pi, x);
        EXPECT_LE((fast - slow).cwiseAbs().maxCoeff(), 1e-7 * std::max(1.0, slow.cwiseAbs().maxCoeff())) << fx.label;
    }
}

TEST(Gradient, ParallelAndSerialKernelsAgreeBitwise) {
    for (const auto& fx : statgeo::testing::registry_problems()) {
        RandomCurves draw(fx.pi, 64, 23);
        const SpatialPolyline x = draw.next();
        const auto terms = segment_terms(fx.pi, x);
        EXPECT_EQ(gradient(fx.pi, x, terms, true), gradient(fx.pi, x, terms, false)) << fx.label;
    }
}

TEST(Gradient, MatchesDirectionalDerivative) {
    for (const auto& fx : statgeo::testing::registry_problems()) {
        RandomCurves draw(fx.pi, 32, 29);
        const SpatialPolyline x = draw.next();
        const Eigen::MatrixXd g = gradient(fx.pi, x);
        // Direction: a smooth bump vanishing at the endpoints.
        Eigen::MatrixXd dir = Eigen::MatrixXd::Zero(x.dim(), x.segments() + 1);
        for (int i = 1; i < x.segments(); ++i) dir.col(i).setConstant(std::sin(std::numbers::pi * i / x.segments()));
        const auto value_at = [&](double eps) {
            SpatialPolyline y = x;
            y.mutable_nodes() += eps * dir;
            return reduced_action(fx.pi, y).value;
        };
        const double eps = 1e-4;
        // Richardson-extrapolated central difference.
        const double d1 = (value_at(eps) - value_at(-eps)) / (2 * eps);
        const double d2 = (value_at(eps / 2) - value_at(-eps / 2)) / eps;
        const double directional = (4 * d2 - d1) / 3;
        const double predicted = (g.array() * dir.middleCols(1, x.segments() - 1).array()).sum();
        EXPECT_NEAR(predicted, directional, 1e-7 * std::max(1.0, std::abs(directional))) << fx.label;
    }
}

TEST(Gradient, NegativeGradientIsADescentDirection) {
    for (const auto& fx : statgeo::testing::registry_problems()) {
        RandomCurves draw(fx.pi, 32, 31);
        const SpatialPolyline x = draw.next();
        const Eigen::MatrixXd g = gradient(fx.pi, x);
        SpatialPolyline y = x;
        y.mutable_nodes().middleCols(1, x.segments() - 1) -= 1e-4 * g / std::max(1.0, g.norm());
        EXPECT_LT(reduced_action(fx.pi, y).value, reduced_action(fx.pi, x).value) << fx.label;
    }
}

TEST(ActionChange, AgreesWithDirectDifference) {
    ActionSums s{1.5, 0.25, 0.75, 1.2};
    const ActionSums delta{1e-9, -2e-9, 3e-9, 1e-9};
    ActionSums t = s;
    t.kinetic += delta.kinetic;
    t.mixed += delta.mixed;
    t.drift += delta.drift;
    t.lapse += delta.lapse;
    EXPECT_NEAR(action_change(s, delta, 2.0), action_value(t, 2.0) - action_value(s, 2.0), 1e-15);
}

}  // namespace
