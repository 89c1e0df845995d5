#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "statgeo/solver.hpp"
#include "statgeo/verify.hpp"
#include "support/fixtures.hpp"
#include "support/oracle_values.hpp"
#include "support/shooting_oracle.hpp"

using namespace statgeo;
using statgeo::testing::problem;
using statgeo::testing::vec;

namespace {

// Exact skewed geodesic sampled at n + 1 nodes, via the shooting oracle.
SpacetimePolyline skewed_geodesic(int n) {
    const auto shot = statgeo::testing::shoot(statgeo::testing::skewed_rhs, 0.0, 0.0, 1.0, 2.5, n);
    Eigen::MatrixXd nodes(1, n + 1);
    SpacetimePolyline z;
    for (int i = 0; i <= n; ++i) {
        nodes(0, i) = shot.path[static_cast<std::size_t>(i)][0];
        z.time.push_back(shot.path[static_cast<std::size_t>(i)][1]);
    }
    z.space = SpatialPolyline(nodes);
    return z;
}

TEST(ShootingOracle, AgreesWithTheClosedForm) {
    const auto shot = statgeo::testing::shoot(statgeo::testing::skewed_rhs, 0.0, 0.0, 1.0, 2.5, 64);
    EXPECT_LT(shot.miss, 1e-12);
    for (int k = 0; k <= 8; ++k) {
        EXPECT_NEAR(shot.path[static_cast<std::size_t>(8 * k)][0], oracle::kSkewedX[k], 1e-10);
        EXPECT_NEAR(shot.path[static_cast<std::size_t>(8 * k)][1], oracle::kSkewedT[k], 1e-10);
    }
}

TEST(Christoffel, SkewedSymbolsMatchHandDerivation) {
    const StationarySpacetime st = registry_get("minkowski_skewed");
    const double x = 0.6;
    const auto gamma = christoffel_symbols(st, vec({x}));
    ASSERT_EQ(gamma.size(), 2u);
    EXPECT_NEAR(gamma[0](0, 0), x / (1 + x * x), 1e-8);
    EXPECT_NEAR(gamma[1](0, 0), -1.0 / (1 + x * x), 1e-8);
    for (int a = 0; a < 2; ++a) {
        EXPECT_NEAR(gamma[a](0, 1), 0.0, 1e-8);
        EXPECT_NEAR(gamma[a](1, 1), 0.0, 1e-8);
        EXPECT_EQ(gamma[a](0, 1), gamma[a](1, 0));
    }
}

TEST(Residual, ExactGeodesicConvergesAtSecondOrder) {
    const StationarySpacetime st = registry_get("minkowski_skewed");
    const double coarse = geodesic_residual(st, skewed_geodesic(64));
    const double fine = geodesic_residual(st, skewed_geodesic(128));
    EXPECT_LT(coarse, 1e-3);
    EXPECT_NEAR(fine / coarse, 0.25, 0.03);
}

TEST(Residual, StraightLineInFlatSpaceIsZero) {
    const ProblemInstance pi = problem("minkowski_static", vec({0, 0}), 0, vec({1, 0.5}), 2);
    const SpacetimePolyline z = time_reconstruction(pi, SpatialPolyline::straight(pi.x_p, pi.x_q, 32));
    EXPECT_LT(geodesic_residual(pi.st(), z), 1e-9);
}

TEST(Residual, BentCurveIsFlagged) {
    const ProblemInstance pi = problem("minkowski_static", vec({0, 0}), 0, vec({1, 0}), 2);
    SpacetimePolyline z = time_reconstruction(pi, SpatialPolyline::straight(pi.x_p, pi.x_q, 32));
    z.space.mutable_nodes()(1, 16) += 0.01;
    const auto r = geodesic_residuals(pi.st(), z);
    ASSERT_EQ(r.size(), 31u);
    EXPECT_GT(r[15], 1.0);
    EXPECT_LT(r[10], 1e-9);
}

TEST(Residual, ParallelMatchesReference) {
    const StationarySpacetime st = registry_get("minkowski_skewed");
    const SpacetimePolyline z = skewed_geodesic(96);
    const auto fast = geodesic_residuals(st, z, true);
    const auto serial = geodesic_residuals(st, z, false);
    const auto slow = reference::geodesic_residuals(st, z);
    ASSERT_EQ(fast.size(), slow.size());
    EXPECT_EQ(fast, serial);
    for (std::size_t i = 0; i < fast.size(); ++i) EXPECT_NEAR(fast[i], slow[i], 1e-12);
}

TEST(Conservation, LiftConservesTheKillingProductExactly) {
    for (const auto& fx : statgeo::testing::registry_problems()) {
        statgeo::testing::RandomCurves draw(fx.pi, 64, 41);
        const SpatialPolyline x = draw.next();
        const ConservationDrift d = conservation_check(fx.pi.st(), time_reconstruction(fx.pi, x));
        EXPECT_LT(d.constraint_drift, 1e-10) << fx.label;
        EXPECT_NEAR(d.constraint_mean, reduced_action(fx.pi, x).constraint_constant, 1e-10) << fx.label;
    }
}

TEST(Conservation, EnergyDriftDetectsNonGeodesics) {
    const ProblemInstance pi = problem("minkowski_static", vec({0, 0}), 0, vec({1, 0}), 2);
    statgeo::testing::RandomCurves draw(pi, 64, 43);
    EXPECT_GT(conservation_check(pi.st(), time_reconstruction(pi, draw.next())).energy_drift, 1e-3);
    const SpacetimePolyline line = time_reconstruction(pi, SpatialPolyline::straight(pi.x_p, pi.x_q, 64));
    const ConservationDrift d = conservation_check(pi.st(), line);
    EXPECT_LT(d.energy_drift, 1e-12);
    EXPECT_NEAR(d.energy_mean, -3.0, 1e-12);  // |v|^2 - dt^2 = 1 - 4
}

TEST(CausalCheck, ClassifiesWholeCurves) {
    const ProblemInstance pi = problem("minkowski_static", vec({0, 0}), 0, vec({1, 0}), 2);
    const SpacetimePolyline future = time_reconstruction(pi, SpatialPolyline::straight(pi.x_p, pi.x_q, 16));
    EXPECT_EQ(causal_curve_check(pi.st(), future).verdict, CausalVerdict::CausalFuture);

    SpacetimePolyline past = future;
    for (double& t : past.time) t = -t;
    const CausalCheck p = causal_curve_check(pi.st(), past);
    EXPECT_EQ(p.verdict, CausalVerdict::CausalPast);
    EXPECT_EQ(p.offending_segment, -1);

    SpacetimePolyline mixed = future;
    for (std::size_t i = 10; i < mixed.time.size(); ++i) mixed.time[i] = mixed.time[9] - 0.1 * (i - 9.0);
    const CausalCheck m = causal_curve_check(pi.st(), mixed);
    EXPECT_EQ(m.verdict, CausalVerdict::NotCausal);
    EXPECT_EQ(m.first_nonmonotone, 9);
    EXPECT_EQ(m.offending_segment, 9);

    const ProblemInstance flat_time = problem("minkowski_static", vec({0, 0}), 0, vec({1, 0}), 0);
    const SpacetimePolyline spacelike = time_reconstruction(flat_time, SpatialPolyline::straight(pi.x_p, pi.x_q, 16));
    const CausalCheck s = causal_curve_check(pi.st(), spacelike);
    EXPECT_EQ(s.verdict, CausalVerdict::NotCausal);
    EXPECT_EQ(s.first_misclassified, 0);
    EXPECT_EQ(s.segments.size(), 16u);
}

TEST(CausalCheck, LightlikeLiftIsFutureDirected) {
    const ProblemInstance pi = problem("circle_static", vec({0.5}), 0, vec({2.0}), 3);
    const LightlikeArrival a = lightlike_arrival(pi, SpatialPolyline::straight(pi.x_p, pi.x_q, 32));
    const CausalCheck c = causal_curve_check(pi.st(), a.curve);
    EXPECT_EQ(c.verdict, CausalVerdict::CausalFuture);
    for (const auto& seg : c.segments) EXPECT_EQ(seg.character, CausalClass::Character::Lightlike);
}

TEST(VerifyCurve, AcceptsASolvedGeodesicAndRejectsACorruptedOne) {
    const ProblemInstance pi = problem("minkowski_skewed", vec({0}), 0, vec({1}), 2.5);
    SolveConfig cfg;
    cfg.seeds.random_count = 0;
    const SolveReport r = multistart(pi, cfg).front();
    ASSERT_EQ(r.status, SolveStatus::Converged);
    SpacetimePolyline z = time_reconstruction(pi, r.curve);
    EXPECT_TRUE(verify_curve(pi.st(), z, VerifyThresholds{}).passed);
    z.space.mutable_nodes()(0, 30) += 0.05;
    const VerificationReport bad = verify_curve(pi.st(), z, VerifyThresholds{});
    EXPECT_FALSE(bad.passed);
    EXPECT_GT(bad.max_residual, 1e-3);
}

TEST(GrowthBounds, FlatSpacetimePassesBothBounds) {
    const HyperbolicityDiagnostics d = growth_bounds(registry_get("minkowski_static"), GrowthSampling{});
    EXPECT_NEAR(d.beta_exponent, 0.0, 1e-12);
    EXPECT_TRUE(d.quad_ok);
    EXPECT_TRUE(d.linear_ok);
    EXPECT_FALSE(d.partial);
    EXPECT_TRUE(d.static_intent);
}

TEST(GrowthBounds, PowerLawExponentsMatchTheOracleFit) {
    const StationarySpacetime cubic = registry_get("radial_static", {{"beta", std::string("(1 + x1^2)^1.5")}});
    GrowthSampling s;
    EXPECT_NEAR(growth_bounds(cubic, s).beta_exponent, oracle::kCubicExponent32, 1e-9);
    s.samples = 64;
    EXPECT_NEAR(growth_bounds(cubic, s).beta_exponent, oracle::kCubicExponent64, 1e-9);
    EXPECT_FALSE(growth_bounds(cubic, s).quad_ok);
}

TEST(GrowthBounds, LinearShiftAndGaussianLapse) {
    const HyperbolicityDiagnostics shift = growth_bounds(registry_get("minkowski_skewed"), GrowthSampling{});
    EXPECT_NEAR(shift.delta_exponent, 1.0, 1e-9);
    EXPECT_TRUE(shift.linear_ok);
    EXPECT_FALSE(shift.static_intent);
    const HyperbolicityDiagnostics gauss =
        growth_bounds(registry_get("radial_static", {{"beta", std::string("exp(x1^2)")}}), GrowthSampling{});
    EXPECT_FALSE(gauss.quad_ok);
    const HyperbolicityDiagnostics quad =
        growth_bounds(registry_get("radial_static", {{"beta", std::string("1 + x1^2")}}), GrowthSampling{});
    EXPECT_TRUE(quad.quad_ok);
}

TEST(GrowthBounds, RaysLeavingTheDomainAreReported) {
    // Base point (2, 0): the -x1 ray hits the unit disk after one unit.
    const HyperbolicityDiagnostics d = growth_bounds(registry_get("excised_disk_static"), GrowthSampling{});
    EXPECT_TRUE(d.partial);
    ASSERT_FALSE(d.exits.empty());
    bool found = false;
    for (const auto& e : d.exits) found = found || (e.direction[0] < -0.99 && e.last_radius <= 1.0);
    EXPECT_TRUE(found);
}

TEST(Completeness, ConvergentConformalLengthIsMeasured) {
    const StationarySpacetime st = registry_get("radial_static", {{"beta", std::string("(1 + x1^2)^2")}});
    const auto rays = conformal_completeness_probe(st, CompletenessSpec{});
    ASSERT_EQ(rays.size(), 2u);
    for (const auto& r : rays) {
        EXPECT_EQ(r.verdict, CompletenessRay::Verdict::Converges);
        EXPECT_NEAR(r.length, oracle::kRadialConformalLength, 1e-6);
    }
}

TEST(Completeness, FlatRaysDivergeAndObstaclesAreBoundaries) {
    for (const auto& r : conformal_completeness_probe(registry_get("minkowski_static"), CompletenessSpec{})) {
        EXPECT_EQ(r.verdict, CompletenessRay::Verdict::Diverges);
    }
    bool boundary = false;
    for (const auto& r : conformal_completeness_probe(registry_get("excised_disk_static"), CompletenessSpec{})) {
        if (r.verdict == CompletenessRay::Verdict::Boundary) {
            boundary = true;
            EXPECT_NEAR(r.reach, 1.0, 1e-9);
            EXPECT_NEAR(r.length, 1.0, 1e-9);
        }
    }
    EXPECT_TRUE(boundary);
}

}  // namespace
