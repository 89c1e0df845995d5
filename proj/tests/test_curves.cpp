#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "statgeo/curves.hpp"
#include "support/fixtures.hpp"

using namespace statgeo;
using statgeo::testing::vec;

namespace {

TEST(SpatialPolyline, StraightLineHasExactEndpoints) {
    const SpatialPolyline c = SpatialPolyline::straight(vec({0.1, 0.2}), vec({0.7, -0.3}), 3);
    EXPECT_EQ(c.segments(), 3);
    EXPECT_EQ(c.node(3), vec({0.7, -0.3}));
    EXPECT_NEAR(c.node(1)[0], 0.3, 1e-15);
    EXPECT_DOUBLE_EQ(c.parameter(2), 2.0 / 3.0);
    EXPECT_THROW(SpatialPolyline(Eigen::MatrixXd(2, 1)), InvariantViolation);
}

TEST(Curves, VelocityAndMidpointUseMinimalImage) {
    const StationarySpacetime cyl = registry_get("cylinder_static");
    const double tau = 2.0 * std::numbers::pi;
    Eigen::MatrixXd nodes(2, 2);
    nodes << tau - 0.1, 0.1, 0.0, 0.0;  // stored wrapped: crosses the seam
    const SpatialPolyline c(nodes);
    EXPECT_NEAR(segment_velocity(cyl.base(), c, 0)[0], 0.2, 1e-13);
    EXPECT_NEAR(cyl.base().wrap(segment_midpoint(cyl.base(), c, 0))[0], 0.0, 1e-13);
}

TEST(Curves, IntegralsOfAStraightLine) {
    const StationarySpacetime st = registry_get("radial_static", {{"beta", std::string("1 + x1^2")}});
    const SpatialPolyline c = SpatialPolyline::straight(vec({0.0}), vec({2.0}), 400);
    EXPECT_NEAR(h1_energy(st, c), 4.0, 1e-12);
    EXPECT_NEAR(integrate_along(st, c, Integrand::RiemannLength), 2.0, 1e-12);
    // Midpoint rule for int_0^1 1 / (1 + 4 s^2) ds = atan(2) / 2.
    EXPECT_NEAR(integrate_along(st, c, Integrand::OneOverBeta), std::atan(2.0) / 2.0, 1e-5);
    EXPECT_EQ(integrate_along(st, c, Integrand::DeltaDotOverBeta), 0.0);
}

TEST(Curves, DistanceResampleAndReverse) {
    const StationarySpacetime flat = registry_get("minkowski_static");
    const SpatialPolyline a = SpatialPolyline::straight(vec({0, 0}), vec({1, 1}), 4);
    SpatialPolyline b = a;
    b.mutable_nodes()(1, 2) += 0.25;
    EXPECT_NEAR(curve_distance(flat.base(), a, b), 0.25, 1e-15);

    const SpatialPolyline fine = resample(flat.base(), a, 8);
    EXPECT_EQ(fine.segments(), 8);
    EXPECT_NEAR(fine.node(3)[0], 3.0 / 8.0, 1e-15);

    const SpatialPolyline r = reversed(a);
    EXPECT_EQ(r.node(0), a.node(4));
    EXPECT_EQ(reversed(r).nodes(), a.nodes());
}

TEST(CurveCsv, RoundTripsBitForBit) {
    const std::vector<std::string> coords = {"x1", "x2"};
    Eigen::MatrixXd nodes(2, 4);
    nodes << 0.0, 0.1 / 3.0, std::numbers::pi, 1.0, 0.0, -1e-17, 2.5, 1.0 / 7.0;
    SpacetimePolyline z{SpatialPolyline(nodes), {0.0, 0.3, 1.0 / 3.0, 2.0}};
    std::stringstream buf;
    write_curve_csv(buf, coords, z);
    const CurveCsv back = read_curve_csv(buf, coords);
    ASSERT_TRUE(back.has_time());
    EXPECT_EQ(back.space.nodes(), nodes);
    EXPECT_EQ(back.time, z.time);

    std::stringstream spatial;
    write_curve_csv(spatial, coords, z.space);
    EXPECT_FALSE(read_curve_csv(spatial, coords).has_time());
}

TEST(CurveCsv, ReportsTheOffendingLine) {
    const std::vector<std::string> coords = {"x1"};
    const auto parse = [&](const std::string& text) {
        std::stringstream in(text);
        return read_curve_csv(in, coords);
    };
    EXPECT_THROW(parse(""), ConfigError);
    EXPECT_THROW(parse("s,y\n0,0\n1,1\n"), ConfigError);
    EXPECT_THROW(parse("s,x1\n0,0\n"), ConfigError);
    try {
        parse("s,x1\n0,0\n0.5,abc\n1,1\n");
        FAIL() << "expected a config error";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.path(), "curve:3");
    }
    try {
        parse("s,x1,t\n0,0,0\n1,1\n");
        FAIL() << "expected a config error";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.path(), "curve:3");
    }
    EXPECT_THROW(parse("s,x1\n0,0\n0.7,1\n"), ConfigError);
}

}  // namespace
