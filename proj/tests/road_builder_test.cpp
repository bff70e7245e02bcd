#include "sforge/road_ir.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sforge/detailing.hpp"
#include "sforge/dsl.hpp"
#include "sforge/valuation.hpp"

namespace {

using namespace sforge;

// Oracle: RK4 integration of the unit-speed curve x' = cos h, y' = sin h,
// h' = curvature, fixed step 0.01 m.
Pose2 rk4_end_pose(double curvature, double length, double step = 0.01) {
    double x = 0.0, y = 0.0, h = 0.0;
    double s = 0.0;
    while (s < length) {
        const double ds = std::min(step, length - s);
        const double k1x = std::cos(h), k1y = std::sin(h);
        const double h2 = h + curvature * ds / 2.0;
        const double k2x = std::cos(h2), k2y = std::sin(h2);
        const double k3x = k2x, k3y = k2y;  // h' is state-independent
        const double h4 = h + curvature * ds;
        const double k4x = std::cos(h4), k4y = std::sin(h4);
        x += ds * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0;
        y += ds * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0;
        h += curvature * ds;
        s += ds;
    }
    return {x, y, h};
}

TEST(PlanViewEndPose, LineFromOrigin) {
    GeometrySegment seg;
    seg.length = 500.0;
    const Pose2 p = plan_view_end_pose(seg);
    EXPECT_DOUBLE_EQ(p.x, 500.0);
    EXPECT_DOUBLE_EQ(p.y, 0.0);
    EXPECT_DOUBLE_EQ(p.hdg, 0.0);
}

TEST(PlanViewEndPose, ArcMatchesFrozenValues) {
    GeometrySegment seg;
    seg.shape = GeometrySegment::Shape::arc;
    seg.curvature = 0.001;
    seg.length = 1000.0;
    const Pose2 p = plan_view_end_pose(seg);
    EXPECT_NEAR(p.x, 841.47098480789650, 1e-8);
    EXPECT_NEAR(p.y, 459.69769413186023, 1e-8);
    EXPECT_DOUBLE_EQ(p.hdg, 1.0);

    const Pose2 oracle = rk4_end_pose(0.001, 1000.0);
    EXPECT_NEAR(p.x, oracle.x, 1e-6);
    EXPECT_NEAR(p.y, oracle.y, 1e-6);
}

TEST(PlanViewEndPose, MirroredArc) {
    GeometrySegment seg;
    seg.shape = GeometrySegment::Shape::arc;
    seg.curvature = -0.001;
    seg.length = 1000.0;
    const Pose2 p = plan_view_end_pose(seg);
    EXPECT_NEAR(p.x, 841.47098480789650, 1e-8);
    EXPECT_NEAR(p.y, -459.69769413186023, 1e-8);
    EXPECT_DOUBLE_EQ(p.hdg, -1.0);
}

TEST(PlanViewEndPose, ZeroCurvatureArcRejected) {
    GeometrySegment seg;
    seg.shape = GeometrySegment::Shape::arc;
    seg.curvature = 0.0;
    seg.length = 100.0;
    EXPECT_THROW(plan_view_end_pose(seg), std::invalid_argument);
}

TEST(PlanViewEndPose, AgreesWithRk4OverTheParameterRange) {
    std::mt19937_64 rng(31);
    auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };
    for (int i = 0; i < 300; ++i) {
        GeometrySegment seg;
        seg.shape = GeometrySegment::Shape::arc;
        const double radius = uniform(900.0, 10000.0);
        seg.curvature = (rng() % 2 == 0 ? 1.0 : -1.0) / radius;
        seg.length = uniform(100.0, 2000.0);
        const Pose2 p = plan_view_end_pose(seg);
        const Pose2 oracle = rk4_end_pose(seg.curvature, seg.length);
        EXPECT_NEAR(p.x, oracle.x, 1e-6);
        EXPECT_NEAR(p.y, oracle.y, 1e-6);
        EXPECT_NEAR(p.hdg, oracle.hdg, 1e-9);
    }
}

TEST(ElevationPolys, CrestPiecesMatchFrozenValues) {
    const auto polys = elevation_polys(ElevationKind::crest, 0.02, -0.02, 13000.0, 260.0, 1000.0);
    ASSERT_EQ(polys.size(), 3u);
    EXPECT_DOUBLE_EQ(polys[0].s0, 0.0);
    EXPECT_DOUBLE_EQ(polys[0].b, 0.02);
    EXPECT_DOUBLE_EQ(polys[1].s0, 240.0);
    EXPECT_NEAR(polys[1].c, -3.8461538461538463e-05, 1e-18);
    EXPECT_DOUBLE_EQ(polys[2].s0, 760.0);
    EXPECT_DOUBLE_EQ(polys[2].b, -0.02);
    // slope at the end of the parabola equals the exit tilt
    EXPECT_NEAR(polys[1].slope_at(520.0), -0.02, 1e-12);
}

TEST(ElevationPolys, SagMatchesDefineRule) {
    const double T = 10000.0 * std::abs(-0.02 - 0.02) / 2.0;
    EXPECT_DOUBLE_EQ(T, 200.0);
    const auto polys = elevation_polys(ElevationKind::sag, -0.02, 0.02, 10000.0, T, 1000.0);
    ASSERT_EQ(polys.size(), 3u);
    EXPECT_DOUBLE_EQ(polys[1].c, 5.0e-05);
    EXPECT_NEAR(polys[1].slope_at(2.0 * T), 0.02, 1e-12);
}

TEST(ElevationPolys, PlaneIsSingleFlatPiece) {
    const auto polys = elevation_polys(ElevationKind::plane, 0.0, 0.0, 0.0, 0.0, 1250.0);
    ASSERT_EQ(polys.size(), 1u);
    EXPECT_EQ(polys[0], (ElevationPoly{0.0, 0.0, 0.0, 0.0, 0.0}));
}

TEST(ElevationPolys, FullSectionCurveDropsGradePieces) {
    // 2T == L: the parabola spans the whole section.
    const auto polys = elevation_polys(ElevationKind::crest, 0.02, -0.02, 31250.0, 625.0, 1250.0);
    ASSERT_EQ(polys.size(), 1u);
    EXPECT_DOUBLE_EQ(polys[0].s0, 0.0);
    EXPECT_DOUBLE_EQ(polys[0].b, 0.02);
}

TEST(ElevationPolys, OversizedCurveRejected) {
    EXPECT_THROW(elevation_polys(ElevationKind::crest, 0.02, -0.02, 50000.0, 1000.0, 1000.0),
                 std::invalid_argument);
}

TEST(ElevationPolys, PiecewiseC1Continuity) {
    std::mt19937_64 rng(37);
    auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };
    for (int i = 0; i < 500; ++i) {
        const bool crest = rng() % 2 == 0;
        const double s1 = uniform(0.01, 0.04) * (crest ? 1.0 : -1.0);
        const double s2 = -s1 * uniform(0.5, 1.0) - (crest ? 0.01 : -0.01);
        const double radius = uniform(crest ? 13000.0 : 8800.0, 50000.0);
        const double T = radius * std::abs(s1 - s2) / 2.0;
        const double L = 2.0 * T + uniform(0.0, 500.0);
        const auto polys =
            elevation_polys(crest ? ElevationKind::crest : ElevationKind::sag, s1, s2, radius, T, L);
        for (size_t k = 0; k + 1 < polys.size(); ++k) {
            const double ds = polys[k + 1].s0 - polys[k].s0;
            EXPECT_NEAR(polys[k].value_at(ds), polys[k + 1].a, 1e-9);
            EXPECT_NEAR(polys[k].slope_at(ds), polys[k + 1].b, 1e-9);
        }
        // exit slope equals s2
        const auto& parabola = polys[polys.size() == 1 ? 0 : 1];
        EXPECT_NEAR(parabola.slope_at(2.0 * T), s2, 1e-9);
    }
}

FunctionalScenario parse_or_die(const std::string& text) {
    ParseResult r = parse_functional_scenario(text);
    EXPECT_TRUE(r.ok());
    return *r.scenario;
}

TEST(BuildRoadIr, StraightPlaneRoad) {
    const DetailedScenario d = detail_scenario(parse_or_die("road lanes 2\nactor A1 car lane 1 slot 0\n"));
    ConcreteValuation v = assign_defaults(d.space);
    const RoadNetworkIR ir = build_road_ir(d.space, v);
    EXPECT_DOUBLE_EQ(ir.length, 1250.0);
    ASSERT_EQ(ir.plan_view.size(), 1u);
    EXPECT_EQ(ir.plan_view[0].shape, GeometrySegment::Shape::line);
    ASSERT_EQ(ir.elevation.size(), 1u);
    EXPECT_EQ(ir.elevation[0], (ElevationPoly{0.0, 0.0, 0.0, 0.0, 0.0}));
    ASSERT_EQ(ir.lane_sections.size(), 1u);
    ASSERT_EQ(ir.lane_sections[0].right.size(), 2u);
    EXPECT_EQ(ir.lane_sections[0].right[0].id, -1);
    EXPECT_EQ(ir.lane_sections[0].right[1].id, -2);
    EXPECT_TRUE(ir.signals.empty());
    EXPECT_TRUE(ir.objects.empty());
}

TEST(BuildRoadIr, CurveRightHasNegativeCurvature) {
    const DetailedScenario d = detail_scenario(parse_or_die(
        "road lanes 2\nroad alignment curve_right\nactor A1 car lane 1 slot 0\n"));
    ConcreteValuation v = assign_defaults(d.space);
    v.values["road.R_h"] = 1000.0;
    v.values["road.L"] = 1000.0;
    const RoadNetworkIR ir = build_road_ir(d.space, v);
    ASSERT_EQ(ir.plan_view.size(), 1u);
    EXPECT_EQ(ir.plan_view[0].shape, GeometrySegment::Shape::arc);
    EXPECT_DOUBLE_EQ(ir.plan_view[0].curvature, -0.001);
}

TEST(BuildRoadIr, DeclineIsLinearGrade) {
    const DetailedScenario d = detail_scenario(parse_or_die(
        "road lanes 2\nroad elevation decline\nactor A1 car lane 1 slot 0\n"));
    ConcreteValuation v = assign_defaults(d.space);
    v.values["road.s1"] = -0.02;
    v.values["road.L"] = 1000.0;
    const RoadNetworkIR ir = build_road_ir(d.space, v);
    ASSERT_EQ(ir.elevation.size(), 1u);
    EXPECT_EQ(ir.elevation[0], (ElevationPoly{0.0, 0.0, -0.02, 0.0, 0.0}));
}

TEST(BuildRoadIr, CurveDeclineInventory) {
    const DetailedScenario d = detail_scenario(parse_or_die(
        "road lanes 3 hard_shoulder\n"
        "road alignment curve_right\n"
        "road elevation decline\n"
        "road speed_limit 120\n"
        "road guard_rail right\n"
        "actor A1 car lane 1 slot 0\n"
        "actor A2 car lane 1 slot 1\n"
        "start A1 approach of A2\n"));
    const ConcreteValuation v = assign_defaults(d.space);
    const RoadNetworkIR ir = build_road_ir(d.space, v);
    ASSERT_EQ(ir.plan_view.size(), 1u);
    EXPECT_EQ(ir.plan_view[0].shape, GeometrySegment::Shape::arc);
    EXPECT_LT(ir.plan_view[0].curvature, 0.0);
    ASSERT_EQ(ir.lane_sections.size(), 1u);
    ASSERT_EQ(ir.lane_sections[0].right.size(), 4u);  // 3 driving + shoulder
    EXPECT_EQ(ir.lane_sections[0].right[3].type, LaneType::shoulder);
    ASSERT_EQ(ir.signals.size(), 1u);
    EXPECT_EQ(ir.signals[0].type, "274");
    EXPECT_EQ(ir.signals[0].subtype, "120");
    ASSERT_EQ(ir.objects.size(), 1u);
    EXPECT_EQ(ir.objects[0].side, RailSide::right);
    EXPECT_LT(ir.objects[0].t, 0.0);
    EXPECT_DOUBLE_EQ(ir.objects[0].s_end, ir.length);
    // elevation realizes the decline tilt exactly
    EXPECT_DOUBLE_EQ(ir.elevation[0].b, v.values.at("road.s1"));
}

TEST(BuildRoadIr, SegmentsPartitionTheSection) {
    std::mt19937_64 rng(41);
    const char* variants[] = {
        "road lanes 2\nroad elevation crest\nactor A1 car lane 1 slot 0\n",
        "road lanes 3\nroad elevation sag\nroad alignment curve_left\nactor A1 car lane 1 slot 0\n",
    };
    for (const char* text : variants) {
        const DetailedScenario d = detail_scenario(parse_or_die(text));
        const auto samples = sample_concrete(d.space, rng(), 50);
        for (const auto& v : samples) {
            const RoadNetworkIR ir = build_road_ir(d.space, v);
            double s = 0.0;
            for (const auto& seg : ir.plan_view) {
                EXPECT_NEAR(seg.s0, s, 1e-9);
                s += seg.length;
            }
            EXPECT_NEAR(s, ir.length, 1e-9);
            EXPECT_DOUBLE_EQ(ir.elevation.front().s0, 0.0);
            for (size_t k = 0; k + 1 < ir.elevation.size(); ++k) {
                EXPECT_LT(ir.elevation[k].s0, ir.elevation[k + 1].s0);
                EXPECT_LT(ir.elevation[k + 1].s0, ir.length);
            }
        }
    }
}

}  // namespace
