#include "sforge/checker.hpp"

#include <gtest/gtest.h>

#include <random>

#include "sforge/detailing.hpp"
#include "sforge/dsl.hpp"
#include "sforge/valuation.hpp"

namespace {

using namespace sforge;

struct Compiled {
    FunctionalScenario fs;
    DetailedScenario detailed;
    ConcreteValuation valuation;
    RoadNetworkIR road;
    StoryboardIR storyboard;
};

Compiled compile(const std::string& text) {
    ParseResult r = parse_functional_scenario(text);
    EXPECT_TRUE(r.ok()) << (r.diagnostics.empty() ? "" : format_diagnostic(r.diagnostics.front()));
    Compiled c;
    c.fs = *r.scenario;
    c.detailed = detail_scenario(c.fs);
    c.valuation = assign_defaults(c.detailed.space);
    c.road = build_road_ir(c.detailed.space, c.valuation);
    c.storyboard = build_storyboard(c.detailed.timeline, c.detailed.space, c.valuation, c.road);
    return c;
}

Compiled compile_with(const std::string& text, const ValueMap& overrides) {
    ParseResult r = parse_functional_scenario(text);
    EXPECT_TRUE(r.ok());
    Compiled c;
    c.fs = *r.scenario;
    c.detailed = detail_scenario(c.fs);
    c.valuation = assign_defaults(c.detailed.space);
    for (const auto& [k, val] : overrides) c.valuation.values[k] = val;
    c.road = build_road_ir(c.detailed.space, c.valuation);
    c.storyboard = build_storyboard(c.detailed.timeline, c.detailed.space, c.valuation, c.road);
    return c;
}

const char* kCurveDecline =
    "road lanes 3 hard_shoulder\n"
    "road alignment curve_right\n"
    "road elevation decline\n"
    "road speed_limit 120\n"
    "road guard_rail right\n"
    "actor A1 car lane 1 slot 0\n"
    "actor A2 car lane 1 slot 1\n"
    "start A1 approach of A2\n";

TEST(Simulate, FollowLaneExitsRoadAtClosedFormTime) {
    const Compiled c = compile_with("road lanes 2\nactor ego car lane 1 slot 0\nstart ego follow_lane\n",
                                    {{"ego.v0", 30.0}});
    const Trace trace = simulate(c.storyboard, c.road, 0.02);
    ASSERT_FALSE(trace.empty());
    // start s = 625, v = 30, road length 1250: exit after 625/30 s
    EXPECT_NEAR(trace.t.back(), 625.0 / 30.0, 0.02);
    EXPECT_NEAR(trace.actors.at("ego").back().s, 1250.0, 1e-6);
    for (size_t i = 1; i < trace.t.size(); ++i) {
        EXPECT_GT(trace.t[i], trace.t[i - 1]);
        EXPECT_LE(trace.actors.at("ego")[i].s, 1250.0 + 1e-9);
    }
}

TEST(Simulate, ApproachGapDecreasesUntilTriggerThenStabilizes) {
    const Compiled c = compile(kCurveDecline);
    const Trace trace = simulate(c.storyboard, c.road, 0.02);
    ASSERT_FALSE(trace.empty());
    const double g_end = c.valuation.values.at("maneuver_A1.g_end");
    const auto& a1 = trace.actors.at("A1");
    const auto& a2 = trace.actors.at("A2");
    auto gap = [&](size_t i) { return a2[i].s - a1[i].s - 4.5; };

    size_t trigger_index = trace.t.size();
    for (size_t i = 0; i < trace.t.size(); ++i) {
        if (gap(i) < g_end) {
            trigger_index = i;
            break;
        }
    }
    ASSERT_LT(trigger_index, trace.t.size()) << "gap trigger never reached";
    for (size_t i = 1; i <= trigger_index; ++i) {
        EXPECT_LT(gap(i), gap(i - 1));
    }
    // after the ramp the gap must stay above the stabilization floor
    const double v_max = c.valuation.values.at("A1.v0");
    for (size_t i = trigger_index; i < trace.t.size(); ++i) {
        EXPECT_GE(gap(i), g_end - (v_max - a2[i].v) * (v_max - a2[i].v) / (2.0 * 2.0) - v_max * 0.02);
    }
    // and both vehicles end at the same speed
    EXPECT_NEAR(a1.back().v, a2.back().v, 1e-9);
}

TEST(Simulate, ZeroActorsGiveEmptyTrace) {
    StoryboardIR sb;
    RoadNetworkIR road;
    road.length = 1000.0;
    EXPECT_TRUE(simulate(sb, road).empty());
}

TEST(Simulate, RejectsBadTimeStep) {
    const Compiled c = compile("road lanes 2\nactor ego car lane 1 slot 0\n");
    EXPECT_THROW(simulate(c.storyboard, c.road, 0.0), std::invalid_argument);
    EXPECT_THROW(simulate(c.storyboard, c.road, 0.2), std::invalid_argument);
}

TEST(Simulate, DeterministicTraces) {
    const Compiled c = compile(kCurveDecline);
    const Trace a = simulate(c.storyboard, c.road, 0.02);
    const Trace b = simulate(c.storyboard, c.road, 0.02);
    EXPECT_EQ(a, b);  // bitwise-identical states
}

TEST(Simulate, HalvingTheStepBarelyMovesFinalPositions) {
    const char* scenarios[] = {
        kCurveDecline,
        "road lanes 3\nactor A1 car lane 2 slot 0\nstart A1 lane_change_left\n",
        "road lanes 2\nactor A1 car lane 1 slot 0\nactor A2 car lane 1 slot 2\nstart A1 follow_vehicle of A2\n",
    };
    for (const char* text : scenarios) {
        const Compiled c = compile(text);
        const Trace coarse = simulate(c.storyboard, c.road, 0.02);
        const Trace fine = simulate(c.storyboard, c.road, 0.01);
        for (const auto& [actor, samples] : coarse.actors) {
            EXPECT_NEAR(samples.back().s, fine.actors.at(actor).back().s, 0.5) << actor << " in " << text;
        }
    }
}

TEST(Conformance, CurveDeclineAnswersAllFourQuestions) {
    const Compiled c = compile(kCurveDecline);
    const Trace trace = simulate(c.storyboard, c.road, 0.02);
    const ConformanceReport report =
        check_conformance(trace, c.fs, c.storyboard, c.valuation.values.at("road.d_slot"));
    EXPECT_TRUE(report.start_ok);
    EXPECT_TRUE(report.maneuver_ok) << [&] {
        std::string all;
        for (const auto& [id, ac] : report.actors) all += id + ": " + ac.note + " ";
        return all;
    }();
    EXPECT_TRUE(report.no_crash);
    EXPECT_TRUE(report.end_ok);
    EXPECT_GE(report.min_gap, kCrashGap);
    EXPECT_GT(report.completion_time, 0.0);
}

TEST(Conformance, SwappedSpeedsBreakTheApproachSignature) {
    Compiled c = compile(kCurveDecline);
    // Violate the approach speed rule by swapping the two initial speeds.
    const double v1 = c.valuation.values.at("A1.v0");
    const double v2 = c.valuation.values.at("A2.v0");
    c.valuation.values["A1.v0"] = v2;
    c.valuation.values["A2.v0"] = v1;
    const StoryboardIR sb =
        build_storyboard(c.detailed.timeline, c.detailed.space, c.valuation, c.road);
    const Trace trace = simulate(sb, c.road, 0.02);
    const ConformanceReport report =
        check_conformance(trace, c.fs, sb, c.valuation.values.at("road.d_slot"));
    EXPECT_FALSE(report.maneuver_ok && report.no_crash);
    EXPECT_FALSE(report.actors.at("A1").maneuver_ok);
}

TEST(Conformance, StaticFollowLaneActorIsTriviallyConformant) {
    const Compiled c = compile("road lanes 2\nactor ego car lane 1 slot 0\nstart ego follow_lane\n");
    const Trace trace = simulate(c.storyboard, c.road, 0.02);
    const ConformanceReport report =
        check_conformance(trace, c.fs, c.storyboard, c.valuation.values.at("road.d_slot"));
    EXPECT_TRUE(report.all_ok());
    EXPECT_TRUE(std::isinf(report.min_gap));  // no same-lane pair
}

TEST(Conformance, LaneChangeSignature) {
    const Compiled c = compile("road lanes 3\nactor A1 car lane 2 slot 0\nstart A1 lane_change_left\n");
    const Trace trace = simulate(c.storyboard, c.road, 0.02);
    const ConformanceReport report =
        check_conformance(trace, c.fs, c.storyboard, c.valuation.values.at("road.d_slot"));
    EXPECT_TRUE(report.all_ok());
    EXPECT_EQ(trace.actors.at("A1").front().lane_id, -2);
    EXPECT_EQ(trace.actors.at("A1").back().lane_id, -1);
}

TEST(Conformance, FallBackSignature) {
    const Compiled c = compile(
        "road lanes 2\nactor A1 car lane 1 slot 0\nactor A2 car lane 1 slot 1\nstart A1 fall_back of A2\n");
    const Trace trace = simulate(c.storyboard, c.road, 0.02);
    const ConformanceReport report =
        check_conformance(trace, c.fs, c.storyboard, c.valuation.values.at("road.d_slot"));
    EXPECT_TRUE(report.all_ok()) << report.actors.at("A1").note;
}

TEST(Conformance, RuleConsistentValuationsNeverCrash) {
    // soundness link between the rule system and the kinematic checker
    const char* templates[] = {
        "road lanes 2\nactor A1 car lane 1 slot 0\nactor A2 car lane 1 slot 1\nstart A1 approach of A2\n",
        "road lanes 2\nactor A1 car lane 1 slot 0\nactor A2 truck lane 1 slot 1\nstart A1 follow_vehicle of A2\n",
        "road lanes 2\nactor A1 truck lane 1 slot 0\nactor A2 car lane 1 slot 1\nstart A1 fall_back of A2\n",
        "road lanes 3\nactor A1 car lane 2 slot 0\nactor A2 car lane 3 slot 2\nstart A1 lane_change_right\n",
    };
    std::uint64_t seed = 1234;
    for (const char* text : templates) {
        ParseResult r = parse_functional_scenario(text);
        ASSERT_TRUE(r.ok());
        const DetailedScenario d = detail_scenario(*r.scenario);
        const auto samples = sample_concrete(d.space, seed++, 200);
        for (const auto& v : samples) {
            const RoadNetworkIR road = build_road_ir(d.space, v);
            const StoryboardIR sb = build_storyboard(d.timeline, d.space, v, road);
            const Trace trace = simulate(sb, road, 0.02);
            const ConformanceReport report =
                check_conformance(trace, *r.scenario, sb, v.values.at("road.d_slot"));
            ASSERT_TRUE(report.no_crash)
                << text << " min_gap=" << report.min_gap << " seed-sample";
        }
    }
}

TEST(TraceCsv, RowPerSampleAndActor) {
    const Compiled c = compile("road lanes 2\nactor ego car lane 1 slot 0\n");
    const Trace trace = simulate(c.storyboard, c.road, 0.02);
    const std::string csv = trace_to_csv(trace);
    EXPECT_EQ(csv.rfind("t,actor,s,lane,v\n", 0), 0u);
    size_t rows = 0;
    for (char ch : csv) {
        if (ch == '\n') ++rows;
    }
    EXPECT_EQ(rows, trace.t.size() + 1);  // header + one actor per sample
    EXPECT_NE(csv.find(",ego,"), std::string::npos);
}

}  // namespace
