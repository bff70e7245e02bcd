#include "sforge/dsl.hpp"

#include <gtest/gtest.h>

#include <array>
#include <random>

#include "sforge/vocabulary.hpp"

#include "scenario_generators.hpp"

namespace {

using namespace sforge;

const char* kCurveDeclineScenario = R"(# three-lane freeway, curve with decline, speed limit, guard rail
scenario approach_curve_decline
road lanes 3 hard_shoulder
road alignment curve_right
road elevation decline
road speed_limit 120
road guard_rail right
env weather clear
env daytime midday
actor A1 car lane 1 slot 0
actor A2 car lane 1 slot 1
start A1 approach of A2
start A2 follow_lane
)";

TEST(DslParser, ParsesCurveDeclineScenario) {
    ParseResult r = parse_functional_scenario(kCurveDeclineScenario);
    ASSERT_TRUE(r.ok()) << format_diagnostic(r.diagnostics.empty() ? Diagnostic{} : r.diagnostics.front());
    const FunctionalScenario& fs = *r.scenario;
    EXPECT_EQ(fs.name, "approach_curve_decline");
    EXPECT_EQ(fs.road.n_driving_lanes, 3);
    EXPECT_TRUE(fs.road.hard_shoulder);
    EXPECT_EQ(fs.road.alignment, Alignment::curve_right);
    EXPECT_EQ(fs.road.elevation, ElevationKind::decline);
    ASSERT_TRUE(fs.road.speed_limit_kmh.has_value());
    EXPECT_EQ(*fs.road.speed_limit_kmh, 120);
    EXPECT_EQ(fs.road.guard_rail, std::set<RailSide>{RailSide::right});
    ASSERT_EQ(fs.actors.size(), 2u);
    EXPECT_EQ(fs.actors[0].id, "A1");
    EXPECT_EQ(fs.maneuver_of("A1").kind, ManeuverKind::approach);
    EXPECT_EQ(fs.maneuver_of("A1").target, "A2");
}

TEST(DslParser, MinimalScenarioIsValid) {
    ParseResult r = parse_functional_scenario(
        "road lanes 2\n"
        "actor ego car lane 1 slot 0\n"
        "start ego follow_lane\n"
        "end ego lane 1 slot 0\n");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.scenario->road.alignment, Alignment::straight);
    EXPECT_EQ(r.scenario->road.elevation, ElevationKind::plane);
    EXPECT_EQ(r.scenario->environment.weather, Weather::clear);
    EXPECT_FALSE(r.scenario->road.speed_limit_kmh.has_value());
    EXPECT_EQ(r.scenario->end_positions.at("ego"), (GridPosition{1, 0}));
}

TEST(DslParser, ApproachTargetBehindIsDiagnosed) {
    ParseResult r = parse_functional_scenario(
        "road lanes 2\n"
        "actor A1 car lane 1 slot 2\n"
        "actor A2 car lane 1 slot 0\n"
        "start A1 approach of A2\n");
    ASSERT_FALSE(r.ok());
    bool found = false;
    for (const auto& d : r.diagnostics) {
        if (d.code == "maneuver_target_not_ahead") {
            found = true;
            EXPECT_NE(d.message.find("must be ahead in same lane"), std::string::npos);
            EXPECT_EQ(d.line, 4);
        }
    }
    EXPECT_TRUE(found);
}

TEST(DslParser, UnknownKeywordCarriesLocation) {
    ParseResult r = parse_functional_scenario("road lanes 2\nactor A1 car lane 1 slot 0\nfnord x y\n");
    ASSERT_FALSE(r.ok());
    ASSERT_EQ(r.diagnostics.size(), 1u);
    EXPECT_EQ(r.diagnostics[0].code, "unknown_keyword");
    EXPECT_EQ(r.diagnostics[0].line, 3);
    EXPECT_EQ(r.diagnostics[0].column, 1);
}

TEST(DslParser, DuplicateActorIdRejected) {
    ParseResult r = parse_functional_scenario(
        "road lanes 2\n"
        "actor A1 car lane 1 slot 0\n"
        "actor A1 truck lane 2 slot 0\n");
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.diagnostics[0].code, "duplicate_actor_id");
    EXPECT_EQ(r.diagnostics[0].line, 3);
}

TEST(DslParser, SlotOutOfBoundsRejected) {
    ParseResult r = parse_functional_scenario("road lanes 2\nactor A1 car lane 1 slot 11\n");
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.diagnostics[0].code, "slot_out_of_bounds");
    EXPECT_EQ(r.diagnostics[0].line, 2);
}

TEST(DslParser, LaneIndexExceedingLaneCountRejected) {
    ParseResult r = parse_functional_scenario("road lanes 3\nactor A1 car lane 4 slot 0\n");
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.diagnostics[0].code, "lane_out_of_range");
}

TEST(DslParser, MissingManeuverTargetRejected) {
    ParseResult r = parse_functional_scenario(
        "road lanes 2\nactor A1 car lane 1 slot 0\nstart A1 approach\n");
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.diagnostics[0].code, "maneuver_target_missing");
}

TEST(DslParser, ParsingIsTotalOnGarbage) {
    EXPECT_NO_THROW({
        ParseResult r = parse_functional_scenario("\x01\x02 ### \n\n\"\nroad\nroad lanes\nactor\n");
        EXPECT_FALSE(r.ok());
        EXPECT_FALSE(r.diagnostics.empty());
    });
}

TEST(ValidateScenario, CleanScenarioHasNoDiagnostics) {
    ParseResult r = parse_functional_scenario(kCurveDeclineScenario);
    ASSERT_TRUE(r.ok());
    EXPECT_TRUE(validate_scenario(*r.scenario).empty());
}

TEST(ValidateScenario, DuplicateStartPositionDiagnosed) {
    FunctionalScenario fs;
    fs.road.n_driving_lanes = 3;
    fs.actors = {{"A1", VehicleType::car, {2, 0}}, {"A2", VehicleType::car, {2, 0}}};
    fs.start_maneuvers["A1"] = ManeuverSpec{};
    fs.start_maneuvers["A2"] = ManeuverSpec{};
    Diagnostics diags = validate_scenario(fs);
    ASSERT_EQ(diags.size(), 1u);
    EXPECT_EQ(diags[0].code, "duplicate_start_position");
}

TEST(ValidateScenario, LaneChangeFromLeftmostLaneInconsistent) {
    FunctionalScenario fs;
    fs.road.n_driving_lanes = 2;
    fs.actors = {{"A1", VehicleType::car, {2, 0}}};
    fs.start_maneuvers["A1"] = ManeuverSpec{ManeuverKind::lane_change_left, std::nullopt};
    fs.end_positions["A1"] = {2, 0};  // end unchanged
    Diagnostics diags = validate_scenario(fs);
    ASSERT_FALSE(diags.empty());
    EXPECT_EQ(diags[0].code, "end_scene_inconsistent");
    EXPECT_NE(diags[0].message.find("end scene inconsistent with maneuver"), std::string::npos);
}

TEST(ValidateScenario, OrderIndependent) {
    ParseResult r = parse_functional_scenario(kCurveDeclineScenario);
    ASSERT_TRUE(r.ok());
    FunctionalScenario reordered = *r.scenario;
    std::swap(reordered.actors[0], reordered.actors[1]);
    EXPECT_EQ(validate_scenario(*r.scenario).size(), validate_scenario(reordered).size());
}

TEST(PostStateOracle, ApproachEndsBehindTarget) {
    ParseResult r = parse_functional_scenario(kCurveDeclineScenario);
    ASSERT_TRUE(r.ok());
    auto post = maneuver_post_states(*r.scenario);
    EXPECT_EQ(post.at("A1").lane, 1);
    EXPECT_LT(post.at("A1").pos, post.at("A2").pos);
    EXPECT_GT(post.at("A1").pos, 0.0);  // moved closer than a full slot
}

TEST(PostStateOracle, LaneChangeMovesOneLane) {
    FunctionalScenario fs;
    fs.road.n_driving_lanes = 3;
    fs.actors = {{"A1", VehicleType::car, {2, 0}}};
    fs.start_maneuvers["A1"] = ManeuverSpec{ManeuverKind::lane_change_left, std::nullopt};
    auto post = maneuver_post_states(fs);
    EXPECT_EQ(post.at("A1").lane, 3);
    EXPECT_EQ(post.at("A1").pos, 0.0);
}

TEST(LayerMapping, SpotChecks) {
    EXPECT_EQ(layer_of("guard_rail"), LayerId::L2);
    EXPECT_EQ(layer_of("crest"), LayerId::L1);
    EXPECT_EQ(layer_of("rain"), LayerId::L5);
    EXPECT_EQ(layer_of("approach"), LayerId::L4);
    EXPECT_THROW(layer_of("roundabout"), std::invalid_argument);
}

TEST(LayerMapping, EveryKeywordHasExactlyOneLayer) {
    std::set<std::string_view> seen;
    for (const auto& e : kVocabulary) {
        EXPECT_TRUE(seen.insert(e.keyword).second) << e.keyword;
        EXPECT_NE(e.layer, LayerId::L3);  // freeway vocabulary leaves L3 unpopulated
    }
}

TEST(DslRoundTrip, ParseOfPrintIsIdentity) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        FunctionalScenario fs = testgen::random_scenario(rng);
        ParseResult r = parse_functional_scenario(print_functional_scenario(fs));
        ASSERT_TRUE(r.ok()) << print_functional_scenario(fs);
        EXPECT_EQ(*r.scenario, fs) << print_functional_scenario(fs);
    }
}

TEST(DslRoundTrip, PrintIsStableUnderReparse) {
    ParseResult r = parse_functional_scenario(kCurveDeclineScenario);
    ASSERT_TRUE(r.ok());
    const std::string canonical = print_functional_scenario(*r.scenario);
    ParseResult r2 = parse_functional_scenario(canonical);
    ASSERT_TRUE(r2.ok());
    EXPECT_EQ(print_functional_scenario(*r2.scenario), canonical);
}

}  // namespace
