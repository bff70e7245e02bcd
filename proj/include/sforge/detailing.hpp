#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sforge/config.hpp"
#include "sforge/parameter_space.hpp"
#include "sforge/scenario.hpp"
#include "sforge/timeline.hpp"

namespace sforge {

// Fixed quantities of the rule catalog. Speed surpluses are ~10 km/h, gaps
// and margins are sized so that every rule-consistent valuation stays
// collision-free under the kinematic checker.
inline constexpr double kSectionLengthLo = 500.0, kSectionLengthHi = 2000.0;
inline constexpr double kSlotSpacingLo = 30.0, kSlotSpacingHi = 150.0;
inline constexpr double kCurveRadiusLo = 900.0, kCurveRadiusHi = 10000.0;
inline constexpr double kTiltLo = 0.01, kTiltHi = 0.04;
inline constexpr double kCrestRadiusLo = 13000.0, kCrestRadiusHi = 50000.0;
inline constexpr double kSagRadiusLo = 8800.0, kSagRadiusHi = 50000.0;
inline constexpr double kDrivingWidthLo = 3.25, kDrivingWidthHi = 3.75;
inline constexpr double kShoulderWidthLo = 2.0, kShoulderWidthHi = 3.0;
inline constexpr double kSpeedSurplus = 2.78;        // m/s, approach/fall_back ordering margin
inline constexpr double kMinStartGap = 50.0;         // m, center-to-center per slot pair
inline constexpr double kApproachGapLo = 20.0, kApproachGapHi = 60.0;
inline constexpr double kFallBackGapLo = 40.0, kFallBackGapHi = 250.0;
inline constexpr double kMatchRate = 2.0;            // m/s2, speed ramp used by triggers and checker
inline constexpr double kLaneChangeTriggerLo = 10.0, kLaneChangeTriggerHi = 100.0;
inline constexpr double kLaneChangeDurationLo = 3.0, kLaneChangeDurationHi = 6.0;
inline constexpr double kLateralRateCap = 1.4;       // m/s
inline constexpr double kNominalLaneWidth = 3.5;     // m, lateral-rate reference width
inline constexpr double kFogVisibilityLo = 100.0, kFogVisibilityHi = 1000.0;
inline constexpr double kRainIntensityLo = 0.1, kRainIntensityHi = 1.0;
inline constexpr double kTriggerGapMargin = 10.0;    // m between start gap and trigger threshold
inline constexpr double kBrakeMargin = 15.0;         // m kept after the speed-match ramp
inline constexpr double kGridFitMargin = 10.0;       // m kept between outermost slot and section end
inline constexpr double kLaneChangeFitMargin = 20.0; // m kept after a lane change completes

struct DetailedScenario {
    ParameterSpace space;
    EventTimeline timeline;

    bool operator==(const DetailedScenario&) const = default;
};

struct DetailingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string lane_object_id(int grid_lane) { return "lane_" + std::to_string(grid_lane); }
inline std::string maneuver_object_id(const std::string& actor) { return "maneuver_" + actor; }

// ---------------------------------------------------------------------------
// Keyword expansion: layers 1 and 2 plus the environment object.

// Emits the road_section node (alignment and elevation parameters included),
// one node per lane, signal and guard-rail nodes, and the single-object
// dependency rules of the elevation profile.
inline void expand_road_keywords(const RoadSpec& road, ParameterSpace& ps) {
    ObjectNode section;
    section.id = "road";
    section.kind = ObjectKind::road_section;
    section.layer = LayerId::L1;
    section.attrs["alignment"] = std::string(to_keyword(road.alignment));
    section.attrs["elevation"] = std::string(to_keyword(road.elevation));
    section.parameters.push_back({"L", UnitTag::meter, Interval{kSectionLengthLo, kSectionLengthHi}, false, ""});
    section.parameters.push_back({"d_slot", UnitTag::meter, Interval{kSlotSpacingLo, kSlotSpacingHi}, false, ""});
    if (road.alignment != Alignment::straight) {
        section.parameters.push_back(
            {"R_h", UnitTag::meter, Interval{kCurveRadiusLo, kCurveRadiusHi}, false, ""});
    }
    const std::string elev = std::string(to_keyword(road.elevation));
    switch (road.elevation) {
        case ElevationKind::plane:
            section.parameters.push_back({"s1", UnitTag::unitless, Interval{0.0, 0.0}, false, ""});
            break;
        case ElevationKind::incline:
            section.parameters.push_back({"s1", UnitTag::unitless, Interval{kTiltLo, kTiltHi}, false, ""});
            break;
        case ElevationKind::decline:
            section.parameters.push_back({"s1", UnitTag::unitless, Interval{-kTiltHi, -kTiltLo}, false, ""});
            break;
        case ElevationKind::crest:
        case ElevationKind::sag: {
            const bool crest = road.elevation == ElevationKind::crest;
            section.parameters.push_back({"s1", UnitTag::unitless,
                                          crest ? Interval{kTiltLo, kTiltHi} : Interval{-kTiltHi, -kTiltLo},
                                          false, ""});
            section.parameters.push_back({"s2", UnitTag::unitless,
                                          crest ? Interval{-kTiltHi, -kTiltLo} : Interval{kTiltLo, kTiltHi},
                                          false, ""});
            section.parameters.push_back({"R", UnitTag::meter,
                                          crest ? Interval{kCrestRadiusLo, kCrestRadiusHi}
                                                : Interval{kSagRadiusLo, kSagRadiusHi},
                                          false, ""});
            section.parameters.push_back(
                {"T", UnitTag::meter, Interval{0.0, 2000.0}, true, elev + ".T"});
            break;
        }
    }
    ps.objects.push_back(std::move(section));

    if (road.elevation == ElevationKind::crest || road.elevation == ElevationKind::sag) {
        ps.rules.push_back(make_define_rule(
            elev + ".T", {"road", "T"},
            Expr::param("road", "R") * abs(Expr::param("road", "s1") - Expr::param("road", "s2")) /
                Expr::lit(2.0)));
        ps.relations.push_back({RelationKind::parameter_dependency, {"road"}, std::nullopt, elev + ".T"});
        ps.rules.push_back(make_check_rule(elev + ".fit", Expr::lit(2.0) * Expr::param("road", "T"), Cmp::le,
                                           Expr::param("road", "L")));
        ps.relations.push_back({RelationKind::parameter_dependency, {"road"}, std::nullopt, elev + ".fit"});
    }

    if (road.hard_shoulder) {
        ObjectNode shoulder;
        shoulder.id = "lane_shoulder";
        shoulder.kind = ObjectKind::lane;
        shoulder.layer = LayerId::L1;
        shoulder.attrs["type"] = "shoulder";
        shoulder.attrs["index"] = "0";
        shoulder.parameters.push_back(
            {"w", UnitTag::meter, Interval{kShoulderWidthLo, kShoulderWidthHi}, false, ""});
        ps.objects.push_back(std::move(shoulder));
    }
    for (int i = 1; i <= road.n_driving_lanes; ++i) {
        ObjectNode lane;
        lane.id = lane_object_id(i);
        lane.kind = ObjectKind::lane;
        lane.layer = LayerId::L1;
        lane.attrs["type"] = "driving";
        lane.attrs["index"] = std::to_string(i);
        lane.parameters.push_back({"w", UnitTag::meter, Interval{kDrivingWidthLo, kDrivingWidthHi}, false, ""});
        ps.objects.push_back(std::move(lane));
    }

    // Placements live as section fractions; the absolute position is derived,
    // so it sits inside [0, L] by construction.
    auto add_placed_object = [&ps](ObjectNode node, const std::string& rule_id) {
        const std::string id = node.id;
        node.parameters.push_back({"s_frac", UnitTag::unitless, Interval{0.0, 1.0}, false, ""});
        node.parameters.push_back({"s_pos", UnitTag::meter, Interval{0.0, kSectionLengthHi}, true, rule_id});
        ps.objects.push_back(std::move(node));
        ps.rules.push_back(make_define_rule(rule_id, {id, "s_pos"},
                                            Expr::param(id, "s_frac") * Expr::param("road", "L")));
        ps.relations.push_back({RelationKind::object_dependency, {id, "road"}, std::nullopt, rule_id});
    };
    if (road.speed_limit_kmh) {
        ObjectNode signal;
        signal.id = "signal_speed_limit";
        signal.kind = ObjectKind::signal;
        signal.layer = LayerId::L2;
        signal.attrs["limit_kmh"] = std::to_string(*road.speed_limit_kmh);
        add_placed_object(std::move(signal), "signal.position");
    }
    for (RailSide side : road.guard_rail) {
        ObjectNode rail;
        rail.id = side == RailSide::left ? "guard_rail_left" : "guard_rail_right";
        rail.kind = ObjectKind::guard_rail;
        rail.layer = LayerId::L2;
        rail.attrs["side"] = std::string(to_keyword(side));
        add_placed_object(std::move(rail), "guard_rail.position." + std::string(to_keyword(side)));
    }
}

// Environment node (layer 5). Weather and daytime stay structural; fog and
// rain contribute the parameters the scenario format exposes for them.
inline void expand_environment_keywords(const EnvironmentSpec& env, ParameterSpace& ps) {
    ObjectNode node;
    node.id = "environment";
    node.kind = ObjectKind::environment;
    node.layer = LayerId::L5;
    node.attrs["weather"] = std::string(to_keyword(env.weather));
    node.attrs["daytime"] = std::string(to_keyword(env.daytime));
    if (env.weather == Weather::fog) {
        node.parameters.push_back(
            {"visibility", UnitTag::meter, Interval{kFogVisibilityLo, kFogVisibilityHi}, false, ""});
    }
    if (env.weather == Weather::rain) {
        node.parameters.push_back({"precipitation_intensity", UnitTag::unitless,
                                   Interval{kRainIntensityLo, kRainIntensityHi}, false, ""});
    }
    ps.objects.push_back(std::move(node));
}

// ---------------------------------------------------------------------------
// Relations

// Arrangement relations mirror the functional scenario directly: lane-to-
// section membership, the left_neighbor chain over lanes, vehicle placement
// and the slot ordering of the start grid.
inline std::vector<Relation> derive_arrangement_relations(const FunctionalScenario& fs) {
    std::vector<Relation> out;
    std::vector<std::string> lane_chain;  // rightmost first
    if (fs.road.hard_shoulder) lane_chain.push_back("lane_shoulder");
    for (int i = 1; i <= fs.road.n_driving_lanes; ++i) lane_chain.push_back(lane_object_id(i));

    for (const auto& lane : lane_chain) {
        out.push_back({RelationKind::arrangement, {lane, "road"}, ArrangementLabel::lane_of, ""});
    }
    for (size_t i = 0; i + 1 < lane_chain.size(); ++i) {
        out.push_back(
            {RelationKind::arrangement, {lane_chain[i], lane_chain[i + 1]}, ArrangementLabel::left_neighbor, ""});
    }
    for (const auto& a : fs.actors) {
        out.push_back(
            {RelationKind::arrangement, {a.id, lane_object_id(a.start.lane)}, ArrangementLabel::positioned_on, ""});
    }
    for (const auto& front : fs.actors) {
        for (const auto& rear : fs.actors) {
            if (front.start.slot > rear.start.slot) {
                out.push_back({RelationKind::arrangement, {front.id, rear.id}, ArrangementLabel::ahead_of, ""});
            }
        }
    }
    return out;
}

namespace detailing_detail {

inline Expr lit(double v) { return Expr::lit(v); }

inline void add_rule(ParameterSpace& ps, RelationKind kind, std::vector<std::string> endpoints,
                     ConstraintRule rule) {
    ps.relations.push_back({kind, std::move(endpoints), std::nullopt, rule.id});
    ps.rules.push_back(std::move(rule));
}

}  // namespace detailing_detail

// Object-dependency rules: maneuver speed orderings, trigger-gap
// compatibility, braking feasibility, start-grid gaps and grid fit.
inline void derive_object_dependencies(const FunctionalScenario& fs, const ForgeConfig& config,
                                       ParameterSpace& ps) {
    using detailing_detail::add_rule;
    using detailing_detail::lit;

    // Start-gap rules per same-lane consecutive pair: gap = d_slot * dslot.
    for (int lane = 1; lane <= fs.road.n_driving_lanes; ++lane) {
        std::vector<const ActorSpec*> in_lane;
        for (const auto& a : fs.actors) {
            if (a.start.lane == lane) in_lane.push_back(&a);
        }
        std::sort(in_lane.begin(), in_lane.end(),
                  [](const ActorSpec* x, const ActorSpec* y) { return x->start.slot < y->start.slot; });
        for (size_t i = 0; i + 1 < in_lane.size(); ++i) {
            const ActorSpec* rear = in_lane[i];
            const ActorSpec* front = in_lane[i + 1];
            const int dslot = front->start.slot - rear->start.slot;
            add_rule(ps, RelationKind::object_dependency, {rear->id, front->id, "road"},
                     make_check_rule("grid.start_gap." + rear->id + "." + front->id,
                                     Expr::param("road", "d_slot") * lit(dslot), Cmp::ge, lit(kMinStartGap)));
        }
    }

    // Grid fit: the outermost occupied slot stays inside the section with a
    // margin; the grid origin sits at mid-section.
    int max_abs_slot = 0;
    for (const auto& a : fs.actors) max_abs_slot = std::max(max_abs_slot, std::abs(a.start.slot));
    if (max_abs_slot > 0) {
        add_rule(ps, RelationKind::object_dependency, {"road"},
                 make_check_rule("grid.fit",
                                 Expr::param("road", "d_slot") * lit(max_abs_slot) + lit(kGridFitMargin),
                                 Cmp::le, Expr::param("road", "L") / lit(2.0)));
    }

    // Maneuver speed rules.
    for (const auto& a : fs.actors) {
        const ManeuverSpec m = fs.maneuver_of(a.id);
        if (!m.target) continue;
        const ActorSpec* target = fs.find_actor(*m.target);
        const std::string mid = maneuver_object_id(a.id);
        const double half_len_sum =
            (config.vehicle(a.vehicle_type).length + config.vehicle(target->vehicle_type).length) / 2.0;
        const int dslot = target->start.slot - a.start.slot;
        // Bumper gap at t=0 in terms of grid spacing.
        const Expr start_bumper_gap =
            Expr::param("road", "d_slot") * lit(dslot) - lit(half_len_sum);

        switch (m.kind) {
            case ManeuverKind::approach: {
                add_rule(ps, RelationKind::object_dependency, {a.id, target->id},
                         make_check_rule("approach.speed." + a.id, Expr::param(a.id, "v0"), Cmp::ge,
                                         Expr::param(target->id, "v0") + lit(kSpeedSurplus)));
                // The gap trigger must sit below the start gap...
                add_rule(ps, RelationKind::object_dependency, {mid, a.id, target->id, "road"},
                         make_check_rule("approach.trigger_gap." + a.id,
                                         Expr::param(mid, "g_end") + lit(kTriggerGapMargin), Cmp::le,
                                         start_bumper_gap));
                // ...and above the distance the speed-match ramp consumes.
                const Expr dv = Expr::param(a.id, "v0") - Expr::param(target->id, "v0");
                add_rule(ps, RelationKind::object_dependency, {mid, a.id, target->id},
                         make_check_rule("approach.brake_margin." + a.id, Expr::param(mid, "g_end"), Cmp::ge,
                                         dv * dv / (lit(2.0) * Expr::param(mid, "a_match")) +
                                             lit(kBrakeMargin)));
                // The closure must complete before the target leaves the section.
                const Expr remaining =
                    Expr::param("road", "L") / lit(2.0) -
                    Expr::param("road", "d_slot") * lit(target->start.slot) - lit(kLaneChangeFitMargin);
                add_rule(ps, RelationKind::object_dependency, {mid, a.id, target->id, "road"},
                         make_check_rule("approach.completion." + a.id,
                                         (start_bumper_gap - Expr::param(mid, "g_end")) *
                                             Expr::param(target->id, "v0"),
                                         Cmp::le, dv * remaining));
                break;
            }
            case ManeuverKind::fall_back: {
                add_rule(ps, RelationKind::object_dependency, {a.id, target->id},
                         make_check_rule("fall_back.speed." + a.id,
                                         Expr::param(a.id, "v0") + lit(kSpeedSurplus), Cmp::le,
                                         Expr::param(target->id, "v0")));
                add_rule(ps, RelationKind::object_dependency, {mid, a.id, target->id, "road"},
                         make_check_rule("fall_back.trigger_gap." + a.id, Expr::param(mid, "g_fb"), Cmp::ge,
                                         start_bumper_gap + lit(kTriggerGapMargin)));
                // The gap must open up to the trigger before the faster
                // front vehicle leaves the section.
                const Expr dv = Expr::param(target->id, "v0") - Expr::param(a.id, "v0");
                const Expr remaining =
                    Expr::param("road", "L") / lit(2.0) -
                    Expr::param("road", "d_slot") * lit(target->start.slot) - lit(kLaneChangeFitMargin);
                add_rule(ps, RelationKind::object_dependency, {mid, a.id, target->id, "road"},
                         make_check_rule("fall_back.completion." + a.id,
                                         (Expr::param(mid, "g_fb") - start_bumper_gap) *
                                             Expr::param(target->id, "v0"),
                                         Cmp::le, dv * remaining));
                break;
            }
            case ManeuverKind::follow_vehicle: {
                // Steady state: equal speeds keep the gap constant. Emitted
                // as a define so the follower's speed is the derived one.
                add_rule(ps, RelationKind::object_dependency, {a.id, target->id},
                         make_define_rule("follow_vehicle.speed." + a.id, {a.id, "v0"},
                                          Expr::param(target->id, "v0")));
                add_rule(ps, RelationKind::object_dependency, {mid, "road"},
                         make_define_rule("follow_vehicle.gap." + a.id, {mid, "g_follow"},
                                          start_bumper_gap));
                break;
            }
            default:
                break;
        }
    }

    // Lane-change fit: trigger distance plus the distance traveled during the
    // change stays inside the section.
    for (const auto& a : fs.actors) {
        const ManeuverSpec m = fs.maneuver_of(a.id);
        if (m.kind != ManeuverKind::lane_change_left && m.kind != ManeuverKind::lane_change_right) continue;
        const std::string mid = maneuver_object_id(a.id);
        add_rule(ps, RelationKind::object_dependency, {mid, a.id, "road"},
                 make_check_rule("lane_change.fit." + a.id,
                                 Expr::param("road", "d_slot") * lit(a.start.slot) +
                                     Expr::param(mid, "d_trigger") +
                                     Expr::param(a.id, "v0") * Expr::param(mid, "d_lc") +
                                     lit(kLaneChangeFitMargin),
                                 Cmp::le, Expr::param("road", "L") / lit(2.0)));
    }
}

// Lane-width continuity across successive segments of one lane. A single
// road section has no segment boundary, so compiled scenarios get none of
// these; the generator stays for multi-section roads.
inline void derive_width_continuity_rules(const std::vector<std::pair<std::string, std::string>>& segments,
                                          ParameterSpace& ps) {
    for (const auto& [prev, next] : segments) {
        detailing_detail::add_rule(ps, RelationKind::object_dependency, {prev, next},
                                   make_check_rule("lane_width.continuity." + prev + "." + next,
                                                   Expr::param(prev, "w_end"), Cmp::eq,
                                                   Expr::param(next, "w_start")));
    }
}

// Vehicle nodes (layer 4) with initial-speed ranges, tightened by a posted
// speed limit; maneuver nodes with their parameters and single-object rules.
inline void expand_actor_keywords(const FunctionalScenario& fs, const ForgeConfig& config,
                                  ParameterSpace& ps) {
    for (const auto& a : fs.actors) {
        const VehicleClassSpec& cls = config.vehicle(a.vehicle_type);
        Interval v0 = cls.initial_speed;
        if (fs.road.speed_limit_kmh) {
            v0.hi = std::min(v0.hi, *fs.road.speed_limit_kmh / 3.6);
        }
        const ManeuverSpec m = fs.maneuver_of(a.id);
        const bool speed_derived = m.kind == ManeuverKind::follow_vehicle;
        ObjectNode vehicle;
        vehicle.id = a.id;
        vehicle.kind = ObjectKind::vehicle;
        vehicle.layer = LayerId::L4;
        vehicle.attrs["vehicle_type"] = std::string(to_keyword(a.vehicle_type));
        vehicle.attrs["lane"] = std::to_string(a.start.lane);
        vehicle.attrs["slot"] = std::to_string(a.start.slot);
        vehicle.attrs["maneuver"] = std::string(to_keyword(m.kind));
        if (m.target) vehicle.attrs["target"] = *m.target;
        vehicle.parameters.push_back({"v0", UnitTag::meter_per_second, v0, speed_derived,
                                      speed_derived ? "follow_vehicle.speed." + a.id : ""});
        ps.objects.push_back(std::move(vehicle));
    }

    for (const auto& a : fs.actors) {
        const ManeuverSpec m = fs.maneuver_of(a.id);
        if (m.kind == ManeuverKind::follow_lane) continue;  // following a lane adds no parameters
        ObjectNode node;
        node.id = maneuver_object_id(a.id);
        node.kind = ObjectKind::maneuver_event;
        node.layer = LayerId::L4;
        switch (m.kind) {
            case ManeuverKind::approach:
                node.parameters.push_back(
                    {"g_end", UnitTag::meter, Interval{kApproachGapLo, kApproachGapHi}, false, ""});
                node.parameters.push_back(
                    {"a_match", UnitTag::meter_per_second2, Interval{kMatchRate, kMatchRate}, false, ""});
                break;
            case ManeuverKind::fall_back:
                node.parameters.push_back(
                    {"g_fb", UnitTag::meter, Interval{kFallBackGapLo, kFallBackGapHi}, false, ""});
                node.parameters.push_back(
                    {"a_match", UnitTag::meter_per_second2, Interval{kMatchRate, kMatchRate}, false, ""});
                break;
            case ManeuverKind::follow_vehicle:
                node.parameters.push_back({"g_follow", UnitTag::meter, Interval{0.0, 3000.0}, true,
                                           "follow_vehicle.gap." + a.id});
                break;
            case ManeuverKind::lane_change_left:
            case ManeuverKind::lane_change_right:
                node.parameters.push_back({"d_trigger", UnitTag::meter,
                                           Interval{kLaneChangeTriggerLo, kLaneChangeTriggerHi}, false, ""});
                node.parameters.push_back({"d_lc", UnitTag::second,
                                           Interval{kLaneChangeDurationLo, kLaneChangeDurationHi}, false, ""});
                node.parameters.push_back({"lat_rate", UnitTag::meter_per_second, Interval{0.0, 2.0}, true,
                                           "lane_change.rate." + a.id});
                break;
            default:
                break;
        }
        ps.objects.push_back(std::move(node));
    }
}

// Single-object define/check rules of the maneuver nodes.
inline void derive_parameter_dependencies(const FunctionalScenario& fs, ParameterSpace& ps) {
    using detailing_detail::add_rule;
    for (const auto& a : fs.actors) {
        const ManeuverSpec m = fs.maneuver_of(a.id);
        if (m.kind != ManeuverKind::lane_change_left && m.kind != ManeuverKind::lane_change_right) continue;
        const std::string mid = maneuver_object_id(a.id);
        add_rule(ps, RelationKind::parameter_dependency, {mid},
                 make_define_rule("lane_change.rate." + a.id, {mid, "lat_rate"},
                                  Expr::lit(kNominalLaneWidth) / Expr::param(mid, "d_lc")));
        add_rule(ps, RelationKind::parameter_dependency, {mid},
                 make_check_rule("lane_change.rate_limit." + a.id, Expr::param(mid, "lat_rate"), Cmp::le,
                                 Expr::lit(kLateralRateCap)));
    }
}

// ---------------------------------------------------------------------------
// Maneuver expansion into the event-based representation.

inline EventTimeline expand_maneuvers(const FunctionalScenario& fs, const ParameterSpace& ps) {
    EventTimeline timeline;
    for (const auto& a : fs.actors) {
        const ManeuverSpec m = fs.maneuver_of(a.id);
        const std::string mid = maneuver_object_id(a.id);
        Act act;
        act.actor = a.id;
        switch (m.kind) {
            case ManeuverKind::follow_lane: {
                Event hold;
                hold.name = a.id + ".hold";
                hold.trigger = {Trigger::Kind::at_time, 0.0, "", "", {}};
                hold.action.kind = Action::Kind::hold_lane;
                act.events.push_back(std::move(hold));
                break;
            }
            case ManeuverKind::approach: {
                Event initial;
                initial.name = a.id + ".initial_speed";
                initial.trigger = {Trigger::Kind::at_time, 0.0, "", "", {}};
                initial.action.kind = Action::Kind::set_speed;
                initial.action.speed = {a.id, "v0"};
                initial.action.rate = {mid, "a_match"};
                act.events.push_back(std::move(initial));

                Event match;
                match.name = a.id + ".match_speed";
                match.trigger = {Trigger::Kind::gap_below, 0.0, a.id, *m.target, {mid, "g_end"}};
                match.action.kind = Action::Kind::set_speed;
                match.action.speed = {*m.target, "v0"};
                match.action.rate = {mid, "a_match"};
                act.events.push_back(std::move(match));
                break;
            }
            case ManeuverKind::fall_back: {
                Event initial;
                initial.name = a.id + ".initial_speed";
                initial.trigger = {Trigger::Kind::at_time, 0.0, "", "", {}};
                initial.action.kind = Action::Kind::set_speed;
                initial.action.speed = {a.id, "v0"};
                initial.action.rate = {mid, "a_match"};
                act.events.push_back(std::move(initial));

                Event match;
                match.name = a.id + ".match_speed";
                match.trigger = {Trigger::Kind::gap_above, 0.0, a.id, *m.target, {mid, "g_fb"}};
                match.action.kind = Action::Kind::set_speed;
                match.action.speed = {*m.target, "v0"};
                match.action.rate = {mid, "a_match"};
                act.events.push_back(std::move(match));
                break;
            }
            case ManeuverKind::follow_vehicle: {
                Event hold;
                hold.name = a.id + ".hold_gap";
                hold.trigger = {Trigger::Kind::at_time, 0.0, "", "", {}};
                hold.action.kind = Action::Kind::hold_gap;
                hold.action.gap = {mid, "g_follow"};
                hold.action.gap_target = *m.target;
                act.events.push_back(std::move(hold));
                break;
            }
            case ManeuverKind::lane_change_left:
            case ManeuverKind::lane_change_right: {
                Event change;
                change.name = a.id + ".change_lane";
                change.trigger = {Trigger::Kind::traveled, 0.0, a.id, "", {mid, "d_trigger"}};
                change.action.kind = Action::Kind::lane_change;
                change.action.direction = m.kind == ManeuverKind::lane_change_left ? +1 : -1;
                change.action.duration = {mid, "d_lc"};
                act.events.push_back(std::move(change));
                break;
            }
        }
        timeline.acts.push_back(std::move(act));
    }

    // Every parameter an action or trigger refers to must exist in the space.
    for (const auto& act : timeline.acts) {
        for (const auto& e : act.events) {
            for (const ParamRef* ref : {&e.action.speed, &e.action.rate, &e.action.duration,
                                        &e.action.gap, &e.trigger.distance}) {
                if (!ref->object.empty() && ps.find_parameter(*ref) == nullptr) {
                    throw DetailingError("timeline references unknown parameter " + ref->path());
                }
            }
        }
    }

    // The timeline must resolve the declared end scene: re-derive post-states
    // from the emitted events and compare lane and per-lane ordering.
    const auto post = maneuver_post_states(fs);
    for (const auto& act : timeline.acts) {
        const ActorSpec* actor = fs.find_actor(act.actor);
        int lane = actor->start.lane;
        for (const auto& e : act.events) {
            if (e.action.kind == Action::Kind::lane_change) lane += e.action.direction;
        }
        auto declared = fs.end_positions.find(act.actor);
        const int expected_lane = declared != fs.end_positions.end() ? declared->second.lane
                                                                     : post.at(act.actor).lane;
        if (lane != expected_lane) {
            throw DetailingError("end scene unreachable by maneuver templates: actor '" + act.actor +
                                 "' (" + std::string(to_keyword(fs.maneuver_of(act.actor).kind)) +
                                 ") ends in lane " + std::to_string(lane) + ", expected " +
                                 std::to_string(expected_lane));
        }
    }
    return timeline;
}

// ---------------------------------------------------------------------------

// Full detailing step: every keyword becomes at least one parameterized
// object, the three relation categories are populated, and the start-scene
// maneuvers are expanded into the event timeline.
inline DetailedScenario detail_scenario(const FunctionalScenario& fs,
                                        const ForgeConfig& config = ForgeConfig{}) {
    {
        const Diagnostics diags = validate_scenario(fs);
        if (has_errors(diags)) {
            throw DetailingError("scenario is not valid: " + diags.front().message);
        }
    }
    DetailedScenario out;
    ParameterSpace& ps = out.space;
    expand_road_keywords(fs.road, ps);
    expand_environment_keywords(fs.environment, ps);
    expand_actor_keywords(fs, config, ps);

    auto arrangement = derive_arrangement_relations(fs);
    ps.relations.insert(ps.relations.end(), arrangement.begin(), arrangement.end());
    derive_object_dependencies(fs, config, ps);
    derive_parameter_dependencies(fs, ps);

    out.timeline = expand_maneuvers(fs, ps);
    return out;
}

// Object kind a vocabulary keyword materializes as; drives the per-keyword
// coverage check. follow_lane manifests as the vehicle itself.
inline ObjectKind object_kind_for_keyword(std::string_view keyword) {
    if (keyword == "lanes" || keyword == "hard_shoulder") return ObjectKind::lane;
    if (keyword == "straight" || keyword == "curve_left" || keyword == "curve_right" ||
        keyword == "plane" || keyword == "incline" || keyword == "decline" || keyword == "crest" ||
        keyword == "sag") {
        return ObjectKind::road_section;
    }
    if (keyword == "speed_limit") return ObjectKind::signal;
    if (keyword == "guard_rail") return ObjectKind::guard_rail;
    if (keyword == "car" || keyword == "truck" || keyword == "follow_lane") return ObjectKind::vehicle;
    if (keyword == "follow_vehicle" || keyword == "approach" || keyword == "lane_change_left" ||
        keyword == "lane_change_right" || keyword == "fall_back") {
        return ObjectKind::maneuver_event;
    }
    return ObjectKind::environment;
}

}  // namespace sforge
