#pragma once

#include <array>
#include <string>
#include <string_view>

#include "sforge/opendrive.hpp"
#include "sforge/storyboard.hpp"
#include "sforge/xml.hpp"

namespace sforge {

inline constexpr int kOpenScenarioRevMajor = 1;
inline constexpr int kOpenScenarioRevMinor = 0;

// Vocabulary realized in the scenario file: movable objects and environment
// (layers 4 and 5).
inline constexpr std::array<std::string_view, 16> kOpenScenarioConsumedKeywords = {
    "car",     "truck",   "follow_lane", "follow_vehicle", "approach", "lane_change_left",
    "lane_change_right", "fall_back", "clear", "overcast", "rain", "fog",
    "morning", "midday",  "evening",   "night",
};

namespace osc_detail {

struct SunPlacement {
    double intensity;
    double azimuth;
    double elevation;
    const char* date_time;
};

inline SunPlacement sun_for(Daytime d) {
    switch (d) {
        case Daytime::morning: return {70000.0, 1.9, 0.3, "2021-06-21T07:00:00"};
        case Daytime::midday: return {100000.0, 3.14, 1.2, "2021-06-21T12:00:00"};
        case Daytime::evening: return {40000.0, 4.5, 0.25, "2021-06-21T18:30:00"};
        case Daytime::night: return {0.0, 0.0, -0.6, "2021-06-21T23:00:00"};
    }
    return {100000.0, 3.14, 1.2, "2021-06-21T12:00:00"};
}

inline const char* cloud_state_for(Weather w) {
    switch (w) {
        case Weather::clear: return "free";
        case Weather::overcast: return "overcast";
        case Weather::rain: return "rainy";
        case Weather::fog: return "overcast";
    }
    return "free";
}

inline void emit_environment_action(XmlNode& parent, const EnvironmentState& env) {
    XmlNode& environment = parent.child("GlobalAction").child("EnvironmentAction").child("Environment");
    environment.set("name", "environment");
    const SunPlacement sun = sun_for(env.daytime);
    XmlNode& time_of_day = environment.child("TimeOfDay");
    time_of_day.set("animation", "false");
    time_of_day.set("dateTime", sun.date_time);
    XmlNode& weather = environment.child("Weather");
    weather.set("cloudState", cloud_state_for(env.weather));
    XmlNode& sun_node = weather.child("Sun");
    sun_node.set("intensity", format_17sig(sun.intensity));
    sun_node.set("azimuth", format_17sig(sun.azimuth));
    sun_node.set("elevation", format_17sig(sun.elevation));
    weather.child("Fog").set("visualRange",
                             format_17sig(env.weather == Weather::fog ? env.fog_visibility : 100000.0));
    XmlNode& precipitation = weather.child("Precipitation");
    precipitation.set("precipitationType", env.weather == Weather::rain ? "rain" : "dry");
    precipitation.set("intensity",
                      format_17sig(env.weather == Weather::rain ? env.precipitation_intensity : 0.0));
    environment.child("RoadCondition")
        .set("frictionScaleFactor", env.weather == Weather::rain ? "0.7" : "1");
}

inline void emit_private_action(XmlNode& event_or_init, const ResolvedAction& action,
                                const std::string& actor) {
    XmlNode& node = event_or_init.child("PrivateAction");
    switch (action.kind) {
        case Action::Kind::set_speed: {
            XmlNode& speed = node.child("LongitudinalAction").child("SpeedAction");
            XmlNode& dynamics = speed.child("SpeedActionDynamics");
            dynamics.set("dynamicsShape", "linear");
            dynamics.set("value", format_17sig(action.rate));
            dynamics.set("dynamicsDimension", "rate");
            speed.child("SpeedActionTarget").child("AbsoluteTargetSpeed").set("value",
                                                                              format_17sig(action.speed));
            return;
        }
        case Action::Kind::lane_change: {
            XmlNode& change = node.child("LateralAction").child("LaneChangeAction");
            XmlNode& dynamics = change.child("LaneChangeActionDynamics");
            dynamics.set("dynamicsShape", "sinusoidal");
            dynamics.set("value", format_17sig(action.duration));
            dynamics.set("dynamicsDimension", "time");
            XmlNode& target = change.child("LaneChangeTarget").child("RelativeTargetLane");
            target.set("entityRef", actor);
            target.set("value", std::to_string(action.direction));
            return;
        }
        case Action::Kind::hold_lane: {
            XmlNode& offset = node.child("LateralAction").child("LaneOffsetAction");
            offset.set("continuous", "true");
            XmlNode& dynamics = offset.child("LaneOffsetActionDynamics");
            dynamics.set("maxLateralAcc", "1");
            dynamics.set("dynamicsShape", "step");
            offset.child("LaneOffsetTarget").child("AbsoluteTargetLaneOffset").set("value", "0");
            return;
        }
        case Action::Kind::hold_gap: {
            XmlNode& distance = node.child("LongitudinalAction").child("LongitudinalDistanceAction");
            distance.set("entityRef", action.gap_target);
            distance.set("distance", format_17sig(action.gap));
            distance.set("freespace", "true");
            distance.set("continuous", "true");
            return;
        }
    }
}

inline void emit_condition(XmlNode& trigger_node, const ResolvedTrigger& trigger, const std::string& name) {
    XmlNode& condition = trigger_node.child("ConditionGroup").child("Condition");
    condition.set("name", name);
    condition.set("delay", "0");
    condition.set("conditionEdge", "rising");
    switch (trigger.kind) {
        case Trigger::Kind::at_time: {
            XmlNode& sim = condition.child("ByValueCondition").child("SimulationTimeCondition");
            sim.set("value", format_17sig(trigger.value));
            sim.set("rule", "greaterThan");
            return;
        }
        case Trigger::Kind::gap_below:
        case Trigger::Kind::gap_above: {
            XmlNode& by_entity = condition.child("ByEntityCondition");
            XmlNode& triggering = by_entity.child("TriggeringEntities");
            triggering.set("triggeringEntitiesRule", "any");
            triggering.child("EntityRef").set("entityRef", trigger.actor_a);
            XmlNode& rel = by_entity.child("EntityCondition").child("RelativeDistanceCondition");
            rel.set("entityRef", trigger.actor_b);
            rel.set("relativeDistanceType", "longitudinal");
            rel.set("value", format_17sig(trigger.value));
            rel.set("freespace", "true");
            rel.set("rule", trigger.kind == Trigger::Kind::gap_below ? "lessThan" : "greaterThan");
            return;
        }
        case Trigger::Kind::traveled: {
            XmlNode& by_entity = condition.child("ByEntityCondition");
            XmlNode& triggering = by_entity.child("TriggeringEntities");
            triggering.set("triggeringEntitiesRule", "any");
            triggering.child("EntityRef").set("entityRef", trigger.actor_a);
            by_entity.child("EntityCondition")
                .child("TraveledDistanceCondition")
                .set("value", format_17sig(trigger.value));
            return;
        }
        case Trigger::Kind::lane_change_complete: {
            XmlNode& state = condition.child("ByValueCondition").child("StoryboardElementStateCondition");
            state.set("storyboardElementType", "event");
            state.set("storyboardElementRef", trigger.actor_a + ".change_lane");
            state.set("state", "completeState");
            return;
        }
    }
}

}  // namespace osc_detail

// Serializes the storyboard, referencing the sibling road file by path.
inline XmlNode emit_openscenario(const StoryboardIR& sb, const std::string& xodr_path) {
    XmlNode root("OpenSCENARIO");
    XmlNode& header = root.child("FileHeader");
    header.set("revMajor", std::to_string(kOpenScenarioRevMajor));
    header.set("revMinor", std::to_string(kOpenScenarioRevMinor));
    header.set("author", "scenario-forge");
    header.set("description", sb.name);

    root.child("CatalogLocations");
    root.child("RoadNetwork").child("LogicFile").set("filepath", xodr_path);

    XmlNode& entities = root.child("Entities");
    for (const auto& e : sb.entities) {
        XmlNode& object = entities.child("ScenarioObject");
        object.set("name", e.id);
        XmlNode& vehicle = object.child("Vehicle");
        vehicle.set("name", std::string(to_keyword(e.type)));
        vehicle.set("vehicleCategory", std::string(to_keyword(e.type)));
        XmlNode& bbox = vehicle.child("BoundingBox");
        XmlNode& center = bbox.child("Center");
        center.set("x", format_17sig(e.length / 2.0));
        center.set("y", "0");
        center.set("z", format_17sig(e.height / 2.0));
        XmlNode& dimensions = bbox.child("Dimensions");
        dimensions.set("width", format_17sig(e.width));
        dimensions.set("length", format_17sig(e.length));
        dimensions.set("height", format_17sig(e.height));
        XmlNode& performance = vehicle.child("Performance");
        performance.set("maxSpeed", format_17sig(e.max_speed));
        performance.set("maxAcceleration", format_17sig(e.max_acceleration));
        performance.set("maxDeceleration", format_17sig(e.max_deceleration));
        XmlNode& axles = vehicle.child("Axles");
        XmlNode& front = axles.child("FrontAxle");
        front.set("maxSteering", "0.5");
        front.set("wheelDiameter", "0.6");
        front.set("trackWidth", format_17sig(e.width * 0.9));
        front.set("positionX", format_17sig(e.length * 0.7));
        front.set("positionZ", "0.3");
        XmlNode& rear = axles.child("RearAxle");
        rear.set("maxSteering", "0");
        rear.set("wheelDiameter", "0.6");
        rear.set("trackWidth", format_17sig(e.width * 0.9));
        rear.set("positionX", format_17sig(e.length * 0.1));
        rear.set("positionZ", "0.3");
    }

    XmlNode& storyboard = root.child("Storyboard");
    XmlNode& init_actions = storyboard.child("Init").child("Actions");
    osc_detail::emit_environment_action(init_actions, sb.environment);
    for (const auto& record : sb.init) {
        XmlNode& priv = init_actions.child("Private");
        priv.set("entityRef", record.actor);
        XmlNode& teleport = priv.child("PrivateAction").child("TeleportAction");
        XmlNode& lane_pos = teleport.child("Position").child("LanePosition");
        lane_pos.set("roadId", record.road_id);
        lane_pos.set("laneId", std::to_string(record.lane_id));
        lane_pos.set("offset", format_17sig(record.offset));
        lane_pos.set("s", format_17sig(record.s));
        ResolvedAction speed;
        speed.kind = Action::Kind::set_speed;
        speed.speed = record.speed;
        speed.rate = 0.0;
        XmlNode& speed_action =
            priv.child("PrivateAction").child("LongitudinalAction").child("SpeedAction");
        XmlNode& dynamics = speed_action.child("SpeedActionDynamics");
        dynamics.set("dynamicsShape", "step");
        dynamics.set("value", "0");
        dynamics.set("dynamicsDimension", "time");
        speed_action.child("SpeedActionTarget")
            .child("AbsoluteTargetSpeed")
            .set("value", format_17sig(record.speed));
    }

    XmlNode& story = storyboard.child("Story");
    story.set("name", sb.name + "_story");
    for (const auto& act : sb.story) {
        XmlNode& act_node = story.child("Act");
        act_node.set("name", act.actor + "_act");
        XmlNode& group = act_node.child("ManeuverGroup");
        group.set("maximumExecutionCount", "1");
        group.set("name", act.actor + "_group");
        XmlNode& actors = group.child("Actors");
        actors.set("selectTriggeringEntities", "false");
        actors.child("EntityRef").set("entityRef", act.actor);
        XmlNode& maneuver = group.child("Maneuver");
        maneuver.set("name", act.actor + "_maneuver");
        for (const auto& event : act.events) {
            XmlNode& event_node = maneuver.child("Event");
            event_node.set("name", event.name);
            event_node.set("priority", "overwrite");
            XmlNode& action = event_node.child("Action");
            action.set("name", event.name + ".action");
            osc_detail::emit_private_action(action, event.action, act.actor);
            XmlNode& start = event_node.child("StartTrigger");
            osc_detail::emit_condition(start, event.trigger, event.name + ".trigger");
        }
        XmlNode& act_start = act_node.child("StartTrigger");
        ResolvedTrigger at_zero;
        osc_detail::emit_condition(act_start, at_zero, act.actor + "_act.start");
    }

    XmlNode& stop = storyboard.child("StopTrigger");
    ResolvedTrigger end_trigger;
    end_trigger.value = sb.stop_time;
    osc_detail::emit_condition(stop, end_trigger, "end_of_scenario");
    return root;
}

inline std::string emit_openscenario_text(const StoryboardIR& sb, const std::string& xodr_path) {
    return write_xml(emit_openscenario(sb, xodr_path));
}

}  // namespace sforge
