#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "sforge/config.hpp"
#include "sforge/parameter_space.hpp"
#include "sforge/road_ir.hpp"
#include "sforge/timeline.hpp"

namespace sforge {

// Global stop trigger: every story ends by this simulation time.
inline constexpr double kStopTime = 120.0;

struct EntityRecord {
    std::string id;
    VehicleType type = VehicleType::car;
    double length = 4.5, width = 1.8, height = 1.5;
    double max_speed = 69.4, max_acceleration = 4.0, max_deceleration = 9.0;

    bool operator==(const EntityRecord&) const = default;
};

struct InitRecord {
    std::string actor;
    std::string road_id = "1";
    int lane_id = -1;  // negative: right of the reference line
    double s = 0.0;
    double offset = 0.0;
    double speed = 0.0;

    bool operator==(const InitRecord&) const = default;
};

struct EnvironmentState {
    Weather weather = Weather::clear;
    Daytime daytime = Daytime::midday;
    double fog_visibility = 100000.0;
    double precipitation_intensity = 0.0;

    bool operator==(const EnvironmentState&) const = default;
};

// Trigger and action with the valuation applied.
struct ResolvedTrigger {
    Trigger::Kind kind = Trigger::Kind::at_time;
    double value = 0.0;  // time, gap threshold, or traveled distance
    std::string actor_a;
    std::string actor_b;

    bool operator==(const ResolvedTrigger&) const = default;
};

struct ResolvedAction {
    Action::Kind kind = Action::Kind::hold_lane;
    double speed = 0.0;
    double rate = 0.0;
    int direction = 0;
    double duration = 0.0;
    double gap = 0.0;
    std::string gap_target;

    bool operator==(const ResolvedAction&) const = default;
};

struct StoryboardEvent {
    std::string name;
    ResolvedTrigger trigger;
    ResolvedAction action;

    bool operator==(const StoryboardEvent&) const = default;
};

struct StoryboardAct {
    std::string actor;
    std::vector<StoryboardEvent> events;

    bool operator==(const StoryboardAct&) const = default;
};

// Concrete storyboard: entities, their initial placements and speeds, the
// event-based story and the stop condition.
struct StoryboardIR {
    std::string name = "scenario";
    std::string road_id = "1";
    double road_length = 0.0;
    std::vector<EntityRecord> entities;
    std::vector<InitRecord> init;
    EnvironmentState environment;
    std::vector<StoryboardAct> story;
    double stop_time = kStopTime;

    bool operator==(const StoryboardIR&) const = default;

    const InitRecord* init_of(const std::string& actor) const {
        for (const auto& r : init) {
            if (r.actor == actor) return &r;
        }
        return nullptr;
    }
    const EntityRecord* entity_of(const std::string& actor) const {
        for (const auto& e : entities) {
            if (e.id == actor) return &e;
        }
        return nullptr;
    }
};

struct StoryboardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Maps grid lane k (1 = rightmost driving lane) to the road's lane ids
// (-1 = leftmost driving lane).
inline int grid_lane_to_road_id(int grid_lane, int n_driving_lanes) {
    return -(n_driving_lanes - grid_lane + 1);
}

inline int road_id_to_grid_lane(int lane_id, int n_driving_lanes) {
    return n_driving_lanes + lane_id + 1;
}

// Places the grid at mid-section and resolves every timeline event against
// the valuation. Throws when a slot lands outside the road.
inline StoryboardIR build_storyboard(const EventTimeline& timeline, const ParameterSpace& ps,
                                     const ConcreteValuation& v, const RoadNetworkIR& road,
                                     const ForgeConfig& config = ForgeConfig{}) {
    StoryboardIR sb;
    sb.road_id = road.road_id;
    sb.road_length = road.length;
    sb.name = road.name;

    int n_driving = 0;
    if (!road.lane_sections.empty()) {
        for (const auto& lane : road.lane_sections.front().right) {
            if (lane.type == LaneType::driving) ++n_driving;
        }
    }
    const double s_origin = road.length / 2.0;
    const double d_slot = v.at(ps.grid_spacing);

    for (const auto& o : ps.objects) {
        if (o.kind == ObjectKind::environment) {
            sb.environment.weather = *enum_from_keyword<Weather>(o.attr("weather", "clear"));
            sb.environment.daytime = *enum_from_keyword<Daytime>(o.attr("daytime", "midday"));
            if (o.find_parameter("visibility") != nullptr) {
                sb.environment.fog_visibility = v.at({o.id, "visibility"});
            }
            if (o.find_parameter("precipitation_intensity") != nullptr) {
                sb.environment.precipitation_intensity = v.at({o.id, "precipitation_intensity"});
            }
            continue;
        }
        if (o.kind != ObjectKind::vehicle) continue;
        const VehicleType type = *enum_from_keyword<VehicleType>(o.attr("vehicle_type", "car"));
        const VehicleClassSpec& cls = config.vehicle(type);
        sb.entities.push_back({o.id, type, cls.length, cls.width, cls.height, cls.max_speed,
                               cls.max_acceleration, cls.max_deceleration});

        InitRecord init;
        init.actor = o.id;
        init.road_id = road.road_id;
        const int grid_lane = std::stoi(o.attr("lane", "1"));
        const int slot = std::stoi(o.attr("slot", "0"));
        init.lane_id = grid_lane_to_road_id(grid_lane, n_driving);
        init.s = s_origin + slot * d_slot;
        init.speed = v.at({o.id, "v0"});
        if (init.s < 0.0 || init.s > road.length) {
            throw StoryboardError("grid exceeds section: actor '" + o.id + "' at s = " +
                                  format_number(init.s) + " on a road of length " +
                                  format_number(road.length));
        }
        if (-init.lane_id < 1 || -init.lane_id > n_driving) {
            throw StoryboardError("grid exceeds section: actor '" + o.id + "' lane id " +
                                  std::to_string(init.lane_id));
        }
        sb.init.push_back(init);
    }

    for (const auto& act : timeline.acts) {
        StoryboardAct out_act;
        out_act.actor = act.actor;
        for (const auto& e : act.events) {
            StoryboardEvent ev;
            ev.name = e.name;
            ev.trigger.kind = e.trigger.kind;
            ev.trigger.actor_a = e.trigger.actor_a;
            ev.trigger.actor_b = e.trigger.actor_b;
            switch (e.trigger.kind) {
                case Trigger::Kind::at_time:
                    ev.trigger.value = e.trigger.time;
                    break;
                case Trigger::Kind::lane_change_complete:
                    ev.trigger.value = 0.0;
                    break;
                default:
                    ev.trigger.value = v.at(e.trigger.distance);
            }
            ev.action.kind = e.action.kind;
            switch (e.action.kind) {
                case Action::Kind::set_speed:
                    ev.action.speed = v.at(e.action.speed);
                    ev.action.rate = v.at(e.action.rate);
                    break;
                case Action::Kind::lane_change:
                    ev.action.direction = e.action.direction;
                    ev.action.duration = v.at(e.action.duration);
                    break;
                case Action::Kind::hold_gap:
                    ev.action.gap = v.at(e.action.gap);
                    ev.action.gap_target = e.action.gap_target;
                    break;
                case Action::Kind::hold_lane:
                    break;
            }
            out_act.events.push_back(std::move(ev));
        }
        sb.story.push_back(std::move(out_act));
    }
    return sb;
}

}  // namespace sforge
