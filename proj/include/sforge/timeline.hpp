#pragma once

#include <string>
#include <vector>

#include "sforge/rule_expr.hpp"

namespace sforge {

// Event-based representation of the start-scene maneuvers: each actor owns an
// act whose events pair a trigger with one action. Action magnitudes are
// references into the parameter space, so one timeline serves every concrete
// valuation.
struct Action {
    enum class Kind { set_speed, lane_change, hold_lane, hold_gap };

    Kind kind = Kind::hold_lane;
    ParamRef speed;          // set_speed: target speed
    ParamRef rate;           // set_speed: ramp rate (> 0)
    int direction = 0;       // lane_change: +1 left, -1 right
    ParamRef duration;       // lane_change: completion time
    ParamRef gap;            // hold_gap: target bumper gap
    std::string gap_target;  // hold_gap: actor held at distance

    bool operator==(const Action&) const = default;
};

struct Trigger {
    enum class Kind { at_time, gap_below, gap_above, lane_change_complete, traveled };

    Kind kind = Kind::at_time;
    double time = 0.0;         // at_time, seconds (nonnegative)
    std::string actor_a;       // gap_*: rear actor; traveled/lane_change_complete: subject
    std::string actor_b;       // gap_*: front actor
    ParamRef distance;         // gap_* threshold or traveled distance

    bool operator==(const Trigger&) const = default;
};

struct Event {
    std::string name;
    Trigger trigger;
    Action action;

    bool operator==(const Event&) const = default;
};

struct Act {
    std::string actor;
    std::vector<Event> events;

    bool operator==(const Act&) const = default;
};

struct EventTimeline {
    std::vector<Act> acts;

    bool operator==(const EventTimeline&) const = default;

    const Act* act_of(const std::string& actor) const {
        for (const auto& a : acts) {
            if (a.actor == actor) return &a;
        }
        return nullptr;
    }
};

}  // namespace sforge
