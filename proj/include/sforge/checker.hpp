#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "sforge/scenario.hpp"
#include "sforge/storyboard.hpp"

namespace sforge {

// Same-lane bumper gaps below this are counted as crashes.
inline constexpr double kCrashGap = 5.0;
inline constexpr double kDefaultTimeStep = 0.02;
// Ramp applied to speed commands that carry no rate of their own.
inline constexpr double kSpeedRampRate = 2.0;

struct TraceState {
    double s = 0.0;
    int lane_id = -1;
    double v = 0.0;

    bool operator==(const TraceState&) const = default;
};

// Fixed-step samples per actor; every actor shares the time axis.
struct Trace {
    std::vector<double> t;
    std::map<std::string, std::vector<TraceState>> actors;

    bool operator==(const Trace&) const = default;

    bool empty() const { return t.empty() || actors.empty(); }
};

namespace checker_detail {

struct ActorState {
    double s = 0.0;
    double v = 0.0;
    int lane_id = -1;
    double length = 4.5;

    // longitudinal command
    bool has_speed_target = false;
    double target_v = 0.0;
    double rate = 2.0;

    // gap-holding controller
    bool holding_gap = false;
    std::string gap_target;
    double target_gap = 0.0;

    // lateral state
    bool lane_changing = false;
    double lane_change_end = 0.0;
    double lane_change_switch = 0.0;
    int lane_change_direction = 0;
    bool lane_switched = false;
};

struct PendingEvent {
    const StoryboardEvent* event = nullptr;
    std::string actor;
    bool fired = false;
    bool prev_condition = false;
};

inline double bumper_gap(const ActorState& rear, const ActorState& front) {
    return (front.s - rear.s) - (rear.length + front.length) / 2.0;
}

}  // namespace checker_detail

// Semi-implicit Euler execution of a storyboard on its road: speed commands
// ramp at their stated rate, lane changes complete after their duration with
// the lane id switching at midpoint, triggers fire on rising edges. The run
// ends at the stop trigger, when an actor reaches the section end, or when
// every act has fired all events and reached its speed targets.
inline Trace simulate(const StoryboardIR& sb, const RoadNetworkIR& road, double dt = kDefaultTimeStep) {
    using checker_detail::ActorState;
    using checker_detail::PendingEvent;
    if (!(dt > 0.0) || dt > 0.1) throw std::invalid_argument("dt must lie in (0, 0.1]");

    Trace trace;
    if (sb.init.empty()) return trace;

    std::map<std::string, ActorState> states;
    for (const auto& init : sb.init) {
        ActorState st;
        st.s = init.s;
        st.v = init.speed;
        st.lane_id = init.lane_id;
        const EntityRecord* entity = sb.entity_of(init.actor);
        if (entity != nullptr) st.length = entity->length;
        states[init.actor] = st;
        trace.actors[init.actor] = {};
    }

    std::vector<PendingEvent> pending;
    for (const auto& act : sb.story) {
        for (const auto& event : act.events) {
            pending.push_back({&event, act.actor, false, false});
        }
    }

    auto record = [&](double t) {
        trace.t.push_back(t);
        for (auto& [actor, st] : states) {
            trace.actors[actor].push_back({st.s, st.lane_id, st.v});
        }
    };

    auto condition_holds = [&](const PendingEvent& p, double t) {
        const ResolvedTrigger& trig = p.event->trigger;
        switch (trig.kind) {
            case Trigger::Kind::at_time:
                return t >= trig.value;
            case Trigger::Kind::gap_below:
                return checker_detail::bumper_gap(states.at(trig.actor_a), states.at(trig.actor_b)) <
                       trig.value;
            case Trigger::Kind::gap_above:
                return checker_detail::bumper_gap(states.at(trig.actor_a), states.at(trig.actor_b)) >
                       trig.value;
            case Trigger::Kind::traveled: {
                const InitRecord* init = sb.init_of(trig.actor_a);
                return states.at(trig.actor_a).s - (init ? init->s : 0.0) >= trig.value;
            }
            case Trigger::Kind::lane_change_complete: {
                const ActorState& st = states.at(trig.actor_a);
                return !st.lane_changing && st.lane_switched;
            }
        }
        return false;
    };

    auto apply_action = [&](const std::string& actor, const ResolvedAction& action, double t) {
        ActorState& st = states.at(actor);
        switch (action.kind) {
            case Action::Kind::set_speed:
                st.has_speed_target = true;
                st.target_v = action.speed;
                st.rate = action.rate > 0.0 ? action.rate : kSpeedRampRate;
                st.holding_gap = false;
                break;
            case Action::Kind::hold_gap:
                st.holding_gap = true;
                st.gap_target = action.gap_target;
                st.target_gap = action.gap;
                st.has_speed_target = false;
                break;
            case Action::Kind::hold_lane:
                break;
            case Action::Kind::lane_change:
                st.lane_changing = true;
                st.lane_change_direction = action.direction;
                st.lane_change_end = t + action.duration;
                st.lane_change_switch = t + action.duration / 2.0;
                st.lane_switched = false;
                break;
        }
    };

    double t = 0.0;
    record(t);
    while (t < sb.stop_time - 1e-12) {
        // rising-edge trigger evaluation, acts in storyboard order
        for (auto& p : pending) {
            const bool now = condition_holds(p, t);
            if (!p.fired && now && !p.prev_condition) {
                apply_action(p.actor, p.event->action, t);
                p.fired = true;
            }
            p.prev_condition = now;
        }

        // quiescence: every event fired, every commanded speed reached, no
        // lane change in flight, nobody holding a gap or a lane open-ended
        bool quiescent = true;
        for (const auto& p : pending) {
            if (!p.fired) quiescent = false;
        }
        for (const auto& [actor, st] : states) {
            if (st.lane_changing) quiescent = false;
            if (st.holding_gap) quiescent = false;
            if (st.has_speed_target && std::abs(st.v - st.target_v) > 1e-12) quiescent = false;
            if (!st.has_speed_target && !st.holding_gap) quiescent = false;  // free-running actor
        }
        if (quiescent) break;

        // accelerations
        std::map<std::string, double> accel;
        for (auto& [actor, st] : states) {
            double a = 0.0;
            if (st.holding_gap && states.count(st.gap_target)) {
                const ActorState& lead = states.at(st.gap_target);
                const double gap = checker_detail::bumper_gap(st, lead);
                const double v_cmd = lead.v + 0.5 * (gap - st.target_gap);
                a = std::clamp((v_cmd - st.v) / dt, -kSpeedRampRate, kSpeedRampRate);
            } else if (st.has_speed_target) {
                const double dv = st.target_v - st.v;
                if (std::abs(dv) <= st.rate * dt) {
                    a = dv / dt;  // lands exactly on the target this step
                } else {
                    a = dv > 0.0 ? st.rate : -st.rate;
                }
            }
            accel[actor] = a;
        }

        // semi-implicit Euler; stop at the section end exactly
        double step = dt;
        for (auto& [actor, st] : states) {
            const double v_next = st.v + accel[actor] * dt;
            if (v_next > 1e-9) {
                const double remaining = road.length - st.s;
                step = std::min(step, remaining / v_next);
            }
        }
        if (step <= 1e-12) break;
        const bool exits = step < dt;
        for (auto& [actor, st] : states) {
            st.v = st.v + accel[actor] * dt;
            st.s += st.v * step;
        }
        t += step;
        for (auto& [actor, st] : states) {
            if (st.lane_changing) {
                if (!st.lane_switched && t >= st.lane_change_switch) {
                    st.lane_id += st.lane_change_direction;
                    st.lane_switched = true;
                }
                if (t >= st.lane_change_end) st.lane_changing = false;
            }
        }
        record(t);
        if (exits) break;
    }
    return trace;
}

struct ActorConformance {
    bool start_ok = true;
    bool maneuver_ok = true;
    bool end_ok = true;
    std::string note;

    bool operator==(const ActorConformance&) const = default;
};

// Answers the four execution questions: did every vehicle start at its start
// scene position, behave according to its maneuver, avoid crashes, and end
// in the declared end scene.
struct ConformanceReport {
    bool start_ok = true;
    bool maneuver_ok = true;
    bool no_crash = true;
    bool end_ok = true;
    double min_gap = std::numeric_limits<double>::infinity();
    double completion_time = 0.0;
    std::map<std::string, ActorConformance> actors;

    bool all_ok() const { return start_ok && maneuver_ok && no_crash && end_ok; }
};

inline ConformanceReport check_conformance(const Trace& trace, const FunctionalScenario& fs,
                                           const StoryboardIR& sb, double d_slot) {
    ConformanceReport report;
    if (trace.empty()) return report;
    const size_t n_samples = trace.t.size();
    report.completion_time = trace.t.back();

    int n_driving = 0;
    for (const auto& init : sb.init) n_driving = std::max(n_driving, -init.lane_id);
    n_driving = std::max(n_driving, fs.road.n_driving_lanes);
    const double s_origin = sb.road_length / 2.0;

    auto actor_note = [&report](const std::string& actor) -> ActorConformance& {
        return report.actors[actor];
    };

    // 1. start scene: lane equality and longitudinal placement within half a
    // slot of the grid position.
    for (const auto& a : fs.actors) {
        const auto& samples = trace.actors.at(a.id);
        const int expected_lane = grid_lane_to_road_id(a.start.lane, fs.road.n_driving_lanes);
        const double expected_s = s_origin + a.start.slot * d_slot;
        ActorConformance& ac = actor_note(a.id);
        if (samples.front().lane_id != expected_lane ||
            std::abs(samples.front().s - expected_s) > d_slot / 2.0) {
            ac.start_ok = false;
            ac.note += "start position off; ";
            report.start_ok = false;
        }
    }

    // 2. maneuver signatures from the trace alone.
    for (const auto& a : fs.actors) {
        const ManeuverSpec m = fs.maneuver_of(a.id);
        const auto& samples = trace.actors.at(a.id);
        ActorConformance& ac = actor_note(a.id);
        auto fail = [&](const std::string& why) {
            ac.maneuver_ok = false;
            ac.note += why + "; ";
            report.maneuver_ok = false;
        };
        switch (m.kind) {
            case ManeuverKind::follow_lane:
            case ManeuverKind::follow_vehicle: {
                for (const auto& s : samples) {
                    if (s.lane_id != samples.front().lane_id) {
                        fail("lane not constant");
                        break;
                    }
                }
                break;
            }
            case ManeuverKind::lane_change_left:
            case ManeuverKind::lane_change_right: {
                const int direction = m.kind == ManeuverKind::lane_change_left ? +1 : -1;
                int transitions = 0;
                for (size_t i = 1; i < n_samples; ++i) {
                    const int delta = samples[i].lane_id - samples[i - 1].lane_id;
                    if (delta != 0) {
                        ++transitions;
                        if (delta != direction) fail("lane transition in the wrong direction");
                    }
                }
                if (transitions != 1) fail("expected exactly one lane transition, saw " + std::to_string(transitions));
                break;
            }
            case ManeuverKind::approach:
            case ManeuverKind::fall_back: {
                const bool is_approach = m.kind == ManeuverKind::approach;
                // trigger threshold from the storyboard act
                double threshold = 0.0;
                bool found = false;
                for (const auto& act : sb.story) {
                    if (act.actor != a.id) continue;
                    for (const auto& e : act.events) {
                        if (e.trigger.kind ==
                            (is_approach ? Trigger::Kind::gap_below : Trigger::Kind::gap_above)) {
                            threshold = e.trigger.value;
                            found = true;
                        }
                    }
                }
                if (!found || !m.target) {
                    fail("no gap trigger in the storyboard");
                    break;
                }
                const auto& target_samples = trace.actors.at(*m.target);
                const EntityRecord* self = sb.entity_of(a.id);
                const EntityRecord* target = sb.entity_of(*m.target);
                const double half_lengths =
                    ((self ? self->length : 4.5) + (target ? target->length : 4.5)) / 2.0;
                auto gap_at = [&](size_t i) {
                    return target_samples[i].s - samples[i].s - half_lengths;
                };
                size_t trigger_index = n_samples;
                for (size_t i = 0; i < n_samples; ++i) {
                    const bool crossed = is_approach ? gap_at(i) < threshold : gap_at(i) > threshold;
                    if (crossed) {
                        trigger_index = i;
                        break;
                    }
                }
                if (trigger_index == n_samples) {
                    fail("gap trigger never reached");
                    break;
                }
                for (size_t i = 1; i <= trigger_index && i < n_samples; ++i) {
                    const double delta = gap_at(i) - gap_at(i - 1);
                    if (is_approach ? delta >= -1e-9 : delta <= 1e-9) {
                        fail(is_approach ? "gap not strictly decreasing before trigger"
                                         : "gap not strictly increasing before trigger");
                        break;
                    }
                }
                for (const auto& s : samples) {
                    if (s.lane_id != samples.front().lane_id) {
                        fail("lane not constant");
                        break;
                    }
                }
                break;
            }
        }
    }

    // 3. crashes: same-lane bumper gap stays above the threshold.
    for (size_t i = 0; i < n_samples; ++i) {
        for (const auto& a : fs.actors) {
            for (const auto& b : fs.actors) {
                if (a.id >= b.id) continue;
                const TraceState& sa = trace.actors.at(a.id)[i];
                const TraceState& sb_state = trace.actors.at(b.id)[i];
                if (sa.lane_id != sb_state.lane_id) continue;
                const EntityRecord* ea = sb.entity_of(a.id);
                const EntityRecord* eb = sb.entity_of(b.id);
                const double gap = std::abs(sb_state.s - sa.s) -
                                   ((ea ? ea->length : 4.5) + (eb ? eb->length : 4.5)) / 2.0;
                report.min_gap = std::min(report.min_gap, gap);
                if (gap < kCrashGap) {
                    report.no_crash = false;
                    actor_note(a.id).note += "crash proximity with " + b.id + "; ";
                }
            }
        }
    }

    // 4. end scene: lane equality and per-lane longitudinal order against the
    // declared or synthesized end grid.
    const auto post = maneuver_post_states(fs);
    std::map<int, std::vector<std::pair<double, std::string>>> expected_by_lane;
    for (const auto& a : fs.actors) {
        GridEndState end = post.at(a.id);
        auto declared = fs.end_positions.find(a.id);
        if (declared != fs.end_positions.end()) {
            end.lane = declared->second.lane;
        }
        const int expected_lane = grid_lane_to_road_id(end.lane, fs.road.n_driving_lanes);
        const TraceState& last = trace.actors.at(a.id).back();
        if (last.lane_id != expected_lane) {
            actor_note(a.id).end_ok = false;
            actor_note(a.id).note += "final lane mismatch; ";
            report.end_ok = false;
        }
        expected_by_lane[end.lane].emplace_back(end.pos, a.id);
    }
    for (auto& [lane, expected] : expected_by_lane) {
        std::sort(expected.begin(), expected.end());
        std::vector<std::pair<double, std::string>> actual;
        for (const auto& [pos, actor] : expected) {
            actual.emplace_back(trace.actors.at(actor).back().s, actor);
        }
        std::vector<std::pair<double, std::string>> sorted_actual = actual;
        std::sort(sorted_actual.begin(), sorted_actual.end());
        for (size_t i = 0; i < expected.size(); ++i) {
            if (sorted_actual[i].second != expected[i].second) {
                actor_note(expected[i].second).end_ok = false;
                actor_note(expected[i].second).note += "final ordering mismatch; ";
                report.end_ok = false;
            }
        }
    }
    return report;
}

// CSV export: one row per (sample, actor).
inline std::string trace_to_csv(const Trace& trace) {
    std::string out = "t,actor,s,lane,v\n";
    for (size_t i = 0; i < trace.t.size(); ++i) {
        for (const auto& [actor, samples] : trace.actors) {
            out += format_number(trace.t[i]);
            out += ',';
            out += actor;
            out += ',';
            out += format_number(samples[i].s);
            out += ',';
            out += std::to_string(samples[i].lane_id);
            out += ',';
            out += format_number(samples[i].v);
            out += '\n';
        }
    }
    return out;
}

}  // namespace sforge
