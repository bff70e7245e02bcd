#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "sforge/diagnostics.hpp"
#include "sforge/vocabulary.hpp"

namespace sforge {

// Longitudinal slots are bounded so that every admissible grid stays on the
// single road section.
inline constexpr int kMaxSlotMagnitude = 10;

// Position on the lane-relative start/end grid. lane 1 is the rightmost
// driving lane, lanes increase leftward; slot 0 is the grid origin, slots
// increase in driving direction.
struct GridPosition {
    int lane = 1;
    int slot = 0;

    auto operator<=>(const GridPosition&) const = default;
};

struct RoadSpec {
    int n_driving_lanes = 2;
    bool hard_shoulder = false;
    Alignment alignment = Alignment::straight;
    ElevationKind elevation = ElevationKind::plane;
    std::optional<int> speed_limit_kmh;  // one of 80, 100, 120, 130
    std::set<RailSide> guard_rail;

    bool operator==(const RoadSpec&) const = default;
};

struct EnvironmentSpec {
    Weather weather = Weather::clear;
    Daytime daytime = Daytime::midday;

    bool operator==(const EnvironmentSpec&) const = default;
};

struct ActorSpec {
    std::string id;
    VehicleType vehicle_type = VehicleType::car;
    GridPosition start;

    bool operator==(const ActorSpec&) const = default;
};

struct ManeuverSpec {
    ManeuverKind kind = ManeuverKind::follow_lane;
    std::optional<std::string> target;

    bool operator==(const ManeuverSpec&) const = default;
};

struct FunctionalScenario {
    std::string name = "scenario";
    RoadSpec road;
    EnvironmentSpec environment;
    std::vector<ActorSpec> actors;  // declaration order
    std::map<std::string, ManeuverSpec> start_maneuvers;
    std::map<std::string, GridPosition> end_positions;  // declared ends only

    bool operator==(const FunctionalScenario&) const = default;

    const ActorSpec* find_actor(const std::string& id) const {
        for (const auto& a : actors) {
            if (a.id == id) return &a;
        }
        return nullptr;
    }

    ManeuverSpec maneuver_of(const std::string& actor_id) const {
        auto it = start_maneuvers.find(actor_id);
        return it == start_maneuvers.end() ? ManeuverSpec{} : it->second;
    }
};

// Maps semantic elements back to their source statements so the validator can
// report line/column. Empty when validating an in-memory scenario.
struct SourceIndex {
    struct Loc {
        int line = 0;
        int column = 0;
    };
    std::map<std::string, Loc> actor_stmt;
    std::map<std::string, Loc> start_stmt;
    std::map<std::string, Loc> end_stmt;
    Loc road_stmt;

    Loc actor(const std::string& id) const { return lookup(actor_stmt, id); }
    Loc start(const std::string& id) const { return lookup(start_stmt, id); }
    Loc end(const std::string& id) const { return lookup(end_stmt, id); }

  private:
    static Loc lookup(const std::map<std::string, Loc>& m, const std::string& id) {
        auto it = m.find(id);
        return it == m.end() ? Loc{} : it->second;
    }
};

// Abstract end-scene state: lane is exact, pos is in slot units and may be
// fractional (an approach ends closer to its target than any whole slot).
// Only lane equality and the per-lane ordering of pos are meaningful.
struct GridEndState {
    int lane = 1;
    double pos = 0.0;
};

// Grid-level post-state oracle: applies each actor's start-scene maneuver to
// the start grid. Targets sit ahead of their actors, so processing by
// descending start slot resolves chains (A follows B, B approaches C).
inline std::map<std::string, GridEndState> maneuver_post_states(const FunctionalScenario& fs) {
    std::vector<const ActorSpec*> order;
    order.reserve(fs.actors.size());
    for (const auto& a : fs.actors) order.push_back(&a);
    std::stable_sort(order.begin(), order.end(),
                     [](const ActorSpec* a, const ActorSpec* b) { return a->start.slot > b->start.slot; });

    std::map<std::string, GridEndState> post;
    for (const ActorSpec* actor : order) {
        const ManeuverSpec m = fs.maneuver_of(actor->id);
        GridEndState s{actor->start.lane, static_cast<double>(actor->start.slot)};
        const GridEndState* target = nullptr;
        if (m.target) {
            auto it = post.find(*m.target);
            if (it != post.end()) target = &it->second;
        }
        switch (m.kind) {
            case ManeuverKind::follow_lane:
                break;
            case ManeuverKind::lane_change_left:
                s.lane += 1;
                break;
            case ManeuverKind::lane_change_right:
                s.lane -= 1;
                break;
            case ManeuverKind::approach:
                if (target) s.pos = target->pos - 0.5;
                break;
            case ManeuverKind::follow_vehicle:
                if (target) {
                    const auto* t = fs.find_actor(*m.target);
                    const double start_gap = t ? t->start.slot - actor->start.slot : 1.0;
                    s.pos = target->pos - start_gap;
                }
                break;
            case ManeuverKind::fall_back:
                if (target) {
                    const auto* t = fs.find_actor(*m.target);
                    const double start_gap = t ? t->start.slot - actor->start.slot : 1.0;
                    s.pos = target->pos - start_gap - 1.0;
                }
                break;
        }
        post.emplace(actor->id, s);
    }
    return post;
}

// Checks every type invariant and cross-field constraint of a functional
// scenario. Returns an empty list iff the scenario is well-formed.
// Deterministic and independent of actor declaration order: diagnostics are
// sorted by (code, message).
inline Diagnostics validate_scenario(const FunctionalScenario& fs, const SourceIndex& src = {}) {
    Diagnostics out;
    auto report = [&out](SourceIndex::Loc loc, std::string code, std::string message) {
        out.push_back({Severity::error, loc.line, loc.column, std::move(code), std::move(message)});
    };
    auto check_position = [&](const GridPosition& p, const std::string& actor_id, const char* which,
                              SourceIndex::Loc loc) {
        if (p.lane < 1 || p.lane > fs.road.n_driving_lanes) {
            report(loc, "lane_out_of_range",
                   std::string(which) + " lane " + std::to_string(p.lane) + " of actor '" + actor_id +
                       "' exceeds the " + std::to_string(fs.road.n_driving_lanes) + " driving lanes");
        }
        if (p.slot < -kMaxSlotMagnitude || p.slot > kMaxSlotMagnitude) {
            report(loc, "slot_out_of_bounds",
                   std::string(which) + " slot " + std::to_string(p.slot) + " of actor '" + actor_id +
                       "' is outside [-10, 10]");
        }
    };

    if (fs.actors.empty()) {
        report({}, "no_actor", "scenario declares no actor");
    }
    if (fs.road.n_driving_lanes < 2 || fs.road.n_driving_lanes > 4) {
        report(src.road_stmt, "lane_count_invalid",
               "road must have 2, 3 or 4 driving lanes, got " + std::to_string(fs.road.n_driving_lanes));
    }
    if (fs.road.speed_limit_kmh) {
        const int v = *fs.road.speed_limit_kmh;
        if (v != 80 && v != 100 && v != 120 && v != 130) {
            report(src.road_stmt, "speed_limit_invalid",
                   "speed limit must be one of 80, 100, 120, 130 km/h, got " + std::to_string(v));
        }
    }

    std::set<std::string> ids;
    std::map<GridPosition, std::string> start_taken;
    for (const auto& a : fs.actors) {
        if (!ids.insert(a.id).second) {
            report(src.actor(a.id), "duplicate_actor_id", "actor id '" + a.id + "' declared more than once");
            continue;
        }
        check_position(a.start, a.id, "start", src.actor(a.id));
        auto [it, fresh] = start_taken.emplace(a.start, a.id);
        if (!fresh) {
            report(src.actor(a.id), "duplicate_start_position",
                   "actors '" + it->second + "' and '" + a.id + "' share start position lane " +
                       std::to_string(a.start.lane) + " slot " + std::to_string(a.start.slot));
        }
    }

    for (const auto& [id, m] : fs.start_maneuvers) {
        const ActorSpec* actor = fs.find_actor(id);
        if (actor == nullptr) {
            report(src.start(id), "unknown_actor", "maneuver references undeclared actor '" + id + "'");
            continue;
        }
        if (maneuver_needs_target(m.kind)) {
            if (!m.target) {
                report(src.start(id), "maneuver_target_missing",
                       std::string(to_keyword(m.kind)) + " of actor '" + id + "' requires a target");
                continue;
            }
            const ActorSpec* target = fs.find_actor(*m.target);
            if (target == nullptr) {
                report(src.start(id), "maneuver_target_unknown",
                       "target '" + *m.target + "' of actor '" + id + "' is not declared");
                continue;
            }
            if (target->id == id) {
                report(src.start(id), "maneuver_target_self", "actor '" + id + "' cannot target itself");
                continue;
            }
            if (target->start.lane != actor->start.lane || target->start.slot <= actor->start.slot) {
                report(src.start(id), "maneuver_target_not_ahead",
                       std::string(to_keyword(m.kind)) + " target of '" + id + "' must be ahead in same lane");
            }
        } else if (m.target) {
            report(src.start(id), "maneuver_target_forbidden",
                   std::string(to_keyword(m.kind)) + " of actor '" + id + "' takes no target");
        }
    }

    std::map<GridPosition, std::string> end_taken;
    for (const auto& [id, pos] : fs.end_positions) {
        if (fs.find_actor(id) == nullptr) {
            report(src.end(id), "unknown_actor", "end position references undeclared actor '" + id + "'");
            continue;
        }
        check_position(pos, id, "end", src.end(id));
        auto [it, fresh] = end_taken.emplace(pos, id);
        if (!fresh) {
            report(src.end(id), "duplicate_end_position",
                   "actors '" + it->second + "' and '" + id + "' share end position lane " +
                       std::to_string(pos.lane) + " slot " + std::to_string(pos.slot));
        }
    }

    // End-scene consistency against the grid post-state oracle; runs only
    // once the pieces it relies on are individually sound.
    if (!has_errors(out)) {
        const auto post = maneuver_post_states(fs);
        for (const auto& a : fs.actors) {
            const ManeuverSpec m = fs.maneuver_of(a.id);
            const GridEndState& p = post.at(a.id);
            if (p.lane < 1 || p.lane > fs.road.n_driving_lanes) {
                report(src.start(a.id), "end_scene_inconsistent",
                       "end scene inconsistent with maneuver: " + std::string(to_keyword(m.kind)) +
                           " of actor '" + a.id + "' leaves the road (lane " + std::to_string(p.lane) + ")");
                continue;
            }
            auto it = fs.end_positions.find(a.id);
            if (it == fs.end_positions.end()) continue;
            const GridPosition& declared = it->second;
            if (declared.lane != p.lane) {
                report(src.end(a.id), "end_scene_inconsistent",
                       "end scene inconsistent with maneuver: actor '" + a.id + "' must end in lane " +
                           std::to_string(p.lane) + ", declared lane " + std::to_string(declared.lane));
                continue;
            }
            if (!m.target) {
                if (declared.slot != a.start.slot) {
                    report(src.end(a.id), "end_scene_inconsistent",
                           "end scene inconsistent with maneuver: " + std::string(to_keyword(m.kind)) +
                               " of actor '" + a.id + "' keeps its slot, declared slot " +
                               std::to_string(declared.slot));
                }
                continue;
            }
            const ActorSpec* target = fs.find_actor(*m.target);
            auto target_end_it = fs.end_positions.find(*m.target);
            const int target_end_slot =
                target_end_it != fs.end_positions.end() ? target_end_it->second.slot : target->start.slot;
            const int start_gap = target->start.slot - a.start.slot;
            const int end_gap = target_end_slot - declared.slot;
            bool ok = true;
            switch (m.kind) {
                case ManeuverKind::approach:
                    ok = end_gap > 0 && end_gap < start_gap;
                    break;
                case ManeuverKind::follow_vehicle:
                    ok = end_gap == start_gap;
                    break;
                case ManeuverKind::fall_back:
                    ok = end_gap > start_gap;
                    break;
                default:
                    break;
            }
            if (!ok) {
                report(src.end(a.id), "end_scene_inconsistent",
                       "end scene inconsistent with maneuver: " + std::string(to_keyword(m.kind)) +
                           " of actor '" + a.id + "' toward '" + *m.target + "' (start gap " +
                           std::to_string(start_gap) + " slots, declared end gap " + std::to_string(end_gap) +
                           ")");
            }
        }
    }

    std::sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.code, a.message) < std::tie(b.code, b.message);
    });
    return out;
}

}  // namespace sforge
