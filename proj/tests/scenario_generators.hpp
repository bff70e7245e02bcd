#pragma once

#include <array>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "sforge/scenario.hpp"

namespace sforge::testgen {

// Valid-by-construction scenario generator exercising every maneuver kind,
// all road/environment keywords and optional end declarations.
inline FunctionalScenario random_scenario(std::mt19937_64& rng) {
    FunctionalScenario fs;
    fs.name = "r" + std::to_string(rng() % 100000);
    fs.road.n_driving_lanes = 2 + static_cast<int>(rng() % 3);
    fs.road.hard_shoulder = rng() % 2 == 0;
    fs.road.alignment = static_cast<Alignment>(rng() % 3);
    fs.road.elevation = static_cast<ElevationKind>(rng() % 5);
    if (rng() % 2 == 0) fs.road.speed_limit_kmh = std::array<int, 4>{80, 100, 120, 130}[rng() % 4];
    if (rng() % 3 == 0) fs.road.guard_rail.insert(RailSide::left);
    if (rng() % 3 == 0) fs.road.guard_rail.insert(RailSide::right);
    fs.environment.weather = static_cast<Weather>(rng() % 4);
    fs.environment.daytime = static_cast<Daytime>(rng() % 4);

    const int n_actors = 1 + static_cast<int>(rng() % 3);
    std::set<GridPosition> taken;
    for (int i = 0; i < n_actors; ++i) {
        ActorSpec a;
        a.id = "A" + std::to_string(i + 1);
        a.vehicle_type = rng() % 2 == 0 ? VehicleType::car : VehicleType::truck;
        do {
            a.start = {1 + static_cast<int>(rng() % fs.road.n_driving_lanes),
                       static_cast<int>(rng() % 9) - 3};
        } while (!taken.insert(a.start).second);
        fs.actors.push_back(a);
    }

    std::set<GridPosition> ends_taken;
    for (const auto& a : fs.actors) {
        // the nearest same-lane actor ahead, if any, can serve as a target
        const ActorSpec* ahead = nullptr;
        for (const auto& other : fs.actors) {
            if (other.id == a.id || other.start.lane != a.start.lane) continue;
            if (other.start.slot > a.start.slot &&
                (ahead == nullptr || other.start.slot < ahead->start.slot)) {
                ahead = &other;
            }
        }
        std::vector<ManeuverSpec> options{{ManeuverKind::follow_lane, std::nullopt}};
        if (a.start.lane < fs.road.n_driving_lanes) {
            options.push_back({ManeuverKind::lane_change_left, std::nullopt});
        }
        if (a.start.lane > 1) options.push_back({ManeuverKind::lane_change_right, std::nullopt});
        if (ahead != nullptr) {
            options.push_back({ManeuverKind::approach, ahead->id});
            options.push_back({ManeuverKind::follow_vehicle, ahead->id});
            options.push_back({ManeuverKind::fall_back, ahead->id});
        }
        const ManeuverSpec m = options[rng() % options.size()];
        fs.start_maneuvers[a.id] = m;

        // occasionally declare a consistent end scene for untargeted kinds
        if (rng() % 3 == 0 && !m.target) {
            GridPosition end = a.start;
            if (m.kind == ManeuverKind::lane_change_left) end.lane += 1;
            if (m.kind == ManeuverKind::lane_change_right) end.lane -= 1;
            if (ends_taken.insert(end).second) fs.end_positions[a.id] = end;
        }
    }
    return fs;
}

}  // namespace sforge::testgen
