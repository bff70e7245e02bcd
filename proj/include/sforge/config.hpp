#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sforge/rule_expr.hpp"
#include "sforge/vocabulary.hpp"

namespace sforge {

// Dimensions, initial-speed range and performance envelope of one vehicle
// class. Dimensions follow common German freeway vehicle geometry; initial
// speeds are 80-130 km/h for cars and 60-88 km/h for trucks.
struct VehicleClassSpec {
    double length = 4.5;   // m
    double width = 1.8;    // m
    double height = 1.5;   // m
    Interval initial_speed{22.2, 36.1};  // m/s
    double max_speed = 69.4;             // m/s
    double max_acceleration = 4.0;       // m/s2
    double max_deceleration = 9.0;       // m/s2

    bool operator==(const VehicleClassSpec&) const = default;
};

struct ForgeConfig {
    VehicleClassSpec car;
    VehicleClassSpec truck{12.0, 2.55, 3.8, Interval{16.7, 24.4}, 25.0, 2.5, 7.5};

    const VehicleClassSpec& vehicle(VehicleType t) const {
        return t == VehicleType::car ? car : truck;
    }

    bool operator==(const ForgeConfig&) const = default;
};

namespace config_detail {

inline void apply_vehicle_json(VehicleClassSpec& spec, const nlohmann::json& j) {
    if (j.contains("length")) spec.length = j.at("length").get<double>();
    if (j.contains("width")) spec.width = j.at("width").get<double>();
    if (j.contains("height")) spec.height = j.at("height").get<double>();
    if (j.contains("initial_speed")) {
        const auto& r = j.at("initial_speed");
        spec.initial_speed = {r.at(0).get<double>(), r.at(1).get<double>()};
    }
    if (j.contains("max_speed")) spec.max_speed = j.at("max_speed").get<double>();
    if (j.contains("max_acceleration")) spec.max_acceleration = j.at("max_acceleration").get<double>();
    if (j.contains("max_deceleration")) spec.max_deceleration = j.at("max_deceleration").get<double>();
}

}  // namespace config_detail

inline ForgeConfig parse_config(const std::string& json_text) {
    ForgeConfig cfg;
    const nlohmann::json j = nlohmann::json::parse(json_text);
    if (j.contains("vehicles")) {
        const auto& v = j.at("vehicles");
        if (v.contains("car")) config_detail::apply_vehicle_json(cfg.car, v.at("car"));
        if (v.contains("truck")) config_detail::apply_vehicle_json(cfg.truck, v.at("truck"));
    }
    return cfg;
}

inline ForgeConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open configuration file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

}  // namespace sforge
