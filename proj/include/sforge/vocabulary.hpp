#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sforge {

// Scenario content is structured into five layers: road level (L1), traffic
// infrastructure (L2), temporary manipulations (L3, unpopulated by the
// freeway vocabulary), movable objects (L4) and environment (L5).
enum class LayerId { L1 = 1, L2 = 2, L3 = 3, L4 = 4, L5 = 5 };

enum class VehicleType { car, truck };
enum class ManeuverKind {
    follow_lane,
    follow_vehicle,
    approach,
    lane_change_left,
    lane_change_right,
    fall_back,
};
enum class Alignment { straight, curve_left, curve_right };
enum class ElevationKind { plane, incline, decline, crest, sag };
enum class Weather { clear, overcast, rain, fog };
enum class Daytime { morning, midday, evening, night };
enum class RailSide { left, right };

struct VocabularyEntry {
    std::string_view keyword;
    LayerId layer;
};

// Every keyword of the scenario DSL, with the layer it belongs to. L1+L2 feed
// the road file, L4+L5 feed the scenario file; the split is tested
// exhaustively against the emitters' consumed-keyword lists.
inline constexpr std::array<VocabularyEntry, 28> kVocabulary = {{
    {"lanes", LayerId::L1},
    {"hard_shoulder", LayerId::L1},
    {"straight", LayerId::L1},
    {"curve_left", LayerId::L1},
    {"curve_right", LayerId::L1},
    {"plane", LayerId::L1},
    {"incline", LayerId::L1},
    {"decline", LayerId::L1},
    {"crest", LayerId::L1},
    {"sag", LayerId::L1},
    {"speed_limit", LayerId::L2},
    {"guard_rail", LayerId::L2},
    {"car", LayerId::L4},
    {"truck", LayerId::L4},
    {"follow_lane", LayerId::L4},
    {"follow_vehicle", LayerId::L4},
    {"approach", LayerId::L4},
    {"lane_change_left", LayerId::L4},
    {"lane_change_right", LayerId::L4},
    {"fall_back", LayerId::L4},
    {"clear", LayerId::L5},
    {"overcast", LayerId::L5},
    {"rain", LayerId::L5},
    {"fog", LayerId::L5},
    {"morning", LayerId::L5},
    {"midday", LayerId::L5},
    {"evening", LayerId::L5},
    {"night", LayerId::L5},
}};

inline std::optional<LayerId> try_layer_of(std::string_view keyword) {
    for (const auto& e : kVocabulary) {
        if (e.keyword == keyword) return e.layer;
    }
    return std::nullopt;
}

inline LayerId layer_of(std::string_view keyword) {
    if (auto l = try_layer_of(keyword)) return *l;
    throw std::invalid_argument("unknown vocabulary keyword: " + std::string(keyword));
}

// --- enum <-> keyword spellings used by the DSL and canonical outputs ---

inline std::string_view to_keyword(VehicleType v) {
    return v == VehicleType::car ? "car" : "truck";
}

inline std::string_view to_keyword(ManeuverKind m) {
    switch (m) {
        case ManeuverKind::follow_lane: return "follow_lane";
        case ManeuverKind::follow_vehicle: return "follow_vehicle";
        case ManeuverKind::approach: return "approach";
        case ManeuverKind::lane_change_left: return "lane_change_left";
        case ManeuverKind::lane_change_right: return "lane_change_right";
        case ManeuverKind::fall_back: return "fall_back";
    }
    return "";
}

inline std::string_view to_keyword(Alignment a) {
    switch (a) {
        case Alignment::straight: return "straight";
        case Alignment::curve_left: return "curve_left";
        case Alignment::curve_right: return "curve_right";
    }
    return "";
}

inline std::string_view to_keyword(ElevationKind e) {
    switch (e) {
        case ElevationKind::plane: return "plane";
        case ElevationKind::incline: return "incline";
        case ElevationKind::decline: return "decline";
        case ElevationKind::crest: return "crest";
        case ElevationKind::sag: return "sag";
    }
    return "";
}

inline std::string_view to_keyword(Weather w) {
    switch (w) {
        case Weather::clear: return "clear";
        case Weather::overcast: return "overcast";
        case Weather::rain: return "rain";
        case Weather::fog: return "fog";
    }
    return "";
}

inline std::string_view to_keyword(Daytime d) {
    switch (d) {
        case Daytime::morning: return "morning";
        case Daytime::midday: return "midday";
        case Daytime::evening: return "evening";
        case Daytime::night: return "night";
    }
    return "";
}

inline std::string_view to_keyword(RailSide s) {
    return s == RailSide::left ? "left" : "right";
}

template <typename Enum>
inline std::optional<Enum> enum_from_keyword(std::string_view) = delete;

template <>
inline std::optional<VehicleType> enum_from_keyword<VehicleType>(std::string_view kw) {
    if (kw == "car") return VehicleType::car;
    if (kw == "truck") return VehicleType::truck;
    return std::nullopt;
}

template <>
inline std::optional<ManeuverKind> enum_from_keyword<ManeuverKind>(std::string_view kw) {
    for (ManeuverKind m : {ManeuverKind::follow_lane, ManeuverKind::follow_vehicle,
                           ManeuverKind::approach, ManeuverKind::lane_change_left,
                           ManeuverKind::lane_change_right, ManeuverKind::fall_back}) {
        if (to_keyword(m) == kw) return m;
    }
    return std::nullopt;
}

template <>
inline std::optional<Alignment> enum_from_keyword<Alignment>(std::string_view kw) {
    for (Alignment a : {Alignment::straight, Alignment::curve_left, Alignment::curve_right}) {
        if (to_keyword(a) == kw) return a;
    }
    return std::nullopt;
}

template <>
inline std::optional<ElevationKind> enum_from_keyword<ElevationKind>(std::string_view kw) {
    for (ElevationKind e : {ElevationKind::plane, ElevationKind::incline, ElevationKind::decline,
                            ElevationKind::crest, ElevationKind::sag}) {
        if (to_keyword(e) == kw) return e;
    }
    return std::nullopt;
}

template <>
inline std::optional<Weather> enum_from_keyword<Weather>(std::string_view kw) {
    for (Weather w : {Weather::clear, Weather::overcast, Weather::rain, Weather::fog}) {
        if (to_keyword(w) == kw) return w;
    }
    return std::nullopt;
}

template <>
inline std::optional<Daytime> enum_from_keyword<Daytime>(std::string_view kw) {
    for (Daytime d : {Daytime::morning, Daytime::midday, Daytime::evening, Daytime::night}) {
        if (to_keyword(d) == kw) return d;
    }
    return std::nullopt;
}

inline bool maneuver_needs_target(ManeuverKind m) {
    return m == ManeuverKind::follow_vehicle || m == ManeuverKind::approach ||
           m == ManeuverKind::fall_back;
}

}  // namespace sforge
