#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "sforge/parameter_space.hpp"
#include "sforge/vocabulary.hpp"

namespace sforge {

// Plan-view element of the reference line. Curvature follows the road-format
// convention: positive bends left.
struct GeometrySegment {
    enum class Shape { line, arc };

    double s0 = 0.0;
    double x0 = 0.0, y0 = 0.0;
    double hdg0 = 0.0;
    double length = 0.0;
    Shape shape = Shape::line;
    double curvature = 0.0;  // arcs only, 1/m

    bool operator==(const GeometrySegment&) const = default;
};

struct Pose2 {
    double x = 0.0, y = 0.0, hdg = 0.0;
};

// Closed form end pose of a segment traversed at unit speed.
inline Pose2 plan_view_end_pose(const GeometrySegment& seg) {
    if (seg.shape == GeometrySegment::Shape::line) {
        return {seg.x0 + seg.length * std::cos(seg.hdg0), seg.y0 + seg.length * std::sin(seg.hdg0),
                seg.hdg0};
    }
    const double k = seg.curvature;
    if (k == 0.0) throw std::invalid_argument("arc with zero curvature; use a line segment");
    const double hdg1 = seg.hdg0 + k * seg.length;
    return {seg.x0 + (std::sin(hdg1) - std::sin(seg.hdg0)) / k,
            seg.y0 - (std::cos(hdg1) - std::cos(seg.hdg0)) / k, hdg1};
}

// Pose after traveling ds into the segment.
inline Pose2 plan_view_pose_at(const GeometrySegment& seg, double ds) {
    GeometrySegment part = seg;
    part.length = ds;
    return plan_view_end_pose(part);
}

// elev(ds) = a + b*ds + c*ds^2 + d*ds^3 for ds = s - s0.
struct ElevationPoly {
    double s0 = 0.0;
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    bool operator==(const ElevationPoly&) const = default;

    double value_at(double ds) const { return a + b * ds + c * ds * ds + d * ds * ds * ds; }
    double slope_at(double ds) const { return b + 2.0 * c * ds + 3.0 * d * ds * ds; }
};

// Vertical profile pieces for one elevation keyword. Grades are linear; a
// crest or sag inserts a parabola of curvature 1/(2R) centered at L/2 with
// tangent length T on both sides. Degenerate entry/exit pieces (the curve
// spans the whole section) are dropped.
inline std::vector<ElevationPoly> elevation_polys(ElevationKind kind, double s1, double s2, double radius,
                                                  double tangent_length, double section_length) {
    std::vector<ElevationPoly> out;
    if (kind == ElevationKind::plane || kind == ElevationKind::incline || kind == ElevationKind::decline) {
        out.push_back({0.0, 0.0, s1, 0.0, 0.0});
        return out;
    }
    const double T = tangent_length;
    const double L = section_length;
    const double m = L / 2.0;
    if (2.0 * T > L * (1.0 + 1e-9)) {
        throw std::invalid_argument("vertical curve does not fit the section: 2T > L");
    }
    const double c = (kind == ElevationKind::crest ? -1.0 : 1.0) / (2.0 * radius);
    const double entry_len = m - T;
    constexpr double kTiny = 1e-9;

    double z = 0.0;
    if (entry_len > kTiny) {
        out.push_back({0.0, 0.0, s1, 0.0, 0.0});
        z = s1 * entry_len;
    }
    const double curve_start = entry_len > kTiny ? entry_len : 0.0;
    out.push_back({curve_start, z, s1, c, 0.0});
    const double curve_len = 2.0 * T;
    const double z_exit = z + s1 * curve_len + c * curve_len * curve_len;
    if (m + T < L - kTiny) {
        out.push_back({m + T, z_exit, s2, 0.0, 0.0});
    }
    return out;
}

enum class LaneType { driving, shoulder };

inline std::string_view to_string(LaneType t) { return t == LaneType::driving ? "driving" : "shoulder"; }

// One entry right of the reference line; width polynomial is the constant a.
struct LaneRecord {
    int id = -1;  // negative, decreasing rightward
    LaneType type = LaneType::driving;
    double width = 3.5;

    bool operator==(const LaneRecord&) const = default;
};

struct LaneSection {
    double s0 = 0.0;
    std::vector<LaneRecord> right;  // ordered -1, -2, ...

    bool operator==(const LaneSection&) const = default;
};

struct SignalRecord {
    std::string id = "1";
    double s = 0.0;
    double t = 0.0;
    std::string name = "speed_limit";
    std::string country = "DE";
    std::string type = "274";    // German speed-limit sign class
    std::string subtype = "120"; // the posted value
    double value = 120.0;        // km/h
    std::string unit = "km/h";

    bool operator==(const SignalRecord&) const = default;
};

struct RoadsideObject {
    std::string id = "1";
    std::string type = "barrier";
    std::string name = "guardRail";
    RailSide side = RailSide::right;
    double s_begin = 0.0;
    double s_end = 0.0;
    double t = 0.0;

    bool operator==(const RoadsideObject&) const = default;
};

// Resolved road ready for serialization: plan view, vertical profile, lane
// layout, signals and roadside objects of the single section.
struct RoadNetworkIR {
    std::string road_id = "1";
    std::string name = "section";
    double length = 0.0;
    std::vector<GeometrySegment> plan_view;
    std::vector<ElevationPoly> elevation;
    std::vector<LaneSection> lane_sections;
    std::vector<SignalRecord> signals;
    std::vector<RoadsideObject> objects;

    bool operator==(const RoadNetworkIR&) const = default;

    double total_width() const {
        double w = 0.0;
        if (!lane_sections.empty()) {
            for (const auto& lane : lane_sections.front().right) w += lane.width;
        }
        return w;
    }
};

// Realizes the valuation's road-level parameters as geometry. The reference
// line starts at the origin heading +x and runs along the left edge of the
// leftmost driving lane; every lane lies to its right.
inline RoadNetworkIR build_road_ir(const ParameterSpace& ps, const ConcreteValuation& v) {
    const ObjectNode* road = nullptr;
    for (const auto& o : ps.objects) {
        if (o.kind == ObjectKind::road_section) {
            road = &o;
            break;
        }
    }
    if (road == nullptr) throw std::invalid_argument("parameter space has no road_section object");

    RoadNetworkIR ir;
    ir.length = v.at({road->id, "L"});

    // Plan view: one line or one arc covering [0, L].
    GeometrySegment seg;
    seg.length = ir.length;
    const std::string alignment = road->attr("alignment", "straight");
    if (alignment == "straight") {
        seg.shape = GeometrySegment::Shape::line;
    } else {
        seg.shape = GeometrySegment::Shape::arc;
        const double radius = v.at({road->id, "R_h"});
        seg.curvature = (alignment == "curve_left" ? 1.0 : -1.0) / radius;
    }
    ir.plan_view.push_back(seg);

    // Elevation.
    const std::string elevation = road->attr("elevation", "plane");
    const ElevationKind kind = *enum_from_keyword<ElevationKind>(elevation);
    const double s1 = v.at({road->id, "s1"});
    if (kind == ElevationKind::crest || kind == ElevationKind::sag) {
        ir.elevation = elevation_polys(kind, s1, v.at({road->id, "s2"}), v.at({road->id, "R"}),
                                       v.at({road->id, "T"}), ir.length);
    } else {
        ir.elevation = elevation_polys(kind, s1, s1, 0.0, 0.0, ir.length);
    }

    // Lanes: driving lanes leftmost-first (ids -1, -2, ...), shoulder last.
    LaneSection section;
    std::vector<const ObjectNode*> driving;
    const ObjectNode* shoulder = nullptr;
    for (const auto& o : ps.objects) {
        if (o.kind != ObjectKind::lane) continue;
        if (o.attr("type") == "shoulder") {
            shoulder = &o;
        } else {
            driving.push_back(&o);
        }
    }
    // grid index n = leftmost; emit in descending grid index
    std::sort(driving.begin(), driving.end(), [](const ObjectNode* a, const ObjectNode* b) {
        return std::stoi(a->attr("index", "0")) > std::stoi(b->attr("index", "0"));
    });
    int next_id = -1;
    for (const ObjectNode* lane : driving) {
        section.right.push_back({next_id--, LaneType::driving, v.at({lane->id, "w"})});
    }
    if (shoulder != nullptr) {
        section.right.push_back({next_id--, LaneType::shoulder, v.at({shoulder->id, "w"})});
    }
    ir.lane_sections.push_back(std::move(section));

    // Signals and barriers sit just outside the paved width.
    int object_id = 1;
    for (const auto& o : ps.objects) {
        if (o.kind == ObjectKind::signal) {
            SignalRecord sig;
            sig.id = std::to_string(object_id++);
            sig.s = v.at({o.id, "s_pos"});
            sig.t = -(ir.total_width() + 1.0);
            sig.subtype = o.attr("limit_kmh", "120");
            sig.value = std::stod(sig.subtype);
            ir.signals.push_back(sig);
        } else if (o.kind == ObjectKind::guard_rail) {
            RoadsideObject rail;
            rail.id = std::to_string(object_id++);
            rail.side = o.attr("side") == "left" ? RailSide::left : RailSide::right;
            rail.s_begin = v.at({o.id, "s_pos"});
            rail.s_end = ir.length;
            rail.t = rail.side == RailSide::left ? 0.5 : -(ir.total_width() + 0.5);
            ir.objects.push_back(rail);
        }
    }
    return ir;
}

}  // namespace sforge
