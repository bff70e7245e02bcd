#pragma once

#include <array>
#include <cstdio>
#include <string>
#include <string_view>

#include "sforge/road_ir.hpp"
#include "sforge/xml.hpp"

namespace sforge {

// All geometry numbers carry 17 significant digits, enough for doubles to
// round-trip exactly through the file.
inline std::string format_17sig(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline constexpr int kOpenDriveRevMajor = 1;
inline constexpr int kOpenDriveRevMinor = 4;

// Vocabulary realized in the road file: the road level and the traffic
// infrastructure (layers 1 and 2).
inline constexpr std::array<std::string_view, 12> kOpenDriveConsumedKeywords = {
    "lanes",   "hard_shoulder", "straight", "curve_left",  "curve_right", "plane",
    "incline", "decline",       "crest",    "sag",         "speed_limit", "guard_rail",
};

inline XmlNode emit_opendrive(const RoadNetworkIR& ir) {
    XmlNode root("OpenDRIVE");
    XmlNode& header = root.child("header");
    header.set("revMajor", std::to_string(kOpenDriveRevMajor));
    header.set("revMinor", std::to_string(kOpenDriveRevMinor));
    header.set("name", ir.name);

    XmlNode& road = root.child("road");
    road.set("name", ir.name);
    road.set("length", format_17sig(ir.length));
    road.set("id", ir.road_id);
    road.set("junction", "-1");

    XmlNode& plan_view = road.child("planView");
    for (const auto& seg : ir.plan_view) {
        XmlNode& geometry = plan_view.child("geometry");
        geometry.set("s", format_17sig(seg.s0));
        geometry.set("x", format_17sig(seg.x0));
        geometry.set("y", format_17sig(seg.y0));
        geometry.set("hdg", format_17sig(seg.hdg0));
        geometry.set("length", format_17sig(seg.length));
        if (seg.shape == GeometrySegment::Shape::line) {
            geometry.child("line");
        } else {
            geometry.child("arc").set("curvature", format_17sig(seg.curvature));
        }
    }

    XmlNode& profile = road.child("elevationProfile");
    for (const auto& poly : ir.elevation) {
        XmlNode& elevation = profile.child("elevation");
        elevation.set("s", format_17sig(poly.s0));
        elevation.set("a", format_17sig(poly.a));
        elevation.set("b", format_17sig(poly.b));
        elevation.set("c", format_17sig(poly.c));
        elevation.set("d", format_17sig(poly.d));
    }

    XmlNode& lanes = road.child("lanes");
    for (const auto& section : ir.lane_sections) {
        XmlNode& lane_section = lanes.child("laneSection");
        lane_section.set("s", format_17sig(section.s0));
        XmlNode& center = lane_section.child("center");
        XmlNode& center_lane = center.child("lane");
        center_lane.set("id", "0");
        center_lane.set("type", "none");
        center_lane.set("level", "false");
        XmlNode& right = lane_section.child("right");
        for (const auto& lane : section.right) {
            XmlNode& entry = right.child("lane");
            entry.set("id", std::to_string(lane.id));
            entry.set("type", std::string(to_string(lane.type)));
            entry.set("level", "false");
            XmlNode& width = entry.child("width");
            width.set("sOffset", "0");
            width.set("a", format_17sig(lane.width));
            width.set("b", "0");
            width.set("c", "0");
            width.set("d", "0");
        }
    }

    if (!ir.signals.empty()) {
        XmlNode& signals = road.child("signals");
        for (const auto& sig : ir.signals) {
            XmlNode& signal = signals.child("signal");
            signal.set("s", format_17sig(sig.s));
            signal.set("t", format_17sig(sig.t));
            signal.set("id", sig.id);
            signal.set("name", sig.name);
            signal.set("dynamic", "no");
            signal.set("orientation", "+");
            signal.set("zOffset", "2");
            signal.set("country", sig.country);
            signal.set("type", sig.type);
            signal.set("subtype", sig.subtype);
            signal.set("value", format_17sig(sig.value));
            signal.set("unit", sig.unit);
        }
    }

    if (!ir.objects.empty()) {
        XmlNode& objects = road.child("objects");
        for (const auto& obj : ir.objects) {
            XmlNode& object = objects.child("object");
            object.set("id", obj.id);
            object.set("type", obj.type);
            object.set("name", obj.name);
            object.set("s", format_17sig(obj.s_begin));
            object.set("t", format_17sig(obj.t));
            object.set("zOffset", "0");
            object.set("hdg", "0");
            object.set("length", format_17sig(obj.s_end - obj.s_begin));
            object.set("width", "0.3");
            object.set("height", "0.8");
        }
    }
    return root;
}

inline std::string emit_opendrive_text(const RoadNetworkIR& ir) { return write_xml(emit_opendrive(ir)); }

struct OpenDriveReadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reader for the emitted subset; the round-trip oracle of the writer.
inline RoadNetworkIR read_opendrive(const XmlNode& root) {
    if (root.name != "OpenDRIVE") throw OpenDriveReadError("root element is not OpenDRIVE");
    const XmlNode* header = root.first("header");
    const XmlNode* road = root.first("road");
    if (header == nullptr || road == nullptr) throw OpenDriveReadError("missing header or road");

    RoadNetworkIR ir;
    ir.name = road->attribute_or("name", "");
    ir.road_id = road->attribute_or("id", "1");
    ir.length = std::stod(road->attribute_or("length", "0"));

    const XmlNode* plan_view = road->first("planView");
    if (plan_view == nullptr) throw OpenDriveReadError("missing planView");
    for (const XmlNode* geometry : plan_view->all("geometry")) {
        GeometrySegment seg;
        seg.s0 = std::stod(geometry->attribute_or("s", "0"));
        seg.x0 = std::stod(geometry->attribute_or("x", "0"));
        seg.y0 = std::stod(geometry->attribute_or("y", "0"));
        seg.hdg0 = std::stod(geometry->attribute_or("hdg", "0"));
        seg.length = std::stod(geometry->attribute_or("length", "0"));
        if (const XmlNode* arc = geometry->first("arc")) {
            seg.shape = GeometrySegment::Shape::arc;
            seg.curvature = std::stod(arc->attribute_or("curvature", "0"));
        } else if (geometry->first("line") != nullptr) {
            seg.shape = GeometrySegment::Shape::line;
        } else {
            throw OpenDriveReadError("geometry without line or arc");
        }
        ir.plan_view.push_back(seg);
    }

    if (const XmlNode* profile = road->first("elevationProfile")) {
        for (const XmlNode* e : profile->all("elevation")) {
            ir.elevation.push_back({std::stod(e->attribute_or("s", "0")), std::stod(e->attribute_or("a", "0")),
                                    std::stod(e->attribute_or("b", "0")), std::stod(e->attribute_or("c", "0")),
                                    std::stod(e->attribute_or("d", "0"))});
        }
    }

    const XmlNode* lanes = road->first("lanes");
    if (lanes == nullptr) throw OpenDriveReadError("missing lanes");
    for (const XmlNode* section_node : lanes->all("laneSection")) {
        LaneSection section;
        section.s0 = std::stod(section_node->attribute_or("s", "0"));
        if (const XmlNode* right = section_node->first("right")) {
            for (const XmlNode* lane : right->all("lane")) {
                LaneRecord record;
                record.id = std::stoi(lane->attribute_or("id", "-1"));
                record.type =
                    lane->attribute_or("type", "driving") == "shoulder" ? LaneType::shoulder : LaneType::driving;
                const XmlNode* width = lane->first("width");
                if (width == nullptr) throw OpenDriveReadError("lane without width");
                record.width = std::stod(width->attribute_or("a", "0"));
                section.right.push_back(record);
            }
        }
        ir.lane_sections.push_back(std::move(section));
    }

    if (const XmlNode* signals = road->first("signals")) {
        for (const XmlNode* s : signals->all("signal")) {
            SignalRecord sig;
            sig.s = std::stod(s->attribute_or("s", "0"));
            sig.t = std::stod(s->attribute_or("t", "0"));
            sig.id = s->attribute_or("id", "1");
            sig.name = s->attribute_or("name", "");
            sig.country = s->attribute_or("country", "DE");
            sig.type = s->attribute_or("type", "274");
            sig.subtype = s->attribute_or("subtype", "");
            sig.value = std::stod(s->attribute_or("value", "0"));
            sig.unit = s->attribute_or("unit", "km/h");
            ir.signals.push_back(sig);
        }
    }
    if (const XmlNode* objects = road->first("objects")) {
        for (const XmlNode* o : objects->all("object")) {
            RoadsideObject obj;
            obj.id = o->attribute_or("id", "1");
            obj.type = o->attribute_or("type", "barrier");
            obj.name = o->attribute_or("name", "");
            obj.s_begin = std::stod(o->attribute_or("s", "0"));
            obj.s_end = obj.s_begin + std::stod(o->attribute_or("length", "0"));
            obj.t = std::stod(o->attribute_or("t", "0"));
            obj.side = obj.t > 0.0 ? RailSide::left : RailSide::right;
            ir.objects.push_back(obj);
        }
    }
    return ir;
}

inline RoadNetworkIR read_opendrive_text(const std::string& text) {
    return read_opendrive(parse_xml(text));
}

}  // namespace sforge
