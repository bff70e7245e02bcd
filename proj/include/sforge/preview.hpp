#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sforge/road_ir.hpp"
#include "sforge/rule_expr.hpp"
#include "sforge/storyboard.hpp"

namespace sforge {

namespace preview_detail {

struct Point {
    double x = 0.0, y = 0.0;
};

}  // namespace preview_detail

// Static plan-view picture: paved surface, lane boundaries, reference line,
// barrier and signal glyphs, actor start markers.
class SvgPreview {
  public:
    SvgPreview(const RoadNetworkIR& road, const StoryboardIR& storyboard)
        : road_(road), storyboard_(storyboard) {}

    std::string render() const {
        const int samples = 200;
        std::vector<double> offsets;  // cumulative lane boundaries, 0 first
        offsets.push_back(0.0);
        if (!road_.lane_sections.empty()) {
            double t = 0.0;
            for (const auto& lane : road_.lane_sections.front().right) {
                t -= lane.width;
                offsets.push_back(t);
            }
        }
        const double right_edge = offsets.back();

        // bounding box over the outer edges
        double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
        auto grow = [&](preview_detail::Point p) {
            min_x = std::min(min_x, p.x);
            min_y = std::min(min_y, p.y);
            max_x = std::max(max_x, p.x);
            max_y = std::max(max_y, p.y);
        };
        for (int i = 0; i <= samples; ++i) {
            const double s = road_.length * i / samples;
            grow(at(s, 0.0));
            grow(at(s, right_edge));
        }
        const double pad = 20.0;
        min_x -= pad;
        min_y -= pad;
        max_x += pad;
        max_y += pad;

        std::string svg;
        svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + num(min_x) + " " +
               num(-max_y) + " " + num(max_x - min_x) + " " + num(max_y - min_y) + "\">\n";
        svg += "  <g stroke-linecap=\"round\">\n";

        // paved surface as a closed band between the two outer edges
        std::string surface = "    <path d=\"M";
        for (int i = 0; i <= samples; ++i) {
            const double s = road_.length * i / samples;
            surface += pt(at(s, 0.0)) + " ";
        }
        surface += "L";
        for (int i = samples; i >= 0; --i) {
            const double s = road_.length * i / samples;
            surface += pt(at(s, right_edge)) + " ";
        }
        surface += "Z\" fill=\"#c8ccd0\" stroke=\"none\"/>\n";
        svg += surface;

        // lane boundaries (dashed inner, solid outer)
        for (size_t k = 0; k < offsets.size(); ++k) {
            const bool outer = k == 0 || k + 1 == offsets.size();
            svg += polyline(offsets[k], samples,
                            outer ? "#ffffff" : "#f5f5f5",
                            outer ? "" : "4 6", 0.4);
        }
        // reference line
        svg += polyline(0.0, samples, "#3b6fd4", "8 8", 0.3);

        // barriers
        for (const auto& rail : road_.objects) {
            std::string line = "    <path d=\"M";
            for (int i = 0; i <= samples; ++i) {
                const double s = rail.s_begin + (rail.s_end - rail.s_begin) * i / samples;
                line += pt(at(s, rail.t)) + " ";
            }
            line += "\" fill=\"none\" stroke=\"#555555\" stroke-width=\"1\"/>\n";
            svg += line;
        }

        // signals
        for (const auto& sig : road_.signals) {
            const preview_detail::Point p = at(sig.s, sig.t);
            svg += "    <circle cx=\"" + num(p.x) + "\" cy=\"" + num(-p.y) +
                   "\" r=\"3\" fill=\"#ffffff\" stroke=\"#c01818\" stroke-width=\"1.2\"/>\n";
            svg += "    <text x=\"" + num(p.x) + "\" y=\"" + num(-p.y + 1.4) +
                   "\" font-size=\"3.6\" text-anchor=\"middle\" fill=\"#c01818\">" + sig.subtype +
                   "</text>\n";
        }

        // actor start markers
        for (const auto& init : storyboard_.init) {
            const double center_t = lane_center_offset(init.lane_id);
            const preview_detail::Point p = at(init.s, center_t);
            const EntityRecord* entity = storyboard_.entity_of(init.actor);
            const bool truck = entity != nullptr && entity->type == VehicleType::truck;
            const double len = entity != nullptr ? entity->length : 4.5;
            const double wid = entity != nullptr ? entity->width : 1.8;
            svg += "    <g transform=\"translate(" + num(p.x) + "," + num(-p.y) + ") rotate(" +
                   num(-heading_deg(init.s)) + ")\">\n";
            svg += "      <rect x=\"" + num(-len / 2.0) + "\" y=\"" + num(-wid / 2.0) + "\" width=\"" +
                   num(len) + "\" height=\"" + num(wid) + "\" fill=\"" +
                   (truck ? "#d08020" : "#2f9b4e") + "\" stroke=\"#203020\" stroke-width=\"0.3\"/>\n";
            svg += "      <text x=\"0\" y=\"" + num(-wid / 2.0 - 1.0) +
                   "\" font-size=\"3.2\" text-anchor=\"middle\" fill=\"#203020\">" + init.actor +
                   "</text>\n";
            svg += "    </g>\n";
        }

        svg += "  </g>\n</svg>\n";
        return svg;
    }

  private:
    preview_detail::Point at(double s, double t) const {
        for (const auto& seg : road_.plan_view) {
            if (s <= seg.s0 + seg.length + 1e-9) {
                const Pose2 p = plan_view_pose_at(seg, std::max(0.0, s - seg.s0));
                return {p.x - t * std::sin(p.hdg), p.y + t * std::cos(p.hdg)};
            }
        }
        return {};
    }
    double heading_deg(double s) const {
        for (const auto& seg : road_.plan_view) {
            if (s <= seg.s0 + seg.length + 1e-9) {
                return plan_view_pose_at(seg, std::max(0.0, s - seg.s0)).hdg * 180.0 / 3.14159265358979323846;
            }
        }
        return 0.0;
    }
    double lane_center_offset(int lane_id) const {
        double t = 0.0;
        if (road_.lane_sections.empty()) return t;
        for (const auto& lane : road_.lane_sections.front().right) {
            if (lane.id == lane_id) return t - lane.width / 2.0;
            t -= lane.width;
        }
        return t;
    }
    static std::string num(double v) { return format_number(v); }
    std::string pt(preview_detail::Point p) const { return num(p.x) + "," + num(-p.y); }
    std::string polyline(double offset, int samples, const std::string& color, const std::string& dash,
                         double width) const {
        std::string line = "    <path d=\"M";
        for (int i = 0; i <= samples; ++i) {
            const double s = road_.length * i / samples;
            line += pt(at(s, offset)) + " ";
        }
        line += "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" + num(width) + "\"";
        if (!dash.empty()) line += " stroke-dasharray=\"" + dash + "\"";
        line += "/>\n";
        return line;
    }

    const RoadNetworkIR& road_;
    const StoryboardIR& storyboard_;
};

inline std::string render_preview(const RoadNetworkIR& road, const StoryboardIR& storyboard) {
    return SvgPreview(road, storyboard).render();
}

}  // namespace sforge
