#pragma once

#include <string>

#include "sforge/checker.hpp"
#include "sforge/detailing.hpp"
#include "sforge/dsl.hpp"
#include "sforge/opendrive.hpp"
#include "sforge/openscenario.hpp"
#include "sforge/preview.hpp"
#include "sforge/rules_file.hpp"
#include "sforge/valuation.hpp"

namespace sforge {

// One functional scenario taken through the whole pipeline: parameter space
// plus timeline, default valuation, resolved road and storyboard, and the
// serialized artifacts.
struct CompiledScenario {
    FunctionalScenario fs;
    DetailedScenario detailed;
    ConcreteValuation defaults;
    RoadNetworkIR road;
    StoryboardIR storyboard;
    std::string xodr_text;
    std::string xosc_text;
    std::string rules_text;
};

// xodr_filename is the sibling path written into the scenario file.
inline CompiledScenario compile_scenario(const FunctionalScenario& fs, const std::string& xodr_filename,
                                         const ForgeConfig& config = ForgeConfig{}) {
    CompiledScenario out;
    out.fs = fs;
    out.detailed = detail_scenario(fs, config);
    out.defaults = assign_defaults(out.detailed.space);
    out.road = build_road_ir(out.detailed.space, out.defaults);
    out.road.name = fs.name;
    out.storyboard = build_storyboard(out.detailed.timeline, out.detailed.space, out.defaults, out.road,
                                      config);
    out.storyboard.name = fs.name;
    out.xodr_text = emit_opendrive_text(out.road);
    out.xosc_text = emit_openscenario_text(out.storyboard, xodr_filename);
    out.rules_text = emit_rules_file(out.detailed.space, out.defaults, fs.name);
    return out;
}

}  // namespace sforge
