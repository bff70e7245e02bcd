#include "sforge/preview.hpp"

#include <gtest/gtest.h>

#include "sforge/compiler.hpp"

namespace {

using namespace sforge;

CompiledScenario compile(const std::string& text) {
    ParseResult r = parse_functional_scenario(text);
    EXPECT_TRUE(r.ok());
    return compile_scenario(*r.scenario, "road.xodr");
}

TEST(Preview, ContainsRoadActorsAndGlyphs) {
    const CompiledScenario c = compile(
        "road lanes 3 hard_shoulder\n"
        "road alignment curve_right\n"
        "road speed_limit 120\n"
        "road guard_rail right\n"
        "actor A1 car lane 1 slot 0\n"
        "actor A2 truck lane 2 slot 1\n");
    const std::string svg = render_preview(c.road, c.storyboard);
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("viewBox"), std::string::npos);
    // two actor markers with labels
    EXPECT_NE(svg.find(">A1</text>"), std::string::npos);
    EXPECT_NE(svg.find(">A2</text>"), std::string::npos);
    // one signal glyph showing the limit
    EXPECT_NE(svg.find(">120</text>"), std::string::npos);
    EXPECT_NE(svg.find("<circle"), std::string::npos);
    // barrier path and road surface
    EXPECT_NE(svg.find("#555555"), std::string::npos);
    EXPECT_NE(svg.find("#c8ccd0"), std::string::npos);
}

TEST(Preview, DeterministicOutput) {
    const CompiledScenario c = compile("road lanes 2\nactor ego car lane 1 slot 0\n");
    EXPECT_EQ(render_preview(c.road, c.storyboard), render_preview(c.road, c.storyboard));
}

TEST(Preview, StraightRoadHasNoSignalGlyphs) {
    const CompiledScenario c = compile("road lanes 2\nactor ego car lane 1 slot 0\n");
    const std::string svg = render_preview(c.road, c.storyboard);
    EXPECT_EQ(svg.find("<circle"), std::string::npos);
}

}  // namespace
