#pragma once

#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sforge/scenario.hpp"

namespace sforge {

// One statement per line, `#` starts a comment:
//
//   scenario <string>
//   road lanes <2|3|4> [hard_shoulder]
//   road alignment <straight|curve_left|curve_right>
//   road elevation <plane|incline|decline|crest|sag>
//   road speed_limit <80|100|120|130>
//   road guard_rail <left|right|both>
//   env weather <clear|overcast|rain|fog>
//   env daytime <morning|midday|evening|night>
//   actor <id> <car|truck> lane <int> slot <int>
//   start <id> <maneuver> [of <id>]
//   end <id> lane <int> slot <int>
//
// Omitted statements default to: name "scenario", alignment straight,
// elevation plane, weather clear, daytime midday, maneuver follow_lane.
// `road lanes` and at least one `actor` are mandatory.

struct ParseResult {
    std::optional<FunctionalScenario> scenario;  // set iff diagnostics carry no error
    Diagnostics diagnostics;

    bool ok() const { return scenario.has_value(); }
};

namespace dsl_detail {

struct Token {
    std::string text;
    int column = 0;  // 1-based
};

inline std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> tokens;
    size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#') break;
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        if (line[i] == '"') {
            const size_t start = i++;
            std::string text;
            while (i < line.size() && line[i] != '"') text += line[i++];
            if (i < line.size()) ++i;  // closing quote
            tokens.push_back({std::move(text), static_cast<int>(start) + 1});
            continue;
        }
        const size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#') ++i;
        tokens.push_back({std::string(line.substr(start, i - start)), static_cast<int>(start) + 1});
    }
    return tokens;
}

inline std::optional<int> parse_int(const std::string& text) {
    int value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

inline bool valid_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    }
    return true;
}

}  // namespace dsl_detail

// Total parser: never throws on input text; every problem becomes a
// located diagnostic. A scenario is returned only when it satisfies all
// type invariants.
inline ParseResult parse_functional_scenario(std::string_view text) {
    using dsl_detail::Token;
    ParseResult result;
    Diagnostics& diags = result.diagnostics;

    FunctionalScenario fs;
    SourceIndex src;
    bool saw_scenario = false, saw_lanes = false, saw_alignment = false, saw_elevation = false;
    bool saw_limit = false, saw_weather = false, saw_daytime = false;

    std::istringstream stream{std::string(text)};
    std::string line;
    int line_no = 0;
    auto error = [&diags](int line, int col, std::string code, std::string msg) {
        diags.push_back({Severity::error, line, col, std::move(code), std::move(msg)});
    };

    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto tokens = dsl_detail::tokenize(line);
        if (tokens.empty()) continue;
        const Token& head = tokens.front();

        auto expect_count = [&](size_t n_min, size_t n_max, const char* usage) {
            if (tokens.size() >= n_min && tokens.size() <= n_max) return true;
            error(line_no, head.column, "malformed_statement",
                  "expected '" + std::string(usage) + "'");
            return false;
        };
        auto int_at = [&](size_t idx) -> std::optional<int> {
            auto v = dsl_detail::parse_int(tokens[idx].text);
            if (!v) {
                error(line_no, tokens[idx].column, "malformed_statement",
                      "expected an integer, got '" + tokens[idx].text + "'");
            }
            return v;
        };

        if (head.text == "scenario") {
            if (!expect_count(2, 2, "scenario <name>")) continue;
            if (saw_scenario) {
                error(line_no, head.column, "duplicate_statement", "scenario name declared twice");
                continue;
            }
            saw_scenario = true;
            fs.name = tokens[1].text;
        } else if (head.text == "road") {
            if (tokens.size() < 2) {
                error(line_no, head.column, "malformed_statement", "expected 'road <property> ...'");
                continue;
            }
            const Token& prop = tokens[1];
            if (prop.text == "lanes") {
                if (!expect_count(3, 4, "road lanes <2|3|4> [hard_shoulder]")) continue;
                if (saw_lanes) {
                    error(line_no, head.column, "duplicate_statement", "road lanes declared twice");
                    continue;
                }
                auto n = int_at(2);
                if (!n) continue;
                if (*n < 2 || *n > 4) {
                    error(line_no, tokens[2].column, "lane_count_invalid",
                          "road must have 2, 3 or 4 driving lanes, got " + tokens[2].text);
                    continue;
                }
                if (tokens.size() == 4) {
                    if (tokens[3].text != "hard_shoulder") {
                        error(line_no, tokens[3].column, "unknown_keyword",
                              "unknown keyword '" + tokens[3].text + "' (expected 'hard_shoulder')");
                        continue;
                    }
                    fs.road.hard_shoulder = true;
                }
                saw_lanes = true;
                fs.road.n_driving_lanes = *n;
                src.road_stmt = {line_no, head.column};
            } else if (prop.text == "alignment") {
                if (!expect_count(3, 3, "road alignment <straight|curve_left|curve_right>")) continue;
                auto a = enum_from_keyword<Alignment>(tokens[2].text);
                if (!a) {
                    error(line_no, tokens[2].column, "unknown_keyword",
                          "unknown alignment '" + tokens[2].text + "'");
                    continue;
                }
                if (saw_alignment) {
                    error(line_no, head.column, "duplicate_statement", "road alignment declared twice");
                    continue;
                }
                saw_alignment = true;
                fs.road.alignment = *a;
            } else if (prop.text == "elevation") {
                if (!expect_count(3, 3, "road elevation <plane|incline|decline|crest|sag>")) continue;
                auto e = enum_from_keyword<ElevationKind>(tokens[2].text);
                if (!e) {
                    error(line_no, tokens[2].column, "unknown_keyword",
                          "unknown elevation '" + tokens[2].text + "'");
                    continue;
                }
                if (saw_elevation) {
                    error(line_no, head.column, "duplicate_statement", "road elevation declared twice");
                    continue;
                }
                saw_elevation = true;
                fs.road.elevation = *e;
            } else if (prop.text == "speed_limit") {
                if (!expect_count(3, 3, "road speed_limit <80|100|120|130>")) continue;
                auto v = int_at(2);
                if (!v) continue;
                if (*v != 80 && *v != 100 && *v != 120 && *v != 130) {
                    error(line_no, tokens[2].column, "speed_limit_invalid",
                          "speed limit must be one of 80, 100, 120, 130 km/h, got " + tokens[2].text);
                    continue;
                }
                if (saw_limit) {
                    error(line_no, head.column, "duplicate_statement", "road speed_limit declared twice");
                    continue;
                }
                saw_limit = true;
                fs.road.speed_limit_kmh = *v;
            } else if (prop.text == "guard_rail") {
                if (!expect_count(3, 3, "road guard_rail <left|right|both>")) continue;
                const std::string& side = tokens[2].text;
                if (side == "left") {
                    fs.road.guard_rail.insert(RailSide::left);
                } else if (side == "right") {
                    fs.road.guard_rail.insert(RailSide::right);
                } else if (side == "both") {
                    fs.road.guard_rail.insert(RailSide::left);
                    fs.road.guard_rail.insert(RailSide::right);
                } else {
                    error(line_no, tokens[2].column, "unknown_keyword",
                          "unknown guard rail side '" + side + "'");
                }
            } else {
                error(line_no, prop.column, "unknown_keyword", "unknown road property '" + prop.text + "'");
            }
        } else if (head.text == "env") {
            if (tokens.size() < 2) {
                error(line_no, head.column, "malformed_statement", "expected 'env <property> <value>'");
                continue;
            }
            const Token& prop = tokens[1];
            if (prop.text == "weather") {
                if (!expect_count(3, 3, "env weather <clear|overcast|rain|fog>")) continue;
                auto w = enum_from_keyword<Weather>(tokens[2].text);
                if (!w) {
                    error(line_no, tokens[2].column, "unknown_keyword",
                          "unknown weather '" + tokens[2].text + "'");
                    continue;
                }
                if (saw_weather) {
                    error(line_no, head.column, "duplicate_statement", "env weather declared twice");
                    continue;
                }
                saw_weather = true;
                fs.environment.weather = *w;
            } else if (prop.text == "daytime") {
                if (!expect_count(3, 3, "env daytime <morning|midday|evening|night>")) continue;
                auto d = enum_from_keyword<Daytime>(tokens[2].text);
                if (!d) {
                    error(line_no, tokens[2].column, "unknown_keyword",
                          "unknown daytime '" + tokens[2].text + "'");
                    continue;
                }
                if (saw_daytime) {
                    error(line_no, head.column, "duplicate_statement", "env daytime declared twice");
                    continue;
                }
                saw_daytime = true;
                fs.environment.daytime = *d;
            } else {
                error(line_no, prop.column, "unknown_keyword", "unknown env property '" + prop.text + "'");
            }
        } else if (head.text == "actor") {
            if (!expect_count(7, 7, "actor <id> <car|truck> lane <int> slot <int>")) continue;
            ActorSpec actor;
            actor.id = tokens[1].text;
            if (!dsl_detail::valid_identifier(actor.id)) {
                error(line_no, tokens[1].column, "malformed_statement",
                      "'" + actor.id + "' is not a valid identifier");
                continue;
            }
            auto vt = enum_from_keyword<VehicleType>(tokens[2].text);
            if (!vt) {
                error(line_no, tokens[2].column, "unknown_keyword",
                      "unknown vehicle type '" + tokens[2].text + "'");
                continue;
            }
            if (tokens[3].text != "lane" || tokens[5].text != "slot") {
                error(line_no, tokens[3].column, "malformed_statement",
                      "expected 'actor <id> <type> lane <int> slot <int>'");
                continue;
            }
            auto lane = int_at(4);
            auto slot = int_at(6);
            if (!lane || !slot) continue;
            actor.vehicle_type = *vt;
            actor.start = {*lane, *slot};
            if (src.actor_stmt.count(actor.id)) {
                error(line_no, tokens[1].column, "duplicate_actor_id",
                      "actor id '" + actor.id + "' declared more than once");
                continue;
            }
            src.actor_stmt[actor.id] = {line_no, tokens[1].column};
            fs.actors.push_back(std::move(actor));
        } else if (head.text == "start") {
            if (!expect_count(3, 5, "start <id> <maneuver> [of <id>]")) continue;
            const std::string& id = tokens[1].text;
            auto kind = enum_from_keyword<ManeuverKind>(tokens[2].text);
            if (!kind) {
                error(line_no, tokens[2].column, "unknown_keyword",
                      "unknown maneuver '" + tokens[2].text + "'");
                continue;
            }
            ManeuverSpec m{*kind, std::nullopt};
            if (tokens.size() == 4) {
                error(line_no, tokens[3].column, "malformed_statement", "expected 'of <id>'");
                continue;
            }
            if (tokens.size() == 5) {
                if (tokens[3].text != "of") {
                    error(line_no, tokens[3].column, "malformed_statement", "expected 'of <id>'");
                    continue;
                }
                m.target = tokens[4].text;
            }
            if (src.start_stmt.count(id)) {
                error(line_no, tokens[1].column, "duplicate_statement",
                      "start maneuver of actor '" + id + "' declared twice");
                continue;
            }
            src.start_stmt[id] = {line_no, tokens[1].column};
            fs.start_maneuvers[id] = std::move(m);
        } else if (head.text == "end") {
            if (!expect_count(6, 6, "end <id> lane <int> slot <int>")) continue;
            const std::string& id = tokens[1].text;
            if (tokens[2].text != "lane" || tokens[4].text != "slot") {
                error(line_no, tokens[2].column, "malformed_statement",
                      "expected 'end <id> lane <int> slot <int>'");
                continue;
            }
            auto lane = int_at(3);
            auto slot = int_at(5);
            if (!lane || !slot) continue;
            if (src.end_stmt.count(id)) {
                error(line_no, tokens[1].column, "duplicate_statement",
                      "end position of actor '" + id + "' declared twice");
                continue;
            }
            src.end_stmt[id] = {line_no, tokens[1].column};
            fs.end_positions[id] = {*lane, *slot};
        } else {
            error(line_no, head.column, "unknown_keyword", "unknown keyword '" + head.text + "'");
        }
    }

    if (!saw_lanes) {
        diags.push_back({Severity::error, 0, 0, "missing_road", "missing mandatory 'road lanes' statement"});
    }

    // Every actor gets an explicit start maneuver; omitted ones follow their lane.
    for (const auto& a : fs.actors) {
        if (!fs.start_maneuvers.count(a.id)) fs.start_maneuvers[a.id] = ManeuverSpec{};
    }

    if (!has_errors(diags)) {
        Diagnostics semantic = validate_scenario(fs, src);
        diags.insert(diags.end(), semantic.begin(), semantic.end());
    }
    if (!has_errors(diags)) result.scenario = std::move(fs);
    return result;
}

// Canonical pretty-printer; parse(print(fs)) == fs for every valid scenario.
inline std::string print_functional_scenario(const FunctionalScenario& fs) {
    std::string out;
    auto emit = [&out](const std::string& s) {
        out += s;
        out += '\n';
    };
    const bool quoted = fs.name.find_first_of(" \t#") != std::string::npos || fs.name.empty();
    emit("scenario " + (quoted ? "\"" + fs.name + "\"" : fs.name));
    emit("road lanes " + std::to_string(fs.road.n_driving_lanes) +
         (fs.road.hard_shoulder ? " hard_shoulder" : ""));
    emit("road alignment " + std::string(to_keyword(fs.road.alignment)));
    emit("road elevation " + std::string(to_keyword(fs.road.elevation)));
    if (fs.road.speed_limit_kmh) emit("road speed_limit " + std::to_string(*fs.road.speed_limit_kmh));
    if (fs.road.guard_rail.size() == 2) {
        emit("road guard_rail both");
    } else {
        for (RailSide side : fs.road.guard_rail) emit("road guard_rail " + std::string(to_keyword(side)));
    }
    emit("env weather " + std::string(to_keyword(fs.environment.weather)));
    emit("env daytime " + std::string(to_keyword(fs.environment.daytime)));
    for (const auto& a : fs.actors) {
        emit("actor " + a.id + " " + std::string(to_keyword(a.vehicle_type)) + " lane " +
             std::to_string(a.start.lane) + " slot " + std::to_string(a.start.slot));
    }
    for (const auto& a : fs.actors) {
        const ManeuverSpec m = fs.maneuver_of(a.id);
        std::string stmt = "start " + a.id + " " + std::string(to_keyword(m.kind));
        if (m.target) stmt += " of " + *m.target;
        emit(stmt);
    }
    for (const auto& a : fs.actors) {
        auto it = fs.end_positions.find(a.id);
        if (it == fs.end_positions.end()) continue;
        emit("end " + a.id + " lane " + std::to_string(it->second.lane) + " slot " +
             std::to_string(it->second.slot));
    }
    return out;
}

}  // namespace sforge
