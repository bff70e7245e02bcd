#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "sforge/parameter_space.hpp"

namespace sforge {

inline constexpr const char* kRulesFileFormat = "scenario-forge-rules";
inline constexpr const char* kRulesFileVersion = "1";

// Machine-readable export of the parameter space: every parameter with unit
// and range, every rule in canonical infix form, and the default valuation.
// The interface downstream test-case generators consume.
struct RulesFile {
    std::string scenario;
    struct ParameterEntry {
        std::string path;
        UnitTag unit = UnitTag::unitless;
        Domain domain = Interval{0.0, 0.0};
        bool derived = false;
        std::string define_rule_id;

        bool operator==(const ParameterEntry&) const = default;
    };
    std::vector<ParameterEntry> parameters;  // sorted by path
    struct RuleEntry {
        std::string id;
        RuleRole role = RuleRole::check;
        std::string expr;  // canonical infix form

        bool operator==(const RuleEntry&) const = default;
    };
    std::vector<RuleEntry> rules;  // sorted by id
    ValueMap defaults;

    bool operator==(const RulesFile&) const = default;
};

inline RulesFile build_rules_file(const ParameterSpace& ps, const ConcreteValuation& defaults,
                                  const std::string& scenario_name) {
    RulesFile out;
    out.scenario = scenario_name;
    for (const auto& o : ps.objects) {
        for (const auto& p : o.parameters) {
            out.parameters.push_back({o.id + "." + p.name, p.unit, p.domain, p.derived, p.define_rule_id});
        }
    }
    std::sort(out.parameters.begin(), out.parameters.end(),
              [](const auto& a, const auto& b) { return a.path < b.path; });
    for (const auto& rule : ps.rules) {
        out.rules.push_back({rule.id, rule.role, rule.canonical_text()});
    }
    std::sort(out.rules.begin(), out.rules.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    out.defaults = defaults.values;
    return out;
}

inline std::string print_rules_file(const RulesFile& rf) {
    nlohmann::json j;
    j["format"] = kRulesFileFormat;
    j["version"] = kRulesFileVersion;
    j["scenario"] = rf.scenario;
    j["parameters"] = nlohmann::json::array();
    for (const auto& p : rf.parameters) {
        nlohmann::json entry;
        entry["path"] = p.path;
        entry["unit"] = std::string(to_string(p.unit));
        if (const auto* iv = std::get_if<Interval>(&p.domain)) {
            entry["range"] = {{"lo", iv->lo}, {"hi", iv->hi}};
        } else {
            entry["set"] = std::get<std::vector<double>>(p.domain);
        }
        if (p.derived) {
            entry["derived"] = true;
            entry["define_rule"] = p.define_rule_id;
        }
        j["parameters"].push_back(std::move(entry));
    }
    j["rules"] = nlohmann::json::array();
    for (const auto& r : rf.rules) {
        j["rules"].push_back({{"id", r.id},
                              {"kind", r.role == RuleRole::define ? "define" : "check"},
                              {"expr", r.expr}});
    }
    j["defaults"] = nlohmann::json::object();
    for (const auto& [path, value] : rf.defaults) j["defaults"][path] = value;
    return j.dump(2) + "\n";
}

inline std::string emit_rules_file(const ParameterSpace& ps, const ConcreteValuation& defaults,
                                   const std::string& scenario_name) {
    return print_rules_file(build_rules_file(ps, defaults, scenario_name));
}

struct RulesFileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline RulesFile parse_rules_file(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw RulesFileError(std::string("rules file is not valid json: ") + e.what());
    }
    if (j.value("format", "") != kRulesFileFormat) {
        throw RulesFileError("rules file format tag mismatch");
    }
    RulesFile rf;
    rf.scenario = j.value("scenario", "");
    for (const auto& entry : j.at("parameters")) {
        RulesFile::ParameterEntry p;
        p.path = entry.at("path").get<std::string>();
        auto unit = unit_from_string(entry.at("unit").get<std::string>());
        if (!unit) throw RulesFileError("unknown unit tag for " + p.path);
        p.unit = *unit;
        if (entry.contains("range")) {
            p.domain = Interval{entry.at("range").at("lo").get<double>(),
                                entry.at("range").at("hi").get<double>()};
        } else if (entry.contains("set")) {
            p.domain = entry.at("set").get<std::vector<double>>();
        } else {
            throw RulesFileError("parameter without range or set: " + p.path);
        }
        p.derived = entry.value("derived", false);
        p.define_rule_id = entry.value("define_rule", "");
        rf.parameters.push_back(std::move(p));
    }
    for (const auto& entry : j.at("rules")) {
        RulesFile::RuleEntry r;
        r.id = entry.at("id").get<std::string>();
        const std::string kind = entry.at("kind").get<std::string>();
        if (kind != "check" && kind != "define") throw RulesFileError("unknown rule kind: " + kind);
        r.role = kind == "define" ? RuleRole::define : RuleRole::check;
        r.expr = entry.at("expr").get<std::string>();
        rf.rules.push_back(std::move(r));
    }
    if (j.contains("defaults")) {
        for (const auto& [path, value] : j.at("defaults").items()) {
            rf.defaults[path] = value.get<double>();
        }
    }
    return rf;
}

// Reconstructs a checkable space from a rules file: objects regrouped from
// parameter paths, rules re-parsed from their canonical form. Object kinds
// and layers are not serialized; checking does not depend on them.
inline ParameterSpace rules_file_to_space(const RulesFile& rf) {
    ParameterSpace ps;
    for (const auto& p : rf.parameters) {
        const ParamRef ref = parse_param_path(p.path);
        ObjectNode* node = nullptr;
        for (auto& o : ps.objects) {
            if (o.id == ref.object) {
                node = &o;
                break;
            }
        }
        if (node == nullptr) {
            ps.objects.emplace_back();
            node = &ps.objects.back();
            node->id = ref.object;
        }
        node->parameters.push_back({ref.name, p.unit, p.domain, p.derived, p.define_rule_id});
    }
    for (const auto& r : rf.rules) {
        const ParsedRuleExpr parsed = parse_rule_expr(r.expr);
        if (r.role == RuleRole::define && parsed.lhs.op != Expr::Op::param) {
            throw RulesFileError("define rule without a target reference: " + r.id);
        }
        ps.rules.push_back({r.id, r.role, parsed.lhs, parsed.cmp, parsed.rhs});
    }
    return ps;
}

}  // namespace sforge
