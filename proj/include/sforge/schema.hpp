#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sforge/xml.hpp"

namespace sforge {

// Subset schema for the emitted documents: per element the allowed attributes
// (with value types), the required ones, and child cardinalities. Attribute
// types: "string", "int", "uint", "double", or "enum:a|b|c".
struct SchemaSubset {
    struct Element {
        std::map<std::string, std::string> attributes;
        std::set<std::string> required;
        std::map<std::string, std::pair<int, int>> children;  // name -> [min, max], max -1 = unbounded
    };

    std::string format;
    std::string version;
    std::string root;
    std::map<std::string, Element> elements;
};

inline SchemaSubset parse_schema_subset(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    SchemaSubset schema;
    schema.format = j.at("format").get<std::string>();
    schema.version = j.at("version").get<std::string>();
    schema.root = j.at("root").get<std::string>();
    for (const auto& [name, spec] : j.at("elements").items()) {
        SchemaSubset::Element e;
        if (spec.contains("attributes")) {
            for (const auto& [attr, type] : spec.at("attributes").items()) {
                e.attributes[attr] = type.get<std::string>();
            }
        }
        if (spec.contains("required")) {
            for (const auto& r : spec.at("required")) e.required.insert(r.get<std::string>());
        }
        if (spec.contains("children")) {
            for (const auto& [child, range] : spec.at("children").items()) {
                e.children[child] = {range.at(0).get<int>(), range.at(1).get<int>()};
            }
        }
        schema.elements[name] = std::move(e);
    }
    return schema;
}

inline SchemaSubset load_schema_subset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schema subset: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_schema_subset(buf.str());
}

namespace schema_detail {

inline bool parses_as_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size();
}

inline bool parses_as_int(const std::string& s, bool unsigned_only) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size() && (!unsigned_only || v >= 0);
}

inline bool value_matches(const std::string& type, const std::string& value) {
    if (type == "string") return true;
    if (type == "double") return parses_as_double(value);
    if (type == "int") return parses_as_int(value, false);
    if (type == "uint") return parses_as_int(value, true);
    if (type.rfind("enum:", 0) == 0) {
        std::string_view options(type);
        options.remove_prefix(5);
        while (!options.empty()) {
            const size_t bar = options.find('|');
            const std::string_view candidate = options.substr(0, bar);
            if (candidate == value) return true;
            if (bar == std::string_view::npos) break;
            options.remove_prefix(bar + 1);
        }
        return false;
    }
    return false;
}

inline void validate_node(const SchemaSubset& schema, const XmlNode& node, const std::string& path,
                          std::vector<std::string>& out) {
    auto it = schema.elements.find(node.name);
    if (it == schema.elements.end()) {
        out.push_back(path + ": unknown element <" + node.name + ">");
        return;
    }
    const SchemaSubset::Element& spec = it->second;
    for (const auto& [key, value] : node.attributes) {
        auto attr = spec.attributes.find(key);
        if (attr == spec.attributes.end()) {
            out.push_back(path + ": unknown attribute '" + key + "'");
        } else if (!value_matches(attr->second, value)) {
            out.push_back(path + ": attribute '" + key + "' value '" + value + "' is not a valid " +
                          attr->second);
        }
    }
    for (const auto& required : spec.required) {
        if (node.attribute(required) == nullptr) {
            out.push_back(path + ": missing required attribute '" + required + "'");
        }
    }
    std::map<std::string, int> counts;
    for (const auto& child : node.children) {
        ++counts[child.name];
        if (!spec.children.count(child.name)) {
            out.push_back(path + ": unexpected child <" + child.name + ">");
        } else {
            validate_node(schema, child, path + "/" + child.name, out);
        }
    }
    for (const auto& [child, range] : spec.children) {
        const int n = counts.count(child) ? counts.at(child) : 0;
        if (n < range.first || (range.second >= 0 && n > range.second)) {
            out.push_back(path + ": child <" + child + "> count " + std::to_string(n) + " outside [" +
                          std::to_string(range.first) + ", " +
                          (range.second < 0 ? std::string("inf") : std::to_string(range.second)) + "]");
        }
    }
}

}  // namespace schema_detail

// Static check of a document against the subset schema; empty means valid.
inline std::vector<std::string> validate_against_schema(const SchemaSubset& schema, const XmlNode& root) {
    std::vector<std::string> out;
    if (root.name != schema.root) {
        out.push_back("root element <" + root.name + "> does not match <" + schema.root + ">");
        return out;
    }
    schema_detail::validate_node(schema, root, root.name, out);
    return out;
}

}  // namespace sforge
