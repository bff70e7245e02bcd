#pragma once

#include <cctype>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sforge {

// Minimal element/attribute document model: exactly what the emitted road
// and scenario files use (no text content, no namespaces, no CDATA).
struct XmlNode {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;  // insertion order
    std::vector<XmlNode> children;

    XmlNode() = default;
    explicit XmlNode(std::string n) : name(std::move(n)) {}

    XmlNode& set(const std::string& key, const std::string& value) {
        for (auto& [k, v] : attributes) {
            if (k == key) {
                v = value;
                return *this;
            }
        }
        attributes.emplace_back(key, value);
        return *this;
    }
    XmlNode& child(const std::string& n) {
        children.emplace_back(n);
        return children.back();
    }

    const std::string* attribute(const std::string& key) const {
        for (const auto& [k, v] : attributes) {
            if (k == key) return &v;
        }
        return nullptr;
    }
    std::string attribute_or(const std::string& key, const std::string& fallback) const {
        const std::string* v = attribute(key);
        return v == nullptr ? fallback : *v;
    }
    const XmlNode* first(const std::string& n) const {
        for (const auto& c : children) {
            if (c.name == n) return &c;
        }
        return nullptr;
    }
    std::vector<const XmlNode*> all(const std::string& n) const {
        std::vector<const XmlNode*> out;
        for (const auto& c : children) {
            if (c.name == n) out.push_back(&c);
        }
        return out;
    }

    bool operator==(const XmlNode&) const = default;
};

namespace xml_detail {

inline void escape_into(std::string_view raw, std::string& out) {
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
}

inline void write_node(const XmlNode& node, int depth, std::string& out) {
    out.append(static_cast<size_t>(depth) * 2, ' ');
    out += '<';
    out += node.name;
    for (const auto& [k, v] : node.attributes) {
        out += ' ';
        out += k;
        out += "=\"";
        escape_into(v, out);
        out += '"';
    }
    if (node.children.empty()) {
        out += "/>\n";
        return;
    }
    out += ">\n";
    for (const auto& c : node.children) write_node(c, depth + 1, out);
    out.append(static_cast<size_t>(depth) * 2, ' ');
    out += "</";
    out += node.name;
    out += ">\n";
}

}  // namespace xml_detail

inline std::string write_xml(const XmlNode& root) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    xml_detail::write_node(root, 0, out);
    return out;
}

struct XmlError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace xml_detail {

struct Parser {
    std::string_view text;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw XmlError("xml parse error at offset " + std::to_string(pos) + ": " + what);
    }
    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool starts_with(std::string_view prefix) const { return text.substr(pos, prefix.size()) == prefix; }
    void skip_misc() {
        // whitespace, xml declaration, comments, processing instructions
        while (true) {
            skip_ws();
            if (starts_with("<?")) {
                const size_t end = text.find("?>", pos);
                if (end == std::string_view::npos) fail("unterminated declaration");
                pos = end + 2;
            } else if (starts_with("<!--")) {
                const size_t end = text.find("-->", pos);
                if (end == std::string_view::npos) fail("unterminated comment");
                pos = end + 3;
            } else {
                return;
            }
        }
    }
    std::string read_name() {
        const size_t start = pos;
        while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                                     text[pos] == '_' || text[pos] == ':' || text[pos] == '-' ||
                                     text[pos] == '.')) {
            ++pos;
        }
        if (pos == start) fail("expected a name");
        return std::string(text.substr(start, pos - start));
    }
    std::string unescape(std::string_view raw) {
        std::string out;
        for (size_t i = 0; i < raw.size();) {
            if (raw[i] != '&') {
                out += raw[i++];
                continue;
            }
            const size_t end = raw.find(';', i);
            if (end == std::string_view::npos) fail("unterminated entity");
            const std::string_view entity = raw.substr(i + 1, end - i - 1);
            if (entity == "amp") out += '&';
            else if (entity == "lt") out += '<';
            else if (entity == "gt") out += '>';
            else if (entity == "quot") out += '"';
            else if (entity == "apos") out += '\'';
            else fail("unknown entity &" + std::string(entity) + ";");
            i = end + 1;
        }
        return out;
    }

    XmlNode parse_element() {
        if (pos >= text.size() || text[pos] != '<') fail("expected '<'");
        ++pos;
        XmlNode node;
        node.name = read_name();
        while (true) {
            skip_ws();
            if (pos >= text.size()) fail("unterminated element");
            if (starts_with("/>")) {
                pos += 2;
                return node;
            }
            if (text[pos] == '>') {
                ++pos;
                break;
            }
            const std::string key = read_name();
            skip_ws();
            if (pos >= text.size() || text[pos] != '=') fail("expected '='");
            ++pos;
            skip_ws();
            if (pos >= text.size() || (text[pos] != '"' && text[pos] != '\'')) fail("expected a quote");
            const char quote = text[pos++];
            const size_t start = pos;
            while (pos < text.size() && text[pos] != quote) ++pos;
            if (pos >= text.size()) fail("unterminated attribute value");
            node.attributes.emplace_back(key, unescape(text.substr(start, pos - start)));
            ++pos;
        }
        // children until the closing tag; stray text is rejected
        while (true) {
            skip_misc();
            if (pos >= text.size()) fail("missing closing tag for <" + node.name + ">");
            if (starts_with("</")) {
                pos += 2;
                const std::string closing = read_name();
                if (closing != node.name) {
                    fail("mismatched closing tag </" + closing + "> for <" + node.name + ">");
                }
                skip_ws();
                if (pos >= text.size() || text[pos] != '>') fail("expected '>'");
                ++pos;
                return node;
            }
            if (text[pos] != '<') fail("unexpected text content");
            node.children.push_back(parse_element());
        }
    }
};

}  // namespace xml_detail

inline XmlNode parse_xml(std::string_view text) {
    xml_detail::Parser p{text};
    p.skip_misc();
    XmlNode root = p.parse_element();
    p.skip_misc();
    if (p.pos != text.size()) p.fail("trailing content after the root element");
    return root;
}

}  // namespace sforge
