#pragma once

#include <string>
#include <vector>

namespace sforge {

enum class Severity { error, warning };

// One finding from the parser or the scenario validator. line/column are
// 1-based; 0 means "not tied to a source location".
struct Diagnostic {
    Severity severity = Severity::error;
    int line = 0;
    int column = 0;
    std::string code;     // stable machine-readable id, e.g. "duplicate_start_position"
    std::string message;  // human-readable, names the offending element

    bool operator==(const Diagnostic&) const = default;
};

using Diagnostics = std::vector<Diagnostic>;

inline bool has_errors(const Diagnostics& diags) {
    for (const auto& d : diags) {
        if (d.severity == Severity::error) return true;
    }
    return false;
}

inline std::string format_diagnostic(const Diagnostic& d) {
    std::string out;
    if (d.line > 0) {
        out += std::to_string(d.line);
        out += ":";
        out += std::to_string(d.column);
        out += ": ";
    }
    out += d.severity == Severity::error ? "error: " : "warning: ";
    out += d.message;
    out += " [";
    out += d.code;
    out += "]";
    return out;
}

}  // namespace sforge
