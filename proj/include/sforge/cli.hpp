#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#ifndef SFORGE_SCHEMA_DIR
#define SFORGE_SCHEMA_DIR "schemas"
#endif

#include <json.hpp>

#include "sforge/compiler.hpp"
#include "sforge/schema.hpp"

namespace sforge {

// Exit codes: 0 success, 1 diagnostics or verification failures, 2 I/O and
// usage errors.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDiagnostics = 1;
inline constexpr int kExitUsage = 2;

struct CompileJob {
    enum class Command { compile, validate, sample, check, preview };

    Command command = Command::compile;
    std::vector<std::string> inputs;  // .fscn paths
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::size_t sample_count = 0;
    double dt = kDefaultTimeStep;
    std::string format = "all";  // xodr | xosc | rules | all
    std::string schema_dir;      // empty: compiled-in default
    std::string config_file;     // empty: SCENARIO_FORGE_CONFIG or built-in table
    bool write_trace = false;
};

namespace cli_detail {

struct CliError {
    int exit_code = kExitDiagnostics;
    std::string file;
    std::string code;
    std::string message;
    int line = 0;
    int column = 0;
};

inline nlohmann::json to_json(const CliError& e) {
    nlohmann::json j;
    j["file"] = e.file;
    j["code"] = e.code;
    j["message"] = e.message;
    if (e.line > 0) {
        j["line"] = e.line;
        j["column"] = e.column;
    }
    return j;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace cli_detail

// Runs one CLI command over every input; human-readable progress goes to
// `out`, a machine-readable error list to `err` when anything failed.
inline int run(const CompileJob& job, std::ostream& out, std::ostream& err) {
    namespace fs = std::filesystem;
    using cli_detail::CliError;
    std::vector<CliError> errors;
    int exit_code = kExitOk;
    auto record = [&](CliError e) {
        exit_code = std::max(exit_code, e.exit_code);
        errors.push_back(std::move(e));
    };

    if (job.inputs.empty()) {
        record({kExitUsage, "", "usage", "no input scenarios given", 0, 0});
    }
    if (job.format != "all" && job.format != "xodr" && job.format != "xosc" && job.format != "rules") {
        record({kExitUsage, "", "usage", "unknown format '" + job.format + "'", 0, 0});
    }
    if (!(job.dt > 0.0) || job.dt > 0.1) {
        record({kExitUsage, "", "usage", "dt must lie in (0, 0.1]", 0, 0});
    }

    ForgeConfig config;
    std::string config_path = job.config_file;
    if (config_path.empty()) {
        if (const char* env = std::getenv("SCENARIO_FORGE_CONFIG")) config_path = env;
    }
    if (!config_path.empty()) {
        try {
            config = load_config_file(config_path);
        } catch (const std::exception& e) {
            record({kExitUsage, config_path, "config", e.what(), 0, 0});
        }
    }

    const std::string schema_dir = job.schema_dir.empty() ? std::string(SFORGE_SCHEMA_DIR) : job.schema_dir;
    SchemaSubset xodr_schema, xosc_schema;
    const bool needs_schema =
        job.command == CompileJob::Command::validate || job.command == CompileJob::Command::compile;
    if (needs_schema && exit_code < kExitUsage) {
        try {
            xodr_schema = load_schema_subset(schema_dir + "/opendrive-1.4.subset.json");
            xosc_schema = load_schema_subset(schema_dir + "/openscenario-1.0.subset.json");
        } catch (const std::exception& e) {
            record({kExitUsage, schema_dir, "schema", e.what(), 0, 0});
        }
    }

    if (exit_code == kExitOk) {
        std::error_code ec;
        fs::create_directories(job.out_dir, ec);
        if (ec) record({kExitUsage, job.out_dir, "io", "cannot create output directory", 0, 0});
    }

    for (const std::string& input : job.inputs) {
        if (exit_code >= kExitUsage) break;
        std::string text;
        try {
            text = cli_detail::read_file(input);
        } catch (const std::exception& e) {
            record({kExitUsage, input, "io", e.what(), 0, 0});
            continue;
        }
        const std::string stem = fs::path(input).stem().string();

        const ParseResult parsed = parse_functional_scenario(text);
        if (!parsed.ok()) {
            for (const auto& d : parsed.diagnostics) {
                record({kExitDiagnostics, input, d.code, d.message, d.line, d.column});
            }
            out << "FAIL  " << stem << "  (" << parsed.diagnostics.size() << " diagnostics)\n";
            continue;
        }

        try {
            const std::string xodr_name = stem + ".xodr";
            const CompiledScenario compiled = compile_scenario(*parsed.scenario, xodr_name, config);
            const fs::path out_dir(job.out_dir);

            switch (job.command) {
                case CompileJob::Command::compile: {
                    for (const auto& v : validate_against_schema(xodr_schema, emit_opendrive(compiled.road))) {
                        record({kExitDiagnostics, input, "schema.xodr", v, 0, 0});
                    }
                    for (const auto& v : validate_against_schema(
                             xosc_schema, emit_openscenario(compiled.storyboard, xodr_name))) {
                        record({kExitDiagnostics, input, "schema.xosc", v, 0, 0});
                    }
                    if (job.format == "all" || job.format == "xodr") {
                        cli_detail::write_file(out_dir / xodr_name, compiled.xodr_text);
                    }
                    if (job.format == "all" || job.format == "xosc") {
                        cli_detail::write_file(out_dir / (stem + ".xosc"), compiled.xosc_text);
                    }
                    if (job.format == "all" || job.format == "rules") {
                        cli_detail::write_file(out_dir / (stem + ".rules.json"), compiled.rules_text);
                    }
                    out << "OK    " << stem << "\n";
                    break;
                }
                case CompileJob::Command::validate: {
                    size_t issues = 0;
                    for (const auto& v : validate_against_schema(xodr_schema, emit_opendrive(compiled.road))) {
                        record({kExitDiagnostics, input, "schema.xodr", v, 0, 0});
                        ++issues;
                    }
                    for (const auto& v : validate_against_schema(
                             xosc_schema, emit_openscenario(compiled.storyboard, xodr_name))) {
                        record({kExitDiagnostics, input, "schema.xosc", v, 0, 0});
                        ++issues;
                    }
                    for (const auto& violation : check_valuation(compiled.detailed.space, compiled.defaults)) {
                        record({kExitDiagnostics, input, "rule." + violation.subject, violation.message, 0, 0});
                        ++issues;
                    }
                    const RulesFile round_trip = parse_rules_file(compiled.rules_text);
                    if (round_trip !=
                        build_rules_file(compiled.detailed.space, compiled.defaults, compiled.fs.name)) {
                        record({kExitDiagnostics, input, "rules.roundtrip", "rules file round trip mismatch", 0, 0});
                        ++issues;
                    }
                    out << (issues == 0 ? "OK    " : "FAIL  ") << stem << "  (schema + rules)\n";
                    break;
                }
                case CompileJob::Command::sample: {
                    const auto samples = sample_concrete(compiled.detailed.space, job.seed, job.sample_count);
                    nlohmann::json doc;
                    doc["format"] = "scenario-forge-samples";
                    doc["scenario"] = compiled.fs.name;
                    doc["seed"] = job.seed;
                    doc["n"] = job.sample_count;
                    doc["valuations"] = nlohmann::json::array();
                    for (const auto& v : samples) {
                        nlohmann::json entry;
                        for (const auto& [path, value] : v.values) entry[path] = value;
                        doc["valuations"].push_back(std::move(entry));
                    }
                    cli_detail::write_file(out_dir / (stem + ".samples.json"), doc.dump(2) + "\n");
                    out << "OK    " << stem << "  (" << samples.size() << " valuations)\n";
                    break;
                }
                case CompileJob::Command::check: {
                    const Trace trace = simulate(compiled.storyboard, compiled.road, job.dt);
                    const ConformanceReport report =
                        check_conformance(trace, compiled.fs, compiled.storyboard,
                                          compiled.defaults.values.at(compiled.detailed.space.grid_spacing.path()));
                    if (job.write_trace) {
                        cli_detail::write_file(out_dir / (stem + ".trace.csv"), trace_to_csv(trace));
                    }
                    out << (report.all_ok() ? "PASS  " : "FAIL  ") << stem << "  start=" << report.start_ok
                        << " maneuver=" << report.maneuver_ok << " crash_free=" << report.no_crash
                        << " end=" << report.end_ok << " min_gap=";
                    if (std::isinf(report.min_gap)) {
                        out << "inf";
                    } else {
                        out << format_number(report.min_gap);
                    }
                    out << " completion=" << format_number(report.completion_time) << "\n";
                    if (!report.all_ok()) {
                        for (const auto& [actor, ac] : report.actors) {
                            if (!ac.note.empty()) {
                                record({kExitDiagnostics, input, "conformance." + actor, ac.note, 0, 0});
                            }
                        }
                        if (errors.empty() || errors.back().file != input) {
                            record({kExitDiagnostics, input, "conformance", "execution does not match the scenario", 0, 0});
                        }
                    }
                    break;
                }
                case CompileJob::Command::preview: {
                    cli_detail::write_file(out_dir / (stem + ".svg"),
                                           render_preview(compiled.road, compiled.storyboard));
                    out << "OK    " << stem << "  (svg)\n";
                    break;
                }
            }
        } catch (const std::exception& e) {
            record({kExitDiagnostics, input, "pipeline", e.what(), 0, 0});
            out << "FAIL  " << stem << "\n";
        }
    }

    if (!errors.empty()) {
        nlohmann::json doc;
        doc["errors"] = nlohmann::json::array();
        for (const auto& e : errors) doc["errors"].push_back(cli_detail::to_json(e));
        err << doc.dump(2) << "\n";
    }
    return exit_code;
}

}  // namespace sforge
