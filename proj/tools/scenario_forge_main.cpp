#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sforge/cli.hpp"

namespace {

void add_common_options(CLI::App* cmd, sforge::CompileJob& job) {
    cmd->add_option("inputs", job.inputs, "scenario files (.fscn)")->required()->expected(-1);
    cmd->add_option("--out", job.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--schema-dir", job.schema_dir, "directory with the bundled schema subsets");
    cmd->add_option("--config", job.config_file,
                    "vehicle/range configuration file (default: $SCENARIO_FORGE_CONFIG)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scenario-forge: compiles keyword-based freeway scenarios into OpenDRIVE, "
                 "OpenSCENARIO and a constraint-rules file, and checks their execution"};
    app.require_subcommand(1);

    sforge::CompileJob job;

    CLI::App* compile = app.add_subcommand("compile", "emit .xodr, .xosc and .rules.json per input");
    add_common_options(compile, job);
    compile->add_option("--format", job.format, "xodr | xosc | rules | all")->capture_default_str();

    CLI::App* validate = app.add_subcommand("validate", "schema and rule report, no files written");
    add_common_options(validate, job);

    CLI::App* sample = app.add_subcommand("sample", "emit rule-respecting concrete valuations");
    add_common_options(sample, job);
    sample->add_option("--seed", job.seed, "sampling seed")->capture_default_str();
    sample->add_option("--n", job.sample_count, "number of valuations")->capture_default_str();

    CLI::App* check = app.add_subcommand("check", "simulate and answer the four conformance questions");
    add_common_options(check, job);
    check->add_option("--dt", job.dt, "simulation step in seconds")->capture_default_str();
    check->add_flag("--trace", job.write_trace, "write <name>.trace.csv next to the outputs");

    CLI::App* preview = app.add_subcommand("preview", "emit a plan-view .svg per input");
    add_common_options(preview, job);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : sforge::kExitUsage;
    }

    if (compile->parsed()) job.command = sforge::CompileJob::Command::compile;
    if (validate->parsed()) job.command = sforge::CompileJob::Command::validate;
    if (sample->parsed()) job.command = sforge::CompileJob::Command::sample;
    if (check->parsed()) job.command = sforge::CompileJob::Command::check;
    if (preview->parsed()) job.command = sforge::CompileJob::Command::preview;

    return sforge::run(job, std::cout, std::cerr);
}
