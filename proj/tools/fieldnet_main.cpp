#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fieldnet/config.hpp"
#include "fieldnet/errors.hpp"
#include "fieldnet/pipeline.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir;
};

fieldnet::RunConfig resolve(const CommonArgs& args) {
    fieldnet::RunConfig cfg;
    if (!args.config_path.empty())
        cfg = fieldnet::RunConfig::from_file(args.config_path);
    for (const auto& kv : args.overrides) cfg.apply_override(kv);
    if (!args.output_dir.empty()) cfg.output_dir = args.output_dir;
    return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "configuration file");
    cmd->add_option("-s,--set", args.overrides, "override: key=value");
    cmd->add_option("-o,--output-dir", args.output_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"field reconstruction and success regression for event-log data"};
    app.require_subcommand(1);

    CommonArgs args;
    bool dry_run = false;

    add_common(app.add_subcommand("ingest-validate",
                                  "parse inputs and report row errors"),
               args);
    add_common(app.add_subcommand("snapshot", "export per-window networks"), args);
    add_common(app.add_subcommand("metrics", "compute position measures"), args);
    add_common(app.add_subcommand("careers", "career types and curves"), args);
    add_common(app.add_subcommand("panel", "assemble the regression panel"), args);
    add_common(app.add_subcommand("fit", "fit mixed models on an existing panel"),
               args);
    auto* pipeline =
        app.add_subcommand("pipeline", "run every stage end to end");
    add_common(pipeline, args);
    pipeline->add_flag("--dry-run", dry_run, "validate configuration, write nothing");
    add_common(app.add_subcommand("synth", "generate a synthetic fixture"), args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const fieldnet::RunConfig cfg = resolve(args);
        if (app.got_subcommand("ingest-validate")) fieldnet::run_ingest_validate(cfg);
        else if (app.got_subcommand("snapshot")) fieldnet::run_snapshot(cfg);
        else if (app.got_subcommand("metrics")) fieldnet::run_metrics(cfg);
        else if (app.got_subcommand("careers")) fieldnet::run_careers(cfg);
        else if (app.got_subcommand("panel")) fieldnet::run_panel(cfg);
        else if (app.got_subcommand("fit")) fieldnet::run_fit(cfg);
        else if (app.got_subcommand("pipeline")) fieldnet::run_pipeline(cfg, dry_run);
        else if (app.got_subcommand("synth")) fieldnet::run_synth(cfg);
    } catch (const fieldnet::StageError& err) {
        std::cerr << "error " << err.what() << '\n';
        return err.exit_code;
    } catch (const fieldnet::ValidationError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const fieldnet::NumericalError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    }
    return 0;
}
