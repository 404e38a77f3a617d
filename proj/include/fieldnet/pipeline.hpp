#pragma once

#include <stdexcept>
#include <string>

#include "fieldnet/config.hpp"

namespace fieldnet {

// Module errors rebadged with the failing stage and the process exit code
// the CLI should use (2 = data validation, 3 = numerical failure).
struct StageError : std::runtime_error {
    std::string stage;
    int exit_code;

    StageError(std::string stage_name, const std::string& message, int code)
        : std::runtime_error("[" + stage_name + "] " + message),
          stage(std::move(stage_name)),
          exit_code(code) {}
};

// Subcommand bodies; each writes its artifacts under config.output_dir.
void run_ingest_validate(const RunConfig& config);
void run_snapshot(const RunConfig& config);
void run_metrics(const RunConfig& config);
void run_careers(const RunConfig& config);
void run_panel(const RunConfig& config);
void run_fit(const RunConfig& config);
void run_pipeline(const RunConfig& config, bool dry_run = false);
void run_synth(const RunConfig& config);

}  // namespace fieldnet
