#pragma once

#include "aniso/config.hpp"

#include <string>
#include <vector>

namespace aniso {

/// Process exit codes of a run.
enum ExitCode : int {
    kExitPass = 0,
    kExitVerdictFailed = 1,
    kExitUsage = 2,      // parse or argument errors
    kExitRefused = 3,    // a declared hypothesis is missing
    kExitNumerical = 4,  // solver failure
};

struct RunOutcome {
    int exit_code = kExitPass;
    std::string summary;  // summary.json contents
    std::string timings;  // timings.json contents
    std::vector<std::pair<std::string, std::string>> files;  // name → contents, including the two above
    std::string export_csv;  // solve lattice (x1,x2,u); empty when not requested
    std::string console;     // human-readable report
};

/// Runs the study of `kind` (the config's own kind when absent). Pure: nothing
/// touches the filesystem; see write_outcome.
[[nodiscard]] RunOutcome run_experiment(const ExperimentConfig& config, const std::optional<StudyKind>& kind = {});

/// Writes every file of the outcome into `directory` (created if missing),
/// and the lattice export to `export_path` when both are non-empty.
void write_outcome(const RunOutcome& outcome, const std::string& directory, const std::string& export_path = {});

/// "%.17e"
[[nodiscard]] std::string csv_number(double v);

}  // namespace aniso
