#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ftsdos/analysis.hpp"
#include "ftsdos/margin.hpp"
#include "ftsdos/scenario.hpp"

namespace ftsdos {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitConfig = 2,     // schema violation, unreadable input, unwritable output
    kExitDiverged = 3,   // run stopped early or ended farther from the origin than it started
    kExitBounds = 4,     // a requested bound check failed
};

const char* version();

inline constexpr const char* kOutputRootEnv = "FTSDOS_OUTPUT_ROOT";

/// @p override if non-empty, else $FTSDOS_OUTPUT_ROOT, else "./runs".
std::filesystem::path output_root(const std::filesystem::path& override = {});

/// <root>/<name>-<config hash>.
std::filesystem::path output_dir(const ScenarioConfig& config, const std::filesystem::path& root);

/// Margin from the scenario's DoS parameters; nullopt when they admit none (theta <= 1).
std::optional<StabilityMargin> scenario_margin(const ScenarioConfig& config, const Scenario& scenario);

struct CheckOutcome {
    BoundReport report;
    bool counted = true;  // false: informational only (preconditions unmet, not requested)
};

/// Runs the requested checks, or every applicable one when the config names none.
std::vector<CheckOutcome> run_checks(const ScenarioConfig& config, const Scenario& scenario,
                                     const SimLog& log, const std::optional<StabilityMargin>& margin);

struct RunResult {
    std::string name;
    std::filesystem::path config_path;
    std::filesystem::path output_dir;
    int exit_code = kExitOk;
    std::string message;

    RunStatus status = RunStatus::Completed;
    std::optional<double> settled_at;
    std::size_t events = 0;
    std::size_t transmissions = 0;
    double min_inter_event = 0.0;
    double duty_cycle = 0.0;
    double final_norm = 0.0;
    bool checks_passed = true;
    std::vector<CheckOutcome> checks;
};

/// Exit code for a finished run and its checks.
int classify(const SimLog& log, const std::vector<CheckOutcome>& checks);

/// Loads, simulates, checks and writes artifacts. Never throws; errors map to exit codes.
RunResult run_scenario(const std::filesystem::path& config_path, const std::filesystem::path& root);

struct BatchResult {
    std::vector<RunResult> runs;  // sorted by config file name
    int exit_code = kExitOk;
    std::string summary_csv;
    std::filesystem::path summary_path;
};

/**
 * Runs every *.json under @p dir on @p jobs worker threads. Results do not
 * depend on @p jobs. Exit code is kExitConfig for an empty directory,
 * otherwise the largest per-run exit code.
 */
BatchResult run_batch(const std::filesystem::path& dir, int jobs, const std::filesystem::path& root);

/// Re-runs the checks on logs already stored for @p config_path.
RunResult check_stored(const std::filesystem::path& config_path, const std::filesystem::path& root);

}  // namespace ftsdos
