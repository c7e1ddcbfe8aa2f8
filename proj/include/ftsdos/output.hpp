#pragma once

#include <filesystem>
#include <string>

#include "ftsdos/dos.hpp"
#include "ftsdos/engine.hpp"

namespace ftsdos {

/// 17 significant digits, so a value survives a text round trip exactly.
std::string format_real(double v);

/// Writes to a sibling temporary file, then renames it over @p path.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/**
 * Columns: t, x_1..x_n, u_1..u_m, V, err_norm, denied, event, transmitted.
 * event and transmitted count the events whose instant falls in
 * (t_{i-1}, t_i] (row 0 holds the event at t = 0); both are 0 or 1 unless two
 * events share one grid step.
 */
std::string trajectory_csv(const SimLog& log);

/// Columns: k, t, transmitted, during_dos, row, x_1..x_n.
std::string events_csv(const SimLog& log);

/// State trace, event stems and shaded denial bands.
std::string trajectory_svg(const SimLog& log, const DosSchedule& schedule, const std::string& title);

/**
 * Rebuilds the dense part of a SimLog (rows and events) from the two CSV
 * files. Fields not stored in CSV (policy, status) keep their defaults.
 * Throws std::runtime_error on malformed input.
 */
SimLog read_logs(const std::filesystem::path& trajectory_csv, const std::filesystem::path& events_csv);

}  // namespace ftsdos
