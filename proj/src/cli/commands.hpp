#pragma once

#include "cli/config.hpp"
#include "cli/csv.hpp"
#include "cli/svg.hpp"

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace galpha::cli {

struct CommandOutput {
    CsvTable table;
    std::vector<std::string> notes;  // one-line summaries for the terminal
    std::variant<std::monostate, LinePlot, Heatmap> figure;
};

CommandOutput cmd_spectrum(const RunConfig& cfg);
CommandOutput cmd_stability_map(const RunConfig& cfg);
CommandOutput cmd_converge(const RunConfig& cfg);
CommandOutput cmd_order_check(const RunConfig& cfg);
CommandOutput cmd_solve(const RunConfig& cfg);

/// Dispatches on cfg.command; cfg must have passed validate().
CommandOutput run_command(const RunConfig& cfg);

/// Full command line (without the program name). Returns the process exit code:
/// 0 success, 1 numerical failure, 2 configuration error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace galpha::cli
