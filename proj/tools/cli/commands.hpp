#ifndef DARBOUX_CLI_COMMANDS_HPP
#define DARBOUX_CLI_COMMANDS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace darboux::cli {

enum ExitCode : int { kSuccess = 0, kValidationFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

/// Command-line overrides, applied on top of the config.
struct Overrides {
    std::optional<std::string> out;
    std::optional<double> tol;
    std::optional<Index> grid;
};

RunConfig apply(RunConfig c, const Overrides& o);

/// Each command writes its files and report.json into the output directory and
/// returns the exit code. Diagnostics go to `log`.
int cmd_transform(const RunConfig& c, std::ostream& log);
int cmd_family(const RunConfig& c, std::ostream& log);
int cmd_validate(const RunConfig& c, std::ostream& log);
int cmd_reproduce(const std::string& figure, const Overrides& o, std::ostream& log);

/// The embedded figure configurations, "fig1" and "fig2".
Json figure_config(const std::string& figure);

/// Full command line, argv[0] included. Maps exceptions to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace darboux::cli

#endif  // DARBOUX_CLI_COMMANDS_HPP
