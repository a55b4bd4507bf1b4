#pragma once

#include <iosfwd>

#include "qmeas_cli/config.hpp"

namespace qmeas::cli {

enum ExitStatus : int { kSuccess = 0, kValidationFailure = 1, kNumericalFailure = 2 };

/// Runs the configured scenario, writes CSV tables and summary.json into
/// config.output_dir and prints a one-line summary to `out` (unless quiet).
/// Diagnostics go to `err`. Returns an ExitStatus.
int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace qmeas::cli
