#pragma once

// Config-driven execution of one command. Reports are returned as text; the
// caller decides where they go.

#include <cstddef>
#include <string>

#include "doiflow/config.hpp"

namespace doiflow {

enum ExitCode : int {
    exit_success = 0,
    exit_check_failure = 1,
    exit_config_error = 2,
    exit_numerical_failure = 3,
};

struct RunOutcome {
    int exit_code = exit_success;
    /// CSV (first line "# doiflow <command> config=<json>") or, for verify, JSON.
    std::string report;
};

/// Module errors end up in the report with their code and exit 3; a
/// ConfigError propagates.
RunOutcome run(const ScenarioConfig& config, std::size_t workers);

}  // namespace doiflow
