#pragma once

// The acceptance suite: criteria 1-15, each a set of named checks.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace doiflow {

struct Check {
    std::string name;
    double measured = 0.0;
    double lower = 0.0;  // used when `range` is set
    double upper = 0.0;
    bool range = false;  // lower <= measured <= upper, else measured <= upper

    [[nodiscard]] bool pass() const;
    [[nodiscard]] std::string bound_text() const;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<Check> checks;
    std::optional<std::string> error_code;  // set when the run threw
    std::string error_message;

    [[nodiscard]] bool pass() const;
    [[nodiscard]] std::string status() const;  // "pass", "fail" or "error"
    /// First failing check, or the first check.
    [[nodiscard]] const Check* headline() const;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240611;
    std::size_t workers = 1;
    /// Criterion 15 re-runs 1-14 with one worker and compares the JSON bodies.
    bool determinism = true;
    /// Restrict to these criterion ids (all when empty).
    std::vector<int> only;
    /// Called after each criterion completes.
    std::function<void(const CriterionResult&)> on_result;
};

struct CriterionSpec {
    int id;
    std::string title;
};

const std::vector<CriterionSpec>& acceptance_criteria();

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// {"criteria": [{criterion_id, title, status, measured, tolerance, checks, ...}], "passed": bool}
std::string acceptance_json(const std::vector<CriterionResult>& results, const std::string& config_json = "");

/// One line per criterion: "[PASS] 11 Riesz projection: measured 3.1e-15 <= 1e-10".
std::string acceptance_line(const CriterionResult& result);

}  // namespace doiflow
