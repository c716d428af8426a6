#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace doiflow {

/// Machine-readable failure categories. The string form is what reports carry.
enum class ErrorCode {
    invalid_input,
    convergence_failure,
    domain_error,
    shape_error,
    index_error,
    truncation_error,
    patch_error,
    gap_error,
    contour_error,
    quadrature_error,
    config_error,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define DOIFLOW_DEFINE_ERROR(Name, code_value)                                        \
    class Name : public Error {                                                       \
    public:                                                                           \
        explicit Name(const std::string& what) : Error(ErrorCode::code_value, what) {} \
    }

DOIFLOW_DEFINE_ERROR(InvalidInput, invalid_input);
DOIFLOW_DEFINE_ERROR(ConvergenceFailure, convergence_failure);
DOIFLOW_DEFINE_ERROR(DomainError, domain_error);
DOIFLOW_DEFINE_ERROR(ShapeError, shape_error);
DOIFLOW_DEFINE_ERROR(IndexError, index_error);
DOIFLOW_DEFINE_ERROR(TruncationError, truncation_error);
DOIFLOW_DEFINE_ERROR(PatchError, patch_error);
DOIFLOW_DEFINE_ERROR(GapError, gap_error);
DOIFLOW_DEFINE_ERROR(ContourError, contour_error);
DOIFLOW_DEFINE_ERROR(QuadratureError, quadrature_error);

#undef DOIFLOW_DEFINE_ERROR

/// ConfigError keeps the offending field (or "line N" for syntax errors) separately.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(ErrorCode::config_error, field + ": " + what), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace doiflow
