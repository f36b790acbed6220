#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace drmdp {

enum class Errc {
    invalid_space,
    dimension_mismatch,
    negative_weight,
    distribution_sum,
    missing_kernel_entry,
    invalid_reward,
    invalid_discount,
    invalid_ambiguity,
    invalid_argument,
    missing_true_kernel,
    divergent_series,
    lp_failure,
    non_convergence,
    parse_error,
    io_error,
};

std::string_view to_string(Errc code) noexcept;

/// Base exception of the library. Carries a machine-readable code next to
/// the human-readable message.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

enum class ParseErrc {
    syntax,
    missing_field,
    type_mismatch,
    shape,
    distribution_sum,
    invalid_value,
    io,
};

std::string_view to_string(ParseErrc kind) noexcept;

/// Raised by the problem-file reader. `field()` is a JSON-pointer-like path
/// to the offending value (empty for syntax errors, which report a byte
/// offset in the message instead).
class ParseError : public Error {
public:
    ParseError(ParseErrc kind, std::string field, const std::string& message)
        : Error(Errc::parse_error, message), kind_(kind), field_(std::move(field)) {}

    ParseErrc kind() const noexcept { return kind_; }
    const std::string& field() const noexcept { return field_; }

private:
    ParseErrc kind_;
    std::string field_;
};

} // namespace drmdp
