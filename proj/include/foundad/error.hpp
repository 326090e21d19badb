#pragma once

#include <stdexcept>
#include <string>

namespace foundad {

enum class ErrorKind {
    InvalidArgument,  // usage or validation failure
    Io,
    Format,
    ShapeMismatch,
    Numeric,
};

/// Structured error carrying a kind so callers (the CLI in particular) can map
/// failures onto exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace foundad
