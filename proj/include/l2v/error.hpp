#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace l2v {

// Error classes map one-to-one onto the CLI exit-code taxonomy.
enum class ErrorKind {
    usage,       // bad parameter or flag (k out of range, unknown option)
    io,          // filesystem failure
    format,      // malformed file or non-finite data
    dimension,   // shape or length mismatch
    degenerate,  // zero norm, cancellation, empty set
};

std::string_view to_string(ErrorKind kind);

/// Exit code the CLI uses for an error of this kind.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message, std::string stage = {});

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& message() const noexcept { return message_; }
    const std::string& stage() const noexcept { return stage_; }

    /// Copy of this error attributed to a pipeline stage. An existing stage is kept.
    Error tagged(std::string stage) const;

private:
    ErrorKind kind_;
    std::string message_;
    std::string stage_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string message) {
    throw Error(kind, std::move(message));
}

}  // namespace l2v
