#include "l2v/error.hpp"

namespace l2v {

namespace {

std::string compose(const std::string& stage, const std::string& message) {
    if (stage.empty()) return message;
    return "[" + stage + "] " + message;
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::usage: return "usage";
        case ErrorKind::io: return "io";
        case ErrorKind::format: return "format";
        case ErrorKind::dimension: return "dimension";
        case ErrorKind::degenerate: return "degenerate";
    }
    return "unknown";
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::usage: return 2;
        case ErrorKind::io:
        case ErrorKind::format: return 3;
        case ErrorKind::dimension: return 4;
        case ErrorKind::degenerate: return 5;
    }
    return 1;
}

Error::Error(ErrorKind kind, std::string message, std::string stage)
    : std::runtime_error(compose(stage, message)),
      kind_(kind),
      message_(std::move(message)),
      stage_(std::move(stage)) {}

Error Error::tagged(std::string stage) const {
    if (!stage_.empty()) return *this;
    return Error(kind_, message_, std::move(stage));
}

}  // namespace l2v
