#pragma once

#include <stdexcept>
#include <string>

namespace qexplain {

enum class ErrorKind {
    ArityMismatch,
    UnknownPredicate,
    DuplicateTid,
    ParseError,
    HeadVariableNotInBody,
    NonBooleanQuery,
    UnboundVariable,
    TooManyVariables,
    QueryNotTrue,
    UnknownTid,
    InconsistentInput,
    ExplosionGuard,
    InvalidParams,
    NonNumericPosition,
    InvalidInput,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::ArityMismatch: return "ArityMismatch";
        case ErrorKind::UnknownPredicate: return "UnknownPredicate";
        case ErrorKind::DuplicateTid: return "DuplicateTid";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::HeadVariableNotInBody: return "HeadVariableNotInBody";
        case ErrorKind::NonBooleanQuery: return "NonBooleanQuery";
        case ErrorKind::UnboundVariable: return "UnboundVariable";
        case ErrorKind::TooManyVariables: return "TooManyVariables";
        case ErrorKind::QueryNotTrue: return "QueryNotTrue";
        case ErrorKind::UnknownTid: return "UnknownTid";
        case ErrorKind::InconsistentInput: return "InconsistentInput";
        case ErrorKind::ExplosionGuard: return "ExplosionGuard";
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::NonNumericPosition: return "NonNumericPosition";
        case ErrorKind::InvalidInput: return "InvalidInput";
    }
    return "UnknownError";
}

/// Domain error carrying the error name exposed by the CLI. Parse-time
/// errors also record the 1-based source position.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    Error(ErrorKind kind, std::size_t line, std::size_t col, std::string message)
        : std::runtime_error(std::string(to_string(kind)) + " at " + std::to_string(line) +
                             ":" + std::to_string(col) + ": " + message),
          kind_(kind), line_(line), col_(col) {}

    ErrorKind kind() const { return kind_; }
    std::size_t line() const { return line_; }
    std::size_t col() const { return col_; }

private:
    ErrorKind kind_;
    std::size_t line_ = 0;
    std::size_t col_ = 0;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

[[noreturn]] inline void raise_at(ErrorKind kind, std::size_t line, std::size_t col,
                                  const std::string& message) {
    throw Error(kind, line, col, message);
}

} // namespace qexplain
