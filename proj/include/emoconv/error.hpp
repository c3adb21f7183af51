#pragma once

#include <stdexcept>
#include <string>

namespace emoconv {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad or missing configuration: provider file, credential, keyword list.
struct ConfigError : Error {
    using Error::Error;
};

// A caller broke an operation's precondition.
struct PreconditionError : Error {
    using Error::Error;
};

// Input data that violates a type invariant. `line` is 1-based, 0 when the
// record did not come from a line-oriented file.
struct ValidationError : Error {
    ValidationError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};

// An LLM call failed after exhausting retries, or failed permanently.
struct TransportError : Error {
    TransportError(const std::string& what, int status = 0) : Error(what), status(status) {}
    int status;
};

// An LLM response that could not be parsed into the expected shape.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace emoconv
