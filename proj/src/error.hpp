#pragma once

#include <stdexcept>
#include <string>

namespace radsynth {

// Failure categories. The C API and the CLI map these onto error codes,
// so every throw site picks the kind deliberately.
enum class ErrorKind {
    invalid_argument,  // bad parameter or malformed in-memory input
    io,                // filesystem-level failure
    parse,             // malformed file contents
    domain,            // numerically undefined result
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace radsynth
