#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsepcp {

/// Failure categories. The CLI maps each one to its own exit code.
enum class ErrorKind {
    parse,       // malformed input text
    structure,   // cycle or otherwise invalid graph structure
    domain,      // unknown variable or out-of-range argument
    contract,    // violated precondition
    generation,  // data generation failed (e.g. constant column)
    usage,       // invalid command-line combination
    io,          // file could not be read or written
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace dsepcp
