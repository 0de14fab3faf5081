#pragma once

#include <stdexcept>
#include <string>

namespace ki67 {

enum class ErrorCode {
    InvalidArgument,
    Io,
    Format,
    Config,
    Placement,
};

/// Exception type thrown by every module of the core library. The C API maps
/// `code()` onto its status enum.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ki67
