#pragma once

#include <stdexcept>
#include <string>

namespace thermokit {

// Numeric values match the C API status codes and the CLI exit codes.
enum class ErrorCode : int {
    invalid_argument = 1,
    config = 2,
    nonconvergence = 3,
    budget = 4,
    numeric = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::invalid_argument, what);
}

}  // namespace thermokit
