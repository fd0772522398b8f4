#pragma once

#include <stdexcept>
#include <string>

namespace ldist {

// Exit-code contract shared by every command: 0 ok, 2 usage/validation,
// 3 I/O or malformed file, 4 numeric failure.
enum class ExitCode : int { Ok = 0, Usage = 2, Io = 3, Numeric = 4 };

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ExitCode::Usage, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ExitCode::Io, what) {}
};

/// Malformed on-disk content (trace files, CSV, JSON).
struct FormatError : IoError {
    explicit FormatError(const std::string& what) : IoError(what) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& what) : Error(ExitCode::Numeric, what) {}
};

}  // namespace ldist
