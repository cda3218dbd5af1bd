#pragma once

#include <stdexcept>
#include <string>

namespace xrl {

/// Bad run configuration: file syntax, unknown keys, out-of-range values,
/// unknown state/action names. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
    explicit ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}

    int line() const { return line_; }

 private:
    int line_ = 0;
};

/// Filesystem trouble while reading or writing artifacts. CLI exit code 3.
class IoError : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

/// Inconsistent artifacts, e.g. runs with different episode counts handed to
/// the analyzer, or trace files missing expected columns. CLI exit code 4.
class DataMismatchError : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

}  // namespace xrl
