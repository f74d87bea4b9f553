#pragma once

#include <stdexcept>
#include <string>

namespace fas {

// Precondition or domain violation on an argument (bad index, probability outside
// [0,1], dimension mismatch, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An algorithm failed to produce a usable number (root did not converge, matrix
// could not be repaired, integrand returned NaN).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad configuration file or key. `line` is 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key, int line, const std::string& what)
        : std::runtime_error(format(key, line, what)), key_(key), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& key, int line, const std::string& what) {
        std::string msg;
        if (line > 0) msg += "line " + std::to_string(line) + ": ";
        if (!key.empty()) msg += "'" + key + "': ";
        return msg + what;
    }

    std::string key_;
    int line_;
};

}  // namespace fas
