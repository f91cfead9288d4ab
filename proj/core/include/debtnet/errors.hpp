#pragma once

#include <stdexcept>
#include <string>

namespace debtnet {

/// Bad user-supplied configuration (flags, config file, parameter ranges).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid or inconsistent input data (balance sheets, matrices).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Failure while executing an otherwise well-posed computation.
class RuntimeFailure : public std::runtime_error {
public:
    explicit RuntimeFailure(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace debtnet
