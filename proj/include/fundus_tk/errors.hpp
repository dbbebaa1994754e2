#pragma once

#include <stdexcept>
#include <string>

namespace ftk {

/// Invalid argument or out-of-range parameter.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Internal consistency violated, e.g. a tile plan that leaves pixels uncovered.
class IntegrityError : public std::runtime_error {
public:
    explicit IntegrityError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration lookup failed (unknown resolution group, malformed stats file).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A metric has no defined value for the given input (e.g. AUC on single-class labels).
class UndefinedMetricError : public std::domain_error {
public:
    explicit UndefinedMetricError(const std::string& what) : std::domain_error(what) {}
};

/// File content does not match the expected on-disk format.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ftk
