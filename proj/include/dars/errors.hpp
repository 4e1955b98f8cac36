#pragma once

#include <stdexcept>
#include <string>

namespace dars {

// Malformed input file or stream; message names the offending row/column.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Requirement sequence is not a valid dependency path (missing edge, repeated node, too short).
class InvalidPathError : public std::runtime_error {
public:
    explicit InvalidPathError(const std::string& what) : std::runtime_error(what) {}
};

// Metric has no defined value on this input (e.g. negative-edge share of an edgeless graph).
class UndefinedMetricError : public std::runtime_error {
public:
    explicit UndefinedMetricError(const std::string& what) : std::runtime_error(what) {}
};

// Instance exceeds an exact-computation size limit and no fallback was requested.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Simulation configuration rejected; message names the field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dars
