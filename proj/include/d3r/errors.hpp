#pragma once

#include <stdexcept>
#include <string>

namespace d3r {

// Configuration, dataset layout and integrity problems. CLI maps these to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// A metric whose value is undefined for the given input (e.g. single-class AUC).
class MetricError : public DataError {
public:
    explicit MetricError(const std::string& msg) : DataError(msg) {}
};

} // namespace d3r
