#pragma once

#include <stdexcept>
#include <string>

namespace raster {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameter combination (grid, generator, or run configuration).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input data. Carries a 1-based line number when the input is a file.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// File or stream failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// A point fell outside the configured canvas while the strict bounds policy is active.
class OutOfBoundsError : public Error {
public:
    using Error::Error;
};

/// Requested metric is undefined for the given input (e.g. silhouette with < 2 clusters).
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

} // namespace raster
