#pragma once

#include <stdexcept>
#include <string>

namespace mtd {

/// Base class for every error raised by the library. `kind()` is a short,
/// stable tag used by the CLI for its machine-readable error line.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// An observation with zero likelihood under the filter's conditioning policy.
class ImpossibleObservation : public Error {
public:
    explicit ImpossibleObservation(const std::string& what)
        : Error("ImpossibleObservation", what) {}
};

class NoConvergence : public Error {
public:
    explicit NoConvergence(const std::string& what) : Error("NoConvergence", what) {}
};

/// Best-response table whose greedy actions cannot be summarised by one threshold.
class DegenerateThreshold : public Error {
public:
    explicit DegenerateThreshold(const std::string& what)
        : Error("DegenerateThreshold", what) {}
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("ParseError", "line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error("ValidationError", what) {}
};

}  // namespace mtd
