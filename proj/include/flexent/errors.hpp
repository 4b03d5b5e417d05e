#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace flexent {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. fewer than two users).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A hardware or grid constraint is violated (e.g. slice narrower than WSS resolution).
class ConstraintError : public Error {
public:
    using Error::Error;
};

/// Scenario or allocation references something that does not exist.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input data (unsorted time tags, bad counts file).
class DataError : public Error {
public:
    using Error::Error;
};

/// Problem too large for an exhaustive method.
class SizeError : public Error {
public:
    using Error::Error;
};

/// A quantity is undefined for the given input (zero totals, zero rates).
class UndefinedError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

struct FieldIssue {
    std::string pointer;  // JSON pointer of the offending field, e.g. "/users/2/detector/efficiency"
    std::string message;
};

/// One or more fields failed validation; all issues are collected.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<FieldIssue> issues)
        : Error(summarize(issues)), issues_(std::move(issues)) {}

    const std::vector<FieldIssue>& issues() const noexcept { return issues_; }

private:
    static std::string summarize(const std::vector<FieldIssue>& issues) {
        std::string out = "scenario validation failed:";
        for (const auto& issue : issues) out += "\n  " + issue.pointer + ": " + issue.message;
        return out;
    }

    std::vector<FieldIssue> issues_;
};

}  // namespace flexent
