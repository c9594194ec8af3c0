#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ppcal {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes disagree with the manipulator description.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Marker triad is collinear (or too few markers), so no frame can be fitted.
class DegenerateMarkersError : public Error {
public:
    using Error::Error;
};

/// A joint coordinate lies outside every compliance segment.
class OutOfRangeError : public Error {
public:
    using Error::Error;
};

/// Normal matrix is rank deficient. Carries the unobservable combination(s).
class UnidentifiableError : public Error {
public:
    UnidentifiableError(const std::string& what, std::vector<std::string> combinations)
        : Error(what), combinations_(std::move(combinations)) {}

    const std::vector<std::string>& combinations() const noexcept { return combinations_; }

private:
    std::vector<std::string> combinations_;
};

/// Malformed input file. line/column are 1-based; 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column)
        : Error(format(message, line, column)), line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    static std::string format(const std::string& message, int line, int column) {
        std::string out = "line " + std::to_string(line);
        if (column > 0) out += ", column " + std::to_string(column);
        return out + ": " + message;
    }

    int line_;
    int column_;
};

}  // namespace ppcal
