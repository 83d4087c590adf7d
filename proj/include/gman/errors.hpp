#pragma once
#include <stdexcept>
#include <string>

namespace gman {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
    using Error::Error;
};

struct DegenerateMetricError : Error {
    using Error::Error;
};

struct DegeneratePlaneError : Error {
    using Error::Error;
};

// Pointwise evaluation failure (log of non-positive argument, etc.).
struct DomainError : Error {
    using Error::Error;
};

struct ParseError : Error {
    size_t offset;
    ParseError(const std::string& msg, size_t off) : Error(msg), offset(off) {}
};

} // namespace gman
