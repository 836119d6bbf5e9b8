// types.hpp - basic identifiers and error types shared by all modules
#ifndef SHP_TYPES_HPP
#define SHP_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace shp {

using QueryId = std::uint32_t;
using DataId = std::uint32_t;
using BucketId = std::uint32_t;
using EdgeIndex = std::uint64_t;

inline constexpr BucketId kNoBucket = std::numeric_limits<BucketId>::max();

// Raised when input data or parameters violate a documented precondition.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed file content. `line` is 1-based, 0 when not tied to a line.
class ParseError : public ValidationError {
public:
    ParseError(std::size_t line, const std::string &what)
        : ValidationError(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// A file could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace shp

#endif // SHP_TYPES_HPP
