#ifndef SANKARM_ERRORS_HPP
#define SANKARM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sankarm {

// Base of every error thrown by the library. The CLI maps any of these to a
// nonzero exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed textual input (CSV, rule text, JSON artifacts).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row = 0)
        : Error(row ? what + " (row " + std::to_string(row) + ")" : what), row_(row) {}

    // 1-based line number in the source, 0 when not applicable.
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

// A value outside a feature's attribute domain.
class DomainError : public Error {
public:
    using Error::Error;
};

// Structural problems: duplicate headers, missing timestamps, artifact shape.
class SchemaError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

// Non-finite or otherwise unusable numeric data.
class DataError : public Error {
public:
    using Error::Error;
};

} // namespace sankarm

#endif // SANKARM_ERRORS_HPP
