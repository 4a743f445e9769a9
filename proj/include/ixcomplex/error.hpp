#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ixcomplex {

// Base for every domain failure; the CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, std::size_t offset)
        : Error(message + " at offset " + std::to_string(offset)), offset_(offset), detail_(message) {}

    std::size_t offset() const { return offset_; }
    const std::string& detail() const { return detail_; }

private:
    std::size_t offset_;
    std::string detail_;
};

class EvalError : public Error {
public:
    using Error::Error;
};

class UnboundVariableError : public EvalError {
public:
    explicit UnboundVariableError(std::string variable)
        : EvalError("unbound variable '" + variable + "'"), variable_(std::move(variable)) {}

    const std::string& variable() const { return variable_; }

private:
    std::string variable_;
};

class NegativeCountError : public EvalError {
public:
    explicit NegativeCountError(std::int64_t value)
        : EvalError("count expression evaluates to " + std::to_string(value) + " (inadmissible binding)"),
          value_(value) {}

    std::int64_t value() const { return value_; }

private:
    std::int64_t value_;
};

class OverflowError : public Error {
public:
    OverflowError() : Error("integer overflow in exact arithmetic") {}
};

class ValidationError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError();
    return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowError();
    return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError();
    return r;
}

}  // namespace detail
}  // namespace ixcomplex
