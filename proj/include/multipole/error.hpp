#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace multipole {

enum class ErrorKind { validation, io, budget, internal };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class BudgetExceeded : public Error {
public:
    explicit BudgetExceeded(const std::string& what) : Error(ErrorKind::budget, what) {}
};

// Raised by cholesky(); pivot is the zero-based row at which factorization failed.
class NotPositiveDefinite : public ValidationError {
public:
    NotPositiveDefinite(std::size_t pivot, double value)
        : ValidationError("matrix is not positive definite (pivot " + std::to_string(pivot) +
                          " = " + std::to_string(value) + ")"),
          pivot_(pivot) {}
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

}  // namespace multipole
