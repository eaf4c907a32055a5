#ifndef SSAE_ERRORS_HPP
#define SSAE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ssae {

// Failure categories map one-to-one onto CLI exit codes.
enum class ErrorKind { usage = 1, data = 2, numerical = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Bad flags or an illegal request (e.g. an edit on an inactive concept).
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

/// Malformed or inconsistent inputs: shapes, files, indices.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Rank deficiency, non-finite values, kink proximity.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

}  // namespace ssae

#endif  // SSAE_ERRORS_HPP
