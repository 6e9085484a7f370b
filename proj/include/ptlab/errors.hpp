#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ptlab {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation outside the admissible time window (e.g. t >= T).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Parameters violate a stated constraint. Carries every violation found.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}
    explicit ValidationError(const std::string& violation)
        : ValidationError(std::vector<std::string>{violation}) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> violations_;
};

/// Non-finite intermediate value during evaluation or integration.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Operation not defined for the given input kind.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace ptlab
