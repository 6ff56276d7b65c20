#ifndef EPDD_ERRORS_HPP
#define EPDD_ERRORS_HPP

/**
 * @file errors.hpp
 * @brief Exception hierarchy shared by all simulator modules.
 *
 * Every failure the simulator can report derives from epdd::Error and carries
 * an ErrorKind so that the C API and the CLI can map it onto a status code
 * without string matching.
 */

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace epdd {

enum class ErrorKind {
    Validation,
    NonConvergence,
    SingularSystem,
    StabilityViolation,
    SnapshotTimeOutOfRange,
    OutOfDomain,
    DegenerateField,
    SweepMemberFailed,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// One failed invariant of a configuration.
struct Violation {
    std::string field;
    std::string reason;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations);
    ValidationError(std::string field, std::string reason);
    [[nodiscard]] const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

class NonConvergence : public Error {
public:
    NonConvergence(int iterations, double residual);
    int iterations;
    double residual;
};

class StabilityViolation : public Error {
public:
    StabilityViolation(double time, double value, std::size_t node);
    double time;
    double value;
    std::size_t node;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace epdd

#endif
